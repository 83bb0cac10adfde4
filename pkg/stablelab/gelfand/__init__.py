"""Radial Gelfand problem: branch continuation, lambda* and stability."""
