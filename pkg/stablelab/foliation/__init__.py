"""Minimal-surface ODE leaves in the (s,t) quarter-plane."""
