"""Planar isoperimetric inequality by Neumann calibration."""
