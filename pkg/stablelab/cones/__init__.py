"""Minimal cones: level-set geometry, calibration and stability probes."""
