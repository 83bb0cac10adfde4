"""Numerical verification lab for stable solutions of elliptic problems."""
