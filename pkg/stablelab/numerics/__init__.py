"""Shared numerical kernels: stencils, ODE stepping, quadrature and eigenvalues."""
