"""Pressure-problem operators and preconditioned GMRES for multiphase filtration."""
