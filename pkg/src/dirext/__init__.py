"""Numerical toolkit for Dirichlet extensions of one-dimensional Brownian motion."""
