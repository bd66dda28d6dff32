"""Quadrature drivers and special functions."""
