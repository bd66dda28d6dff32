"""Periodic solver, initial data, front tracking and transition sweeps."""
