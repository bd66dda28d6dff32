"""Fractional heat kernel, its expansion as alpha -> 1, and transition scales."""
