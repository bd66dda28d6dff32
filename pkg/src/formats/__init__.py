"""Output schemas and writers."""
