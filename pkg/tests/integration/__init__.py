"""
Integration tests: every CLI subcommand with its outputs, manifest and exit code.
"""
