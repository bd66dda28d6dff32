"""
Test suite of the fractional Fisher-KPP laboratory.

- unit: one module at a time, seconds
- integration: the CLI end to end on tiny grids
- acceptance: desk-scale experiments, minutes each

Usage:
    pytest                                  # unit + integration
    pytest -m acceptance tests/acceptance   # desk-scale experiments
    pytest -m "unit and slow"               # longer solver checks
"""

TEST_CATEGORIES = {
    'unit': 'Module Tests',
    'integration': 'CLI End-to-End Tests',
    'acceptance': 'Desk-Scale Experiments',
    'slow': 'Slow Running Tests'
}
