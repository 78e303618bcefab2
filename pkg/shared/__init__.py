"""
Shared module for the ball-bearing dynamics library.

Components:
- config.py - Settings loaded from the environment (tolerances, run defaults)
- errors.py - Exception hierarchy shared by all packages
- log_setup.py - One-shot logging configuration for entry points
"""
