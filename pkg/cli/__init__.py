"""
CLI Module

Scenario ingestion, batch execution and machine-readable reports.

Components:
- scenario.py - Pydantic scenario models and the JSON/YAML loader
- runner.py - Scenario execution, checks, sweeps and exit codes
- report.py - Versioned trajectory CSV and deterministic JSON writers
- main.py - argparse subcommands
"""
