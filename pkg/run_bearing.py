#!/usr/bin/env python3
"""
Development runner for the ball-bearing CLI.

    python run_bearing.py simulate-spherical --scenario data/case_III_eps_minus_one.json
"""
import sys
from pathlib import Path

# Add the project root to Python path
project_root = Path(__file__).parent
sys.path.insert(0, str(project_root))

from cli.main import main
from shared.config import settings

if __name__ == "__main__":
    print("Ball-bearing dynamics")
    print(f"Tolerance: {settings.tol:g}, samples: {settings.samples}, seed: {settings.seed}")
    print(f"Output directory: {settings.output_dir}")
    print("-" * 50)

    sys.exit(main(sys.argv[1:]))
