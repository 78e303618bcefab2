"""
Report writers: trajectory CSV and deterministic JSON.
"""
import csv
import json
import logging
from pathlib import Path
from typing import Any, Sequence

logger = logging.getLogger(__name__)

CSV_SCHEMA = "bearing-trajectory"
CSV_VERSION = 1


def write_trajectory_csv(path: Path, columns: Sequence[str], rows: Sequence[Sequence[float]]) -> Path:
    """
    Write samples as CSV; the first line names the schema and its version.

    Floats are written with repr so that identical runs give identical files.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write(f"# {CSV_SCHEMA} v{CSV_VERSION}\n")
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([repr(float(v)) for v in row])
    logger.info(f"Wrote {len(rows)} samples to {path}")
    return path


def write_json(path: Path, payload: Any) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(payload, f, indent=2, sort_keys=True)
        f.write("\n")
    logger.info(f"Wrote report to {path}")
    return path


def read_trajectory_csv(path: Path):
    """Read back (columns, rows) written by write_trajectory_csv."""
    with open(path, "r", encoding="utf-8", newline="") as f:
        header = f.readline().strip()
        if header != f"# {CSV_SCHEMA} v{CSV_VERSION}":
            raise ValueError(f"{path} is not a {CSV_SCHEMA} v{CSV_VERSION} file (header {header!r})")
        reader = csv.reader(f)
        columns = next(reader)
        rows = [[float(v) for v in row] for row in reader]
    return columns, rows
