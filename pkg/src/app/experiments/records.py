"""
Run persistence. Tables are CSV written through pandas with every value as a
string (exact rationals stay exact); the run record is JSON.
"""

from collections.abc import Mapping, Sequence
from fractions import Fraction
from pathlib import Path
from typing import Any

import pandas as pd

from ..core.config import settings
from ..core.exceptions import RunError
from ..core.logger import get_logger
from ..schemas.experiment import RunRecord

logger = get_logger(__name__)

RECORD_FILE = "record.json"

Tables = dict[str, pd.DataFrame]


def run_directory(out: str | None, experiment: str, config_hash: str) -> Path:
    """Results land in <out>/<experiment>-<hash prefix>; the same config and seed always share a directory."""
    base = Path(out or settings.RESULTS_DIR)
    return base / f"{experiment}-{config_hash[:12]}"


def _cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, Fraction):
        return str(value)
    return str(value)


def to_frame(rows: Sequence[Mapping[str, Any]], columns: Sequence[str]) -> pd.DataFrame:
    return pd.DataFrame([[_cell(row.get(c)) for c in columns] for row in rows], columns=list(columns), dtype=str)


def write_table(directory: Path, name: str, rows: Sequence[Mapping[str, Any]], columns: Sequence[str]) -> Path:
    directory.mkdir(parents=True, exist_ok=True)
    path = directory / f"{name}.csv"
    to_frame(rows, columns).to_csv(path, index=False, lineterminator="\n")
    logger.debug("table written", extra={"table": name, "rows": len(rows)})
    return path


def read_table(path: Path) -> pd.DataFrame:
    return pd.read_csv(path, dtype=str, keep_default_na=False)


def read_tables(directory: Path, record: RunRecord) -> Tables:
    tables: Tables = {}
    for name, relative in record.artifacts.items():
        if relative.endswith(".csv"):
            path = directory / relative
            if not path.exists():
                raise RunError(f"run artifact {relative} is missing", context={"directory": str(directory)})
            tables[name] = read_table(path)
    return tables


def write_record(directory: Path, record: RunRecord) -> Path:
    directory.mkdir(parents=True, exist_ok=True)
    path = directory / RECORD_FILE
    path.write_text(record.model_dump_json(indent=2) + "\n", encoding="utf-8")
    return path


def load_record(directory: str | Path) -> RunRecord:
    path = Path(directory) / RECORD_FILE
    if not path.exists():
        raise RunError(f"no run record in {directory}", context={"directory": str(directory)})
    return RunRecord.model_validate_json(path.read_text(encoding="utf-8"))


def as_fraction(value: str) -> Fraction:
    return Fraction(value)
