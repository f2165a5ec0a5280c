"""Table and metadata output: comma-separated text plus a JSON sidecar.

Tables are UTF-8 with LF line endings and repr-exact floats, so identical
(config, seed) pairs reproduce files byte for byte. Writes are atomic (tmp
file + rename); a failed run leaves no partial table behind.
"""

from __future__ import annotations

import json
import os
import tempfile
from datetime import datetime, timezone

import numpy as np

from .errors import InvalidInput
from .simulate import SweepResult


def _format_value(x: float) -> str:
    if isinstance(x, float) and np.isnan(x):
        return "nan"
    if isinstance(x, float) and x == int(x) and abs(x) < 1e15:
        return str(int(x))
    return repr(float(x))


def atomic_write_text(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def sweep_table_text(result: SweepResult) -> str:
    lines = [",".join(SweepResult.COLUMNS)]
    for row in result.rows:
        lines.append(",".join(_format_value(v) for v in row))
    return "\n".join(lines) + "\n"


def write_sweep_table(result: SweepResult, path: str) -> None:
    atomic_write_text(path, sweep_table_text(result))


def read_sweep_table(path: str) -> np.ndarray:
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip().split(",")
        if tuple(header) != SweepResult.COLUMNS:
            raise InvalidInput(f"unexpected table header {header}")
        rows = [[float(tok) for tok in line.strip().split(",")]
                for line in fh if line.strip()]
    if not rows:
        raise InvalidInput("table has no data rows")
    return np.asarray(rows, dtype=float)


def metadata_record(config_digest: str, seed: int, extra: dict | None = None,
                    timestamp: bool = True) -> dict:
    from . import __version__

    record = {
        "config_hash": config_digest,
        "seed": seed,
        "versions": {"pointtomo": __version__, "numpy": np.__version__},
    }
    if extra:
        record.update(extra)
    if timestamp:
        record["timestamp"] = datetime.now(timezone.utc).isoformat()
    return record


def write_metadata(record: dict, path: str) -> None:
    atomic_write_text(path, json.dumps(record, indent=2, sort_keys=True) + "\n")


def metadata_path_for(table_path: str) -> str:
    base, _ = os.path.splitext(table_path)
    return base + ".meta.json"
