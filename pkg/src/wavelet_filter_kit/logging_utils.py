from __future__ import annotations

import json
from datetime import datetime, timezone
from pathlib import Path

import numpy as np


def _jsonable(value):
    if isinstance(value, np.ndarray):
        return [_jsonable(item) for item in value]
    if isinstance(value, complex | np.complexfloating):
        return [float(value.real), float(value.imag)]
    if isinstance(value, np.generic):
        return value.item()
    return str(value)


def log_trace(path: str | Path, payload: dict) -> None:
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    record = {"timestamp": datetime.now(timezone.utc).isoformat(), **payload}
    with target.open("a", encoding="utf-8") as handle:
        handle.write(json.dumps(record, sort_keys=True, default=_jsonable) + "\n")


def trace_command(path: str | Path, command: str, outcome: str, **fields) -> None:
    log_trace(path, {"command": command, "outcome": outcome, **fields})
