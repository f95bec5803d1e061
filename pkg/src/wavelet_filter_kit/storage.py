from __future__ import annotations

import csv
import json
import math
from pathlib import Path
from typing import Any, Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from .errors import FormatError
from .filters import BoxPoint, FilterParameters
from .realization import Realization
from .subband import Signal, SubbandFilterSet, as_signal

Pair = tuple[float, float]
KINDS = ("parameters", "realization")


class FactorDocument(BaseModel):
    model_config = ConfigDict(extra="forbid")

    v: list[Pair]
    alpha: Pair = (0.0, 0.0)


class ParameterDocument(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: Literal["parameters"] | None = None
    n: int
    m: int
    rho: float
    factors: list[FactorDocument] = Field(default_factory=list)
    box: list[float] | None = None
    seed: int | None = None


class BlockDocument(BaseModel):
    model_config = ConfigDict(extra="forbid")

    rows: int = Field(ge=0)
    cols: int = Field(ge=0)
    data: list[Pair]


class RealizationDocument(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: Literal["realization"] | None = None
    n: int
    state_dim: int = Field(ge=0)
    a: BlockDocument
    b: BlockDocument
    c: BlockDocument
    d: BlockDocument


class BoxDocument(BaseModel):
    box: list[float]


def _read_json(path: str | Path) -> Any:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: not valid JSON ({exc.msg} at line {exc.lineno})") from exc


def _write_json(path: str | Path, payload: dict) -> Path:
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    target.write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
    return target


def _validate(model: type[BaseModel], raw: Any, path: str | Path) -> BaseModel:
    try:
        return model.model_validate(raw)
    except ValidationError as exc:
        first = exc.errors()[0]
        where = ".".join(str(part) for part in first["loc"]) or "<root>"
        raise FormatError(f"{path}: {where}: {first['msg']}") from exc


def save_params(
    path: str | Path,
    params: FilterParameters,
    box: BoxPoint | None = None,
    seed: int | None = None,
) -> Path:
    payload = params.to_dict()
    if box is not None:
        payload["box"] = box.to_flat()
    if seed is not None:
        payload["seed"] = seed
    return _write_json(path, payload)


def load_params(path: str | Path) -> FilterParameters:
    document = _validate(ParameterDocument, _read_json(path), path)
    return FilterParameters.from_dict(document.model_dump())


def save_realization(path: str | Path, realization: Realization) -> Path:
    return _write_json(path, realization.to_dict())


def load_realization(path: str | Path) -> Realization:
    document = _validate(RealizationDocument, _read_json(path), path)
    return Realization.from_dict(document.model_dump())


def save_filters(path: str | Path, filters: SubbandFilterSet) -> Path:
    return _write_json(path, filters.to_dict())


def detect_kind(path: str | Path) -> str:
    raw = _read_json(path)
    if isinstance(raw, dict):
        if raw.get("kind") in KINDS:
            return raw["kind"]
        if "state_dim" in raw:
            return "realization"
        if "n" in raw and "rho" in raw:
            return "parameters"
    raise FormatError(f"{path}: neither a parameter file nor a realization file")


def load_box(path: str | Path, n: int, m: int) -> BoxPoint:
    raw = _read_json(path)
    values = raw if isinstance(raw, list) else _validate(BoxDocument, raw, path).box
    try:
        return BoxPoint.from_flat([float(x) for x in values], n, m)
    except (TypeError, ValueError) as exc:
        raise FormatError(f"{path}: box coordinates must be numbers") from exc


def read_signal(path: str | Path) -> Signal:
    """One sample per line: ``re,im`` or a single real column."""
    samples = []
    with Path(path).open(encoding="utf-8", newline="") as handle:
        for line_no, row in enumerate(csv.reader(handle), start=1):
            if not row or not "".join(row).strip():
                continue
            try:
                values = [float(cell) for cell in row]
            except ValueError as exc:
                raise FormatError(f"{path}:{line_no}: not a number: {row}") from exc
            if len(values) == 1:
                samples.append(complex(values[0], 0.0))
            elif len(values) == 2:
                samples.append(complex(values[0], values[1]))
            else:
                raise FormatError(f"{path}:{line_no}: expected 1 or 2 columns, got {len(row)}")
    return as_signal(samples)


def write_signal(path: str | Path, samples) -> Path:
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    with target.open("w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        for x in as_signal(samples):
            writer.writerow([repr(float(x.real)), repr(float(x.imag))])
    return target


def write_evaluations(path: str | Path, rows: list[tuple[complex, np.ndarray]]) -> Path:
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    with target.open("w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        for z, value in rows:
            cells = [z.real, z.imag]
            for entry in np.asarray(value).ravel():
                cells.extend([entry.real, entry.imag])
            writer.writerow([repr(float(cell)) for cell in cells])
    return target


def read_evaluations(path: str | Path) -> list[tuple[complex, np.ndarray]]:
    with Path(path).open(encoding="utf-8", newline="") as handle:
        rows = []
        for row in csv.reader(handle):
            if not row:
                continue
            try:
                values = [float(cell) for cell in row]
            except ValueError as exc:
                raise FormatError(f"{path}: non-numeric evaluation row") from exc
            entries = max(len(values) - 2, 0) // 2
            size = math.isqrt(entries)
            if entries == 0 or len(values) % 2 or size * size != entries:
                raise FormatError(f"{path}: {entries} entries do not form a square matrix")
            z = complex(values[0], values[1])
            matrix = np.array(values[2::2]) + 1j * np.array(values[3::2])
            rows.append((z, matrix.reshape(size, size)))
    return rows
