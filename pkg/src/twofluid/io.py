"""Time-series CSV, binary snapshots and JSON run summaries."""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .dynamics import NsmState
from .spectral import Grid

SNAPSHOT_MAGIC = "TWOFLUID-SNAPSHOT 1"
SLOT_NAMES = ("v_minus", "v_plus", "E", "B")


class SnapshotError(ValueError):
    """Snapshot header or payload does not match the format."""


def _fmt(value) -> str:
    return repr(float(value)) if isinstance(value, (float, np.floating)) else str(value)


def write_series(path: str | Path, columns: Sequence[str], rows: Iterable[dict]) -> Path:
    """CSV with a header row; floats are written with ``repr`` so reruns are byte-identical."""
    path = Path(path)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_fmt(row[c]) for c in columns])
    return path


def read_series(path: str | Path) -> tuple[list[str], list[dict[str, float]]]:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = [{k: float(v) for k, v in zip(header, line)} for line in reader]
    return header, rows


def write_snapshot(path: str | Path, state: NsmState) -> Path:
    """Text header then little-endian float64 (re, im) pairs in C order over (field, component, modes)."""
    grid = state.grid
    header = [
        SNAPSHOT_MAGIC,
        f"fields={','.join(SLOT_NAMES)}",
        f"d={grid.d}",
        f"N={grid.N}",
        f"L={grid.L!r}",
        f"t={float(state.t)!r}",
        "components=3",
        "endianness=little",
        "dtype=float64 interleaved real/imaginary",
        "order=C (field, component, k1, ..., kd) in FFT index order",
        "END",
    ]
    payload = np.ascontiguousarray(state.stack(), dtype="<c16").tobytes()
    path = Path(path)
    with open(path, "wb") as fh:
        fh.write(("\n".join(header) + "\n").encode("ascii"))
        fh.write(payload)
    return path


def read_snapshot(path: str | Path) -> NsmState:
    with open(path, "rb") as fh:
        data = fh.read()
    meta = {}
    pos = 0
    lines = []
    while True:
        end = data.find(b"\n", pos)
        if end < 0:
            raise SnapshotError("header is not terminated by END")
        line = data[pos:end].decode("ascii")
        pos = end + 1
        if line == "END":
            break
        lines.append(line)
    if not lines or lines[0] != SNAPSHOT_MAGIC:
        raise SnapshotError(f"not a snapshot file: {path}")
    for line in lines[1:]:
        key, _, value = line.partition("=")
        meta[key] = value
    if meta.get("endianness") != "little":
        raise SnapshotError("only little-endian snapshots are supported")
    grid = Grid(int(meta["d"]), int(meta["N"]), float(meta["L"]))
    shape = (4, 3) + grid.shape
    expected = 16 * math.prod(shape)
    if len(data) - pos != expected:
        raise SnapshotError(f"payload has {len(data) - pos} bytes, expected {expected}")
    arr = np.frombuffer(data, dtype="<c16", offset=pos).reshape(shape).astype(complex)
    return NsmState.from_stack(grid, float(meta["t"]), arr)


def _jsonable(value):
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, (np.floating, float)):
        v = float(value)
        return v if math.isfinite(v) else repr(v)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.bool_):
        return bool(value)
    return value


def write_summary(path: str | Path, summary: dict) -> Path:
    """JSON summary; non-finite floats are stored as the strings 'inf' / 'nan'."""
    path = Path(path)
    with open(path, "w") as fh:
        json.dump(_jsonable(summary), fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path
