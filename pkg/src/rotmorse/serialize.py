"""Deterministic serialization of tables and phase-space grids."""

from __future__ import annotations

import json
import struct
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .wigner import PhaseSpaceGrid

MAGIC = b"WGR1"
_HEADER = struct.Struct("<4sII4d")


def fmt(x) -> str:
    """12 significant digits; integers and flags verbatim."""
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".12g")


def write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    lines = [",".join(header)]
    lines.extend(",".join(fmt(v) for v in row) for row in rows)
    Path(path).write_text("\n".join(lines) + "\n")


def write_json(path: Path, obj) -> None:
    Path(path).write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def write_wigner_bin(path: Path, grid: PhaseSpaceGrid) -> None:
    """Magic, (n_r, n_p) as uint32, (r_min, r_max, p_min, p_max) as float64, then W row-major in r."""
    values = np.ascontiguousarray(grid.values, dtype="<f8")
    if values.shape != (grid.n_r, grid.n_p):
        raise ValueError("grid values do not match its dimensions")
    header = _HEADER.pack(MAGIC, grid.n_r, grid.n_p, grid.r_min, grid.r_max, grid.p_min, grid.p_max)
    Path(path).write_bytes(header + values.tobytes())


def read_wigner_bin(path: Path) -> PhaseSpaceGrid:
    data = Path(path).read_bytes()
    if len(data) < _HEADER.size:
        raise ValueError("file too short for a WGR1 header")
    magic, n_r, n_p, r_min, r_max, p_min, p_max = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise ValueError(f"bad magic {magic!r}")
    expected = _HEADER.size + 8 * n_r * n_p
    if len(data) != expected:
        raise ValueError(f"expected {expected} bytes, found {len(data)}")
    values = np.frombuffer(data, dtype="<f8", offset=_HEADER.size).reshape(n_r, n_p).astype(float)
    return PhaseSpaceGrid(r_min, r_max, n_r, p_min, p_max, n_p, values)


def write_wigner_csv(path: Path, grid: PhaseSpaceGrid) -> None:
    r, p, w = grid.r, grid.p, grid.values
    rows = ((r[i], p[k], w[i, k]) for i in range(grid.n_r) for k in range(grid.n_p))
    write_csv(path, ("r", "p", "W"), rows)
