"""Trace CSV parsing.

A trace file is `#`-prefixed header lines (flat `key = value` metadata
plus one banner line), a column-name row, and %.9g data rows.  The
parser keeps metadata as raw strings so a frame can be re-serialized
byte-identically, and exposes typed views of the handful of keys the
figures need.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

REQUIRED_COLUMNS = (
    "t",
    "r",
    "alpha",
    "q",
    "alpha_m",
    "u_bl",
    "u_ad",
    "u",
    "e_norm",
    "Kz1",
    "Kz2",
    "Kr",
    "V_proxy",
)


class TraceError(Exception):
    """Malformed or unusable trace file."""


class MissingColumn(TraceError):
    def __init__(self, name):
        self.name = name
        super().__init__(f"required column '{name}' not in trace")


class NonMonotoneTime(TraceError):
    pass


@dataclass(frozen=True)
class TraceFrame:
    """Parsed trace: column arrays plus the raw header metadata."""

    meta: dict
    names: tuple
    data: np.ndarray
    banner: str = "# mraclab trace"
    source: str = field(default="", compare=False)

    def column(self, name):
        if name not in self.names:
            raise MissingColumn(name)
        return self.data[:, self.names.index(name)]

    def _meta_float(self, key):
        raw = self.meta.get(key)
        if raw is None:
            return None
        try:
            return float(raw)
        except ValueError:
            return None

    @property
    def mu(self):
        return self._meta_float("config.plant.mu")

    @property
    def eps(self):
        return self._meta_float("config.mrac.eps")

    @property
    def verdict(self):
        return self.meta.get("verdict", "Completed")

    def label(self):
        mu = self.mu
        if mu is not None:
            return f"mu={mu:g}"
        return self.source or "trace"

    def to_csv(self, path):
        lines = [self.banner]
        for key, raw in self.meta.items():
            lines.append(f"# {key} = {raw}")
        lines.append(",".join(self.names))
        for row in self.data:
            lines.append(",".join(f"{v:.9g}" for v in row))
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("\n".join(lines) + "\n")


def load_trace(path, required=REQUIRED_COLUMNS):
    banner = "# mraclab trace"
    meta = {}
    names = None
    rows = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line.strip():
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if " = " in body:
                    key, _, raw = body.partition(" = ")
                    meta[key.strip()] = raw
                else:
                    banner = line
                continue
            if names is None:
                names = tuple(part.strip() for part in line.split(","))
                continue
            try:
                rows.append([float(v) for v in line.split(",")])
            except ValueError as exc:
                raise TraceError(f"{path}: bad data row {line!r}") from exc
    if names is None:
        raise TraceError(f"{path}: no column row found")
    for name in required:
        if name not in names:
            raise MissingColumn(name)
    if not rows:
        raise TraceError(f"{path}: no data rows")
    try:
        data = np.array(rows, dtype=float)
    except ValueError as exc:
        raise TraceError(f"{path}: ragged rows") from exc
    if data.ndim != 2 or data.shape[1] != len(names):
        raise TraceError(f"{path}: ragged rows")
    t = data[:, names.index("t")]
    if np.any(np.diff(t) <= 0.0):
        raise NonMonotoneTime(f"{path}: time column is not strictly increasing")
    return TraceFrame(meta=meta, names=names, data=data, banner=banner, source=str(path))
