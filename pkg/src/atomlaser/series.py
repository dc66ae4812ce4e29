"""Labelled time series, their CSV form and deviation metrics."""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple

import numpy as np


def _fmt(x: float) -> str:
    # 12 significant digits, fixed exponent style for byte-stable output
    return f"{x:.11e}"


@dataclass(frozen=True, eq=False)
class SeriesTable:
    """A labelled series ``value(t)``; complex values get an imaginary column."""

    label: str
    t: np.ndarray
    value: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.t, dtype=float)
        v = np.asarray(self.value)
        if t.ndim != 1 or v.shape != t.shape:
            raise ValueError("t and value must be 1-D arrays of equal length")
        if len(t) > 1 and np.any(np.diff(t) <= 0):
            raise ValueError(f"{self.label}: time must be strictly increasing")
        if not (np.all(np.isfinite(t)) and np.all(np.isfinite(v))):
            raise ValueError(f"{self.label}: non-finite entries")
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "value", v)

    @property
    def is_complex(self) -> bool:
        return np.iscomplexobj(self.value)

    def to_csv(self) -> str:
        buf = io.StringIO()
        header = ["t_seconds", "value_real"] + (["value_imag"] if self.is_complex else [])
        buf.write(",".join(header) + "\n")
        for t, v in zip(self.t, self.value):
            row = [_fmt(float(t)), _fmt(float(np.real(v)))]
            if self.is_complex:
                row.append(_fmt(float(np.imag(v))))
            buf.write(",".join(row) + "\n")
        return buf.getvalue()

    def write_csv(self, path) -> Path:
        path = Path(path)
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(self.to_csv())
        return path

    @classmethod
    def read_csv(cls, path, label=None) -> "SeriesTable":
        path = Path(path)
        with open(path, encoding="utf-8", newline="") as fh:
            rows = list(csv.reader(fh))
        if not rows or rows[0][:2] != ["t_seconds", "value_real"]:
            raise ValueError(f"{path}: not a series CSV (bad header)")
        data = np.array([[float(x) for x in r] for r in rows[1:]], dtype=float)
        if data.size == 0:
            data = np.zeros((0, len(rows[0])))
        value = data[:, 1] + 1j * data[:, 2] if len(rows[0]) > 2 else data[:, 1]
        return cls(label or path.stem, data[:, 0], value)


class Deviation(NamedTuple):
    max_abs: float
    rms: float
    t_of_max: float


def compare_series(a: SeriesTable, b: SeriesTable) -> Deviation:
    """Max-abs and RMS difference of ``b`` against ``a`` on ``a``'s time grid.

    ``b`` is interpolated linearly when the grids differ; it must cover
    ``a``'s time range.
    """
    if len(a.t) == len(b.t) and np.array_equal(a.t, b.t):
        vb = b.value
    else:
        if a.t[0] < b.t[0] - 1e-15 or a.t[-1] > b.t[-1] + 1e-15:
            raise ValueError("series b does not cover the time range of a")
        vb = np.interp(a.t, b.t, np.real(b.value))
        if b.is_complex:
            vb = vb + 1j * np.interp(a.t, b.t, np.imag(b.value))
    diff = np.abs(a.value - vb)
    if len(diff) == 0:
        return Deviation(0.0, 0.0, math.nan)
    i = int(np.argmax(diff))
    return Deviation(float(diff[i]), float(np.sqrt(np.mean(diff**2))), float(a.t[i]))
