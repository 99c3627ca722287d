"""Per-feature results table and its CSV / JSON serializations."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .adjust import FdrResult
from .core import p_to_z
from .twogroup import LowerBoundConfig, lower_bound_fdr

COLUMNS = ("id", "raw_p", "z", "adjusted_p", "fdr", "lower_bound", "reject")
_FOOTER_KEYS = ("method", "pi0", "threshold", "m")


def _z_of(p: float, sidedness: str) -> float:
    if math.isnan(p):
        return math.nan
    if p == 0.0:
        return math.inf
    return p_to_z(p, sidedness)


def _bound_of(z: float, odds: float) -> float:
    if math.isnan(z):
        return math.nan
    if math.isinf(z):
        return 0.0
    return lower_bound_fdr(z, LowerBoundConfig(odds))


@dataclass
class ResultsTable:
    ids: list
    raw_p: np.ndarray
    z: np.ndarray
    adjusted_p: np.ndarray
    fdr: np.ndarray
    lower_bound: np.ndarray
    reject: list  # bool, or None where undefined
    method: str
    pi0: float
    threshold: float
    m: int

    @classmethod
    def from_result(cls, result: FdrResult, default_odds: float = 1.0,
                    sidedness: str = "two.sided", z=None) -> "ResultsTable":
        """Assemble the table; ``z`` overrides the z-values derived from p."""
        raw = result.raw
        n = len(raw)
        if z is None:
            z = np.array([_z_of(p, sidedness) for p in raw.values])
        z = np.asarray(z, dtype=float)
        if len(z) != n:
            raise ValueError("z and p differ in length")
        bound = np.array([_bound_of(v, default_odds) for v in z])
        ids = list(raw.ids) if raw.ids is not None else [str(i + 1) for i in range(n)]
        adjusted = (np.full(n, np.nan) if result.adjusted_pvalues is None
                    else np.asarray(result.adjusted_pvalues, dtype=float))
        if result.reject is None:
            reject = [None] * n
        else:
            reject = [None if na else bool(r) for r, na in zip(result.reject, raw.na_mask)]
        return cls(ids, raw.values.copy(), z, adjusted, np.asarray(result.fdrs, dtype=float),
                   bound, reject, result.method.kind, float(result.pi0),
                   float(result.threshold), raw.m)

    def sorted_by_fdr(self) -> "ResultsTable":
        """Rows reordered by ascending FDR (stable); missing rows last."""
        order = np.argsort(self.fdr, kind="stable")
        return ResultsTable(
            [self.ids[i] for i in order], self.raw_p[order], self.z[order],
            self.adjusted_p[order], self.fdr[order], self.lower_bound[order],
            [self.reject[i] for i in order], self.method, self.pi0, self.threshold, self.m)

    @property
    def n_rejected(self) -> int:
        return sum(1 for r in self.reject if r)

    def rows(self):
        for i in range(len(self.ids)):
            yield (self.ids[i], self.raw_p[i], self.z[i], self.adjusted_p[i],
                   self.fdr[i], self.lower_bound[i], self.reject[i])

    # -- serialization -------------------------------------------------

    def to_csv(self, display: bool = False) -> str:
        """CSV text; ``display`` rounds to 3 decimals, otherwise 17 digits."""
        fmt = _fmt_display if display else _fmt_exact
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(COLUMNS)
        for row in self.rows():
            ident, *nums, rej = row
            w.writerow([ident, *(fmt(v) for v in nums), _fmt_bool(rej)])
        buf.write(f"# method={self.method}\n")
        buf.write(f"# pi0={_fmt_exact(self.pi0)}\n")
        buf.write(f"# threshold={_fmt_exact(self.threshold)}\n")
        buf.write(f"# m={self.m}\n")
        return buf.getvalue()

    def to_json(self) -> str:
        rows = []
        for ident, p, z, adj, fdr, lb, rej in self.rows():
            rows.append({"id": ident, "raw_p": _json_num(p), "z": _json_num(z),
                         "adjusted_p": _json_num(adj), "fdr": _json_num(fdr),
                         "lower_bound": _json_num(lb), "reject": rej})
        doc = {"method": self.method, "pi0": self.pi0, "threshold": self.threshold,
               "m": self.m, "rows": rows}
        return json.dumps(doc, indent=2) + "\n"

    @classmethod
    def from_csv(cls, text: str) -> "ResultsTable":
        meta = {}
        body = []
        for line in text.splitlines():
            if line.startswith("#"):
                key, _, val = line[1:].strip().partition("=")
                meta[key] = val
            elif line.strip():
                body.append(line)
        reader = csv.reader(body)
        header = next(reader)
        if tuple(header) != COLUMNS:
            raise ValueError(f"unexpected results header {header}")
        cols = list(zip(*reader)) or [()] * len(COLUMNS)
        missing = [k for k in _FOOTER_KEYS if k not in meta]
        if missing:
            raise ValueError(f"results footer lacks {missing}")
        num = [np.array([_parse_num(v) for v in c], dtype=float) for c in cols[1:6]]
        return cls(list(cols[0]), *num, [_parse_bool(v) for v in cols[6]],
                   meta["method"], float(meta["pi0"]), float(meta["threshold"]),
                   int(meta["m"]))

    @classmethod
    def from_json(cls, text: str) -> "ResultsTable":
        doc = json.loads(text)
        rows = doc["rows"]

        def col(key):
            return np.array([math.nan if r[key] is None else r[key] for r in rows], dtype=float)

        return cls([r["id"] for r in rows], col("raw_p"), col("z"), col("adjusted_p"),
                   col("fdr"), col("lower_bound"), [r["reject"] for r in rows],
                   doc["method"], float(doc["pi0"]), float(doc["threshold"]), int(doc["m"]))

    def equals(self, other: "ResultsTable") -> bool:
        """Exact equality, treating NaN as equal to NaN."""
        same_arrays = all(
            np.array_equal(getattr(self, k), getattr(other, k), equal_nan=True)
            for k in ("raw_p", "z", "adjusted_p", "fdr", "lower_bound"))
        return (same_arrays and list(self.ids) == list(other.ids)
                and list(self.reject) == list(other.reject)
                and (self.method, self.pi0, self.threshold, self.m)
                == (other.method, other.pi0, other.threshold, other.m))


def _fmt_exact(v: float) -> str:
    v = float(v)
    if math.isnan(v):
        return "NA"
    return format(v, ".17g")


def _fmt_display(v: float) -> str:
    v = float(v)
    if math.isnan(v):
        return "NA"
    return f"{v:.3f}"


def _fmt_bool(v: Optional[bool]) -> str:
    return "NA" if v is None else ("TRUE" if v else "FALSE")


def _parse_num(s: str) -> float:
    return math.nan if s in ("NA", "") else float(s)


def _parse_bool(s: str) -> Optional[bool]:
    if s in ("NA", ""):
        return None
    return s == "TRUE"


def _json_num(v: float):
    v = float(v)
    if math.isnan(v):
        return None
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return v
