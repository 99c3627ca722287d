"""Seeded two-group simulations and a pi0-estimator benchmark.

Every replication draws from its own generator, seeded by
``SeedSequence(master_seed, spawn_key=(cell, replication))``. Results
therefore do not depend on how replications are scheduled across workers.
"""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .core import PValueSet, z_to_p
from .pi0 import Pi0Spec, get_pi0

ALT_KINDS = ("uniform_low", "normal_shift")
CSV_HEADER = ("estimator", "true_pi0", "alt", "R", "mean", "mse")


@dataclass(frozen=True)
class AlternativeSpec:
    """Distribution of the non-null p-values.

    ``uniform_low`` draws p uniformly on (0, ``max``). ``normal_shift`` draws
    z from N(``mean``, ``sd``) and converts it to a two-sided p-value.
    """

    kind: str = "uniform_low"
    max: float = 0.01
    mean: float = 2.0
    sd: float = 1.0

    def __post_init__(self):
        if self.kind not in ALT_KINDS:
            raise ValueError(f"unknown alternative {self.kind!r}; expected one of {ALT_KINDS}")
        if self.kind == "uniform_low" and not 0.0 < self.max <= 1.0:
            raise ValueError(f"uniform_low max must lie in (0, 1], got {self.max}")
        if self.kind == "normal_shift" and not self.sd > 0:
            raise ValueError(f"normal_shift sd must be positive, got {self.sd}")

    @property
    def tag(self) -> str:
        if self.kind == "uniform_low":
            return f"uniform_low({self.max:g})"
        return f"normal_shift({self.mean:g},{self.sd:g})"

    @classmethod
    def parse(cls, text: str) -> "AlternativeSpec":
        """Parse ``uniform_low:0.01`` or ``normal_shift:2:1``."""
        kind, *params = text.strip().split(":")
        vals = [float(v) for v in params]
        if kind == "uniform_low":
            return cls(kind, max=vals[0]) if vals else cls(kind)
        if kind == "normal_shift":
            keys = ("mean", "sd")
            return cls(kind, **dict(zip(keys, vals)))
        raise ValueError(f"unknown alternative {text!r}")


@dataclass(frozen=True)
class TwoGroupSample:
    pvalues: PValueSet
    labels: np.ndarray  # True = null
    true_pi0: float
    seed: object


def _open_uniform(rng: np.random.Generator, n: int, high: float = 1.0) -> np.ndarray:
    # redraw exact zeros so every draw lies in (0, high)
    x = rng.uniform(0.0, high, n)
    while np.any(x == 0.0):
        zero = x == 0.0
        x[zero] = rng.uniform(0.0, high, int(zero.sum()))
    return x


def generate_two_group(m: int, pi0: float, alt: AlternativeSpec = AlternativeSpec(),
                       seed=0) -> TwoGroupSample:
    """Draw ``round(m * pi0)`` uniform null p-values followed by alternatives.

    ``seed`` may be an int or a :class:`numpy.random.SeedSequence`.
    """
    if int(m) != m or m < 1:
        raise ValueError(f"m must be a positive integer, got {m}")
    if not 0.0 <= pi0 <= 1.0:
        raise ValueError(f"pi0 must lie in [0, 1], got {pi0}")
    m = int(m)
    rng = np.random.default_rng(seed)
    n_null = int(round(m * pi0))
    nulls = _open_uniform(rng, n_null)
    n_alt = m - n_null
    if alt.kind == "uniform_low":
        alts = _open_uniform(rng, n_alt, alt.max)
    else:
        z = rng.normal(alt.mean, alt.sd, n_alt)
        alts = np.array([z_to_p(v) for v in z])
    labels = np.concatenate((np.ones(n_null, dtype=bool), np.zeros(n_alt, dtype=bool)))
    return TwoGroupSample(PValueSet(np.concatenate((nulls, alts))), labels, pi0, seed)


@dataclass(frozen=True)
class ComparisonRow:
    estimator: str
    true_pi0: float
    alt: str
    R: int
    mean: float
    mse: float
    failures: int = 0


@dataclass
class ComparisonTable:
    rows: list = field(default_factory=list)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for r in self.rows:
            w.writerow([r.estimator, repr(float(r.true_pi0)), r.alt, r.R,
                        repr(float(r.mean)), repr(float(r.mse))])
        return buf.getvalue()

    def cell(self, estimator: str, true_pi0: float, alt: Optional[str] = None) -> ComparisonRow:
        for r in self.rows:
            if r.estimator == estimator and r.true_pi0 == true_pi0 and (alt is None or r.alt == alt):
                return r
        raise KeyError((estimator, true_pi0, alt))


def _replicate(m, pi0, alt, estimators, seed_seq):
    sample = generate_two_group(m, pi0, alt, seed_seq)
    out = []
    for spec in estimators:
        try:
            out.append(get_pi0(sample.pvalues, spec).value)
        except ValueError:
            out.append(math.nan)
    return out


def compare_pi0_estimators(m: int, pi0_grid: Sequence[float], alts: Sequence[AlternativeSpec],
                           estimators: Sequence[Pi0Spec], R: int, master_seed: int = 0,
                           workers: int = 1) -> ComparisonTable:
    """Mean estimate and MSE of each estimator over each (pi0, alternative) cell.

    A replication draws one sample and runs every estimator on it, so the
    estimators are compared on identical data. Estimator errors are
    counted as failures for the cell and left out of the mean and MSE.
    """
    if R < 1:
        raise ValueError("R must be at least 1")
    if not pi0_grid or not alts or not estimators:
        raise ValueError("pi0_grid, alts and estimators must be non-empty")

    cells = [(pi0, alt) for alt in alts for pi0 in pi0_grid]
    jobs = [(c, r) for c in range(len(cells)) for r in range(R)]
    results = np.empty((len(cells), R, len(estimators)))

    def run(job):
        c, r = job
        pi0, alt = cells[c]
        seq = np.random.SeedSequence(master_seed, spawn_key=(c, r))
        results[c, r] = _replicate(m, pi0, alt, estimators, seq)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(run, jobs))
    else:
        for job in jobs:
            run(job)

    table = ComparisonTable()
    for c, (pi0, alt) in enumerate(cells):
        for e, spec in enumerate(estimators):
            vals = results[c, :, e]
            good = vals[~np.isnan(vals)]
            mean = float(np.mean(good)) if len(good) else math.nan
            mse = float(np.mean((good - pi0) ** 2)) if len(good) else math.nan
            table.rows.append(ComparisonRow(spec.tag, float(pi0), alt.tag, R, mean, mse,
                                            R - len(good)))
    return table
