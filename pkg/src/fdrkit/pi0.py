"""Null-proportion estimators: fixed value, last histogram height, Storey."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from .core import EmptyInputError, PValueSet
from .spline import SmoothingSpline

MODES = ("set_value", "last_hist", "storey")
DEFAULT_LAMBDA_GRID = tuple(round(0.05 * k, 2) for k in range(20))

Breaks = Union[int, str]


@dataclass(frozen=True)
class Pi0Spec:
    """How to obtain pi0.

    ``mode="set_value"`` returns ``set_value`` unchanged, ``"last_hist"``
    uses ``hist_breaks`` bins (an integer or ``"scott"``), and ``"storey"``
    smooths raw estimates over ``lambda_grid``.
    """

    mode: str = "set_value"
    set_value: float = 1.0
    hist_breaks: Breaks = "scott"
    lambda_grid: tuple = DEFAULT_LAMBDA_GRID

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"unknown pi0 mode {self.mode!r}; expected one of {MODES}")
        if not 0.0 <= self.set_value <= 1.0:
            raise ValueError(f"set_value must lie in [0, 1], got {self.set_value}")
        if isinstance(self.hist_breaks, str):
            if self.hist_breaks != "scott":
                raise ValueError(f"hist_breaks must be an integer or 'scott', got {self.hist_breaks!r}")
        elif int(self.hist_breaks) < 1:
            raise ValueError("hist_breaks must be positive")
        grid = tuple(float(v) for v in self.lambda_grid)
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ValueError("lambda_grid must be strictly ascending")
        if grid and (grid[0] < 0.0 or grid[-1] >= 1.0):
            raise ValueError("lambda_grid values must lie in [0, 1)")
        object.__setattr__(self, "lambda_grid", grid)

    @property
    def tag(self) -> str:
        return self.mode


@dataclass(frozen=True)
class Pi0Estimate:
    value: float
    method: str
    diagnostics: dict = field(default_factory=dict)


def _observed(p) -> np.ndarray:
    x = p.observed if isinstance(p, PValueSet) else np.asarray(p, dtype=float).ravel()
    x = x[~np.isnan(x)]
    if len(x) == 0:
        raise EmptyInputError("no p-values to estimate pi0 from")
    return x


def scott_bin_count(p) -> int:
    """Number of equal-width bins on [0, 1] from Scott's normal reference rule.

    Bin width is ``3.49 * s * m**(-1/3)`` with ``s`` the sample standard
    deviation; the count ``ceil(1 / width)`` is clamped to ``[1, m - 1]``.
    """
    x = _observed(p)
    m = len(x)
    if m < 2:
        raise ValueError("Scott's rule needs at least 2 p-values")
    if np.ptp(x) == 0.0:
        raise ValueError("all p-values are identical; supply hist_breaks explicitly")
    s = float(np.std(x, ddof=1))
    width = 3.49 * s * m ** (-1.0 / 3.0)
    return int(min(max(math.ceil(1.0 / width), 1), m - 1))


def histogram_counts(x: np.ndarray, bins: int) -> np.ndarray:
    """Counts over ``bins`` equal-width bins of [0, 1].

    Bins are left-open and right-closed, except the first which also
    holds 0; p = 1 therefore always lands in the last bin.
    """
    edges = np.linspace(0.0, 1.0, bins + 1)
    idx = np.clip(np.searchsorted(edges, x, side="left") - 1, 0, bins - 1)
    return np.bincount(idx, minlength=bins)


def last_hist_height(p, breaks: Breaks = "scott") -> Pi0Estimate:
    """Estimate pi0 as ``H_B * B / m`` from the right-most histogram bin."""
    x = _observed(p)
    m = len(x)
    if m < 2:
        raise ValueError("last-histogram-height needs at least 2 p-values")
    bins = scott_bin_count(x) if breaks == "scott" else int(breaks)
    if not 1 <= bins < m:
        raise ValueError(f"number of bins must satisfy 1 <= B < m (B={bins}, m={m})")
    counts = histogram_counts(x, bins)
    raw = counts[-1] * bins / m
    return Pi0Estimate(
        value=float(min(1.0, raw)),
        method="last_hist",
        diagnostics={"bin_count": bins, "bin_heights": counts.tolist(), "raw": float(raw)},
    )


def storey_raw(x: np.ndarray, lambda_grid) -> np.ndarray:
    """Unclamped ``#{p > lambda} / (m (1 - lambda))`` for each lambda."""
    lam = np.asarray(lambda_grid, dtype=float)
    xs = np.sort(x)
    above = len(xs) - np.searchsorted(xs, lam, side="right")
    return above / (len(xs) * (1.0 - lam))


def storey_pi0(p, lambda_grid=DEFAULT_LAMBDA_GRID, df: float = 3.0) -> Pi0Estimate:
    """Storey's smoothed estimate, extrapolated to lambda = 1.

    Raw estimates are clamped to [0, 1], smoothed by a natural cubic
    spline with ``df`` effective degrees of freedom, and the fit is
    extended linearly from the last grid point to 1.
    """
    x = _observed(p)
    lam = np.asarray(lambda_grid, dtype=float)
    if len(x) < 2:
        raise ValueError("Storey's method needs at least 2 p-values")
    if len(lam) < 4:
        raise ValueError(f"lambda grid needs at least 4 points, got {len(lam)}")
    raw = np.clip(storey_raw(x, lam), 0.0, 1.0)
    spline = SmoothingSpline(lam, raw, df=df)
    at_one = float(spline(1.0))
    return Pi0Estimate(
        value=min(1.0, max(0.0, at_one)),
        method="storey",
        diagnostics={
            "lambda_grid": lam.tolist(),
            "raw_estimates": raw.tolist(),
            "spline_value_at_1": at_one,
        },
    )


def get_pi0(p, spec: Optional[Pi0Spec] = None) -> Pi0Estimate:
    spec = spec or Pi0Spec()
    if spec.mode == "set_value":
        return Pi0Estimate(spec.set_value, "set_value")
    if spec.mode == "last_hist":
        return last_hist_height(p, spec.hist_breaks)
    return storey_pi0(p, spec.lambda_grid)
