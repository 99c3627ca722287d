"""Validated p-value containers, tie-aware ranking and p <-> z transforms."""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

SIDEDNESS = ("two.sided", "greater", "less")
TIE_POLICIES = ("first", "last", "average", "min", "max", "random")

# Library-wide default seed for the "random" tie policy.
DEFAULT_SEED = 0

# Acklam's rational approximation to the normal quantile.
_A = (-3.969683028665376e01, 2.209460984245205e02, -2.759285104469687e02,
      1.383577518672690e02, -3.066479806614716e01, 2.506628277459239e00)
_B = (-5.447609879822406e01, 1.615858368580409e02, -1.556989798598866e02,
      6.680131188771972e01, -1.328068155288572e01)
_C = (-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e00,
      -2.549732539343734e00, 4.374664141464968e00, 2.938163982698783e00)
_D = (7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e00,
      3.754408661907416e00)
_P_LOW = 0.02425
_SQRT2 = math.sqrt(2.0)
_SQRT2PI = math.sqrt(2.0 * math.pi)


class DomainError(ValueError):
    """Argument lies outside the domain of a transform."""


class EmptyInputError(ValueError):
    """No usable p-values remain after missing-value handling."""


def norm_cdf(x: float) -> float:
    return 0.5 * math.erfc(-x / _SQRT2)


def _acklam_tail(log_u: float) -> float:
    # lower-tail branch written in terms of log(u)
    q = math.sqrt(-2.0 * log_u)
    c, d = _C, _D
    return ((((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5])
                / ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0))


def _acklam_lower(u: float) -> float:
    # valid for 0 < u <= 0.5
    if u < _P_LOW:
        return _acklam_tail(math.log(u))
    q = u - 0.5
    r = q * q
    a, b = _A, _B
    return ((((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q
            / (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0))


def inv_norm_cdf(u: float) -> float:
    """Standard normal quantile function.

    Acklam's rational approximation followed by one Halley step against
    ``erfc``. The upper half is mapped onto the lower half through
    ``1 - u`` (exact for ``u >= 0.5``), so the tails keep full relative
    accuracy and the absolute error stays below 1e-9 everywhere. Subnormal
    ``u`` skip the refinement (relative error about 2e-9).

    Raises
    ------
    DomainError
        If ``u`` is not strictly inside (0, 1).
    """
    u = float(u)
    if not 0.0 < u < 1.0:
        raise DomainError(f"inv_norm_cdf needs 0 < u < 1, got {u!r}")
    if u > 0.5:
        return -inv_norm_cdf(1.0 - u)
    if u == 0.5:
        return 0.0
    if u < sys.float_info.min:
        # subnormal u: too few bits for the refinement, and exp(x^2/2) overflows
        return _acklam_tail(math.log(u))
    x = _acklam_lower(u)
    e = norm_cdf(x) - u
    step = e * _SQRT2PI * math.exp(0.5 * x * x)
    return x - step / (1.0 + 0.5 * x * step)


def p_to_z(p: float, sidedness: str = "two.sided") -> float:
    """Convert a p-value to a z-value.

    Two-sided p-values map to ``Phi^-1(1 - p/2) >= 0``; ``"greater"`` uses
    ``Phi^-1(1 - p)`` and ``"less"`` uses ``Phi^-1(p)``.
    """
    p = float(p)
    if sidedness not in SIDEDNESS:
        raise ValueError(f"unknown sidedness {sidedness!r}")
    if not 0.0 < p <= 1.0:
        raise DomainError(f"p must lie in (0, 1] for a finite z, got {p!r}")
    if sidedness == "two.sided":
        if p == 1.0:
            return 0.0
        if p < 2.0 * sys.float_info.min:
            # p / 2 would lose bits or underflow; stay in log space
            return -_acklam_tail(math.log(p) - math.log(2.0))
        return -inv_norm_cdf(0.5 * p)
    if sidedness == "greater":
        return -inv_norm_cdf(p)
    return inv_norm_cdf(p)


def z_to_p(z: float, sidedness: str = "two.sided") -> float:
    z = float(z)
    if sidedness == "two.sided":
        return math.erfc(abs(z) / _SQRT2)
    if sidedness == "greater":
        return norm_cdf(-z)
    if sidedness == "less":
        return norm_cdf(z)
    raise ValueError(f"unknown sidedness {sidedness!r}")


@dataclass(frozen=True)
class PValueSet:
    """Raw p-values with optional feature ids.

    Missing entries are stored as NaN and flagged in ``na_mask``. ``m``
    never counts them.
    """

    values: np.ndarray
    ids: Optional[tuple] = None
    na_mask: np.ndarray = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float).ravel()
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        mask = np.isnan(values)
        mask.setflags(write=False)
        object.__setattr__(self, "na_mask", mask)
        ok = values[~mask]
        if np.any((ok < 0.0) | (ok > 1.0)):
            bad = ok[(ok < 0.0) | (ok > 1.0)][0]
            raise ValueError(f"p-values must lie in [0, 1], got {bad!r}")
        if self.ids is not None:
            ids = tuple(self.ids)
            if len(ids) != len(values):
                raise ValueError("ids and values differ in length")
            object.__setattr__(self, "ids", ids)

    @classmethod
    def from_values(cls, values: Sequence, ids: Optional[Sequence] = None,
                    na_rm: bool = True) -> "PValueSet":
        """Build a set from raw input; ``None`` and NaN mark missing values.

        With ``na_rm`` the missing entries (and their ids) are dropped.
        """
        arr = np.array([np.nan if v is None else v for v in values], dtype=float)
        if na_rm:
            keep = ~np.isnan(arr)
            arr = arr[keep]
            if ids is not None:
                ids = [i for i, k in zip(ids, keep) if k]
        return cls(arr, None if ids is None else tuple(ids))

    @property
    def m(self) -> int:
        return int(np.count_nonzero(~self.na_mask))

    @property
    def observed(self) -> np.ndarray:
        """The non-missing values, in input order."""
        return self.values[~self.na_mask]

    def __len__(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class RankVector:
    ranks: np.ndarray
    tie_policy: str
    seed: Optional[int] = None


@dataclass(frozen=True)
class ZValueSet:
    values: np.ndarray
    sidedness: str = "two.sided"

    @classmethod
    def from_pvalues(cls, p: "PValueSet | Sequence[float]",
                     sidedness: str = "two.sided") -> "ZValueSet":
        arr = p.observed if isinstance(p, PValueSet) else np.asarray(p, float)
        return cls(np.array([p_to_z(v, sidedness) for v in arr]), sidedness)

    def to_pvalues(self) -> PValueSet:
        return PValueSet(np.array([z_to_p(z, self.sidedness) for z in self.values]))


def _as_array(p) -> np.ndarray:
    if isinstance(p, PValueSet):
        return p.observed
    return np.asarray(p, dtype=float).ravel()


def rank_with_ties(p, tie_policy: str = "random",
                   seed: Optional[int] = DEFAULT_SEED) -> RankVector:
    """Rank p-values ascending (1 = smallest).

    ``tie_policy`` follows R's ``rank(ties.method=...)``: ``first`` and
    ``last`` break ties by input position, ``min``/``max``/``average``
    give every member of a tie group the same rank, and ``random`` shuffles
    positions within each tie group using ``seed``.
    """
    if tie_policy not in TIE_POLICIES:
        raise ValueError(f"unknown tie policy {tie_policy!r}")
    x = _as_array(p)
    m = len(x)
    if m == 0:
        raise EmptyInputError("cannot rank an empty p-value set")
    if np.isnan(x).any():
        raise ValueError("rank_with_ties needs non-missing values")

    order = np.argsort(x, kind="stable")
    xs = x[order]
    # tie groups as [start, stop) runs over the sorted positions
    breaks = np.flatnonzero(np.diff(xs)) + 1
    starts = np.concatenate(([0], breaks))
    stops = np.concatenate((breaks, [m]))
    pos = np.arange(1, m + 1, dtype=float)
    rng = np.random.default_rng(seed) if tie_policy == "random" else None

    sorted_ranks = np.empty(m, dtype=float)
    for a, b in zip(starts, stops):
        group = pos[a:b]
        if b - a == 1 or tie_policy == "first":
            sorted_ranks[a:b] = group
        elif tie_policy == "last":
            sorted_ranks[a:b] = group[::-1]
        elif tie_policy == "min":
            sorted_ranks[a:b] = group[0]
        elif tie_policy == "max":
            sorted_ranks[a:b] = group[-1]
        elif tie_policy == "average":
            sorted_ranks[a:b] = 0.5 * (group[0] + group[-1])
        else:
            sorted_ranks[a:b] = rng.permutation(group)

    ranks = np.empty(m, dtype=float)
    ranks[order] = sorted_ranks
    ranks.setflags(write=False)
    return RankVector(ranks, tie_policy, seed if tie_policy == "random" else None)
