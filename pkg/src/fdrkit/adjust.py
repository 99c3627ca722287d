"""Feature-level FDR estimates and step-adjusted p-values.

Every method returns two separate sequences. The FDR estimates are
per-feature quantities scaled by pi0 and carry no monotonicity. The
adjusted p-values come from the method's step-up or step-down envelope
over ranked p-values, carry no pi0 factor, and are what reject decisions
compare against the threshold.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .core import DEFAULT_SEED, EmptyInputError, PValueSet, RankVector, rank_with_ties
from .pi0 import Pi0Spec, get_pi0

METHODS = ("BH", "BY", "Bonferroni", "Holm", "Hochberg", "Sidak")
_ALIASES = {
    "bh": "BH", "fdr": "BH", "benjamini-hochberg": "BH",
    "by": "BY", "benjamini-yekutieli": "BY",
    "bonferroni": "Bonferroni", "bon": "Bonferroni",
    "holm": "Holm",
    "hochberg": "Hochberg", "hoch": "Hochberg",
    "sidak": "Sidak",
}


@dataclass(frozen=True)
class AdjustmentMethod:
    kind: str = "BH"
    by_correlation: str = "positive"

    def __post_init__(self):
        kind = _ALIASES.get(str(self.kind).lower())
        if kind is None:
            raise ValueError(f"unknown adjustment method {self.kind!r}; expected one of {METHODS}")
        object.__setattr__(self, "kind", kind)
        if self.by_correlation not in ("positive", "negative"):
            raise ValueError(f"by_correlation must be 'positive' or 'negative', got {self.by_correlation!r}")


@dataclass(frozen=True)
class MethodOutput:
    adjusted_pvalues: Optional[np.ndarray]
    fdrs: np.ndarray


@dataclass(frozen=True)
class FdrResult:
    """Output of :func:`p_fdr`.

    Arrays are aligned with ``raw.values``; missing inputs carry NaN and
    are never rejected. With ``just_fdr`` only ``output.fdrs`` is filled.
    """

    method: AdjustmentMethod
    raw: PValueSet
    output: MethodOutput
    reject: Optional[np.ndarray]
    pi0: float
    threshold: float

    @property
    def fdrs(self) -> np.ndarray:
        return self.output.fdrs

    @property
    def adjusted_pvalues(self) -> Optional[np.ndarray]:
        return self.output.adjusted_pvalues


def harmonic_sum(m: int) -> float:
    """``c(m) = sum_{j=1}^m 1/j``, the arbitrary-dependence constant.

    Correctly rounded via ``math.fsum``.
    """
    return math.fsum(1.0 / j for j in range(1, m + 1))


def _values(p) -> np.ndarray:
    x = p.observed if isinstance(p, PValueSet) else np.asarray(p, dtype=float).ravel()
    if len(x) == 0:
        raise EmptyInputError("no p-values to adjust")
    if np.isnan(x).any():
        raise ValueError("missing values must be removed before adjustment")
    return x


def _prepare(p, ranks: Optional[RankVector]):
    x = _values(p)
    if ranks is None:
        ranks = rank_with_ties(x, "random", DEFAULT_SEED)
    r = np.asarray(ranks.ranks if isinstance(ranks, RankVector) else ranks, dtype=float)
    if len(r) != len(x):
        raise ValueError(f"ranks ({len(r)}) and p-values ({len(x)}) differ in length")
    return x, r


def _check_pi0(pi0: float) -> float:
    pi0 = float(pi0)
    if not 0.0 <= pi0 <= 1.0:
        raise ValueError(f"pi0 must lie in [0, 1], got {pi0}")
    return pi0


def _sort_order(x: np.ndarray, r: np.ndarray) -> np.ndarray:
    # rank order, value order as tie-break so fractional ranks still sort p
    return np.lexsort((x, r))


def _step_up(x: np.ndarray, r: np.ndarray, factor) -> np.ndarray:
    """``min_{j >= i} p_(j) * factor(j)`` mapped back to input order."""
    order = _sort_order(x, r)
    j = np.arange(1, len(x) + 1, dtype=float)
    env = np.minimum.accumulate((x[order] * factor(j))[::-1])[::-1]
    out = np.empty_like(env)
    out[order] = np.minimum(env, 1.0)
    return out


def _step_down(x: np.ndarray, r: np.ndarray, factor) -> np.ndarray:
    """``max_{j <= i} p_(j) * factor(j)`` mapped back to input order."""
    order = _sort_order(x, r)
    j = np.arange(1, len(x) + 1, dtype=float)
    env = np.maximum.accumulate(x[order] * factor(j))
    out = np.empty_like(env)
    out[order] = np.minimum(env, 1.0)
    return out


def compute_bh(p, pi0: float = 1.0, ranks: Optional[RankVector] = None) -> MethodOutput:
    x, r = _prepare(p, ranks)
    m = len(x)
    pi0 = _check_pi0(pi0)
    fdrs = np.minimum(x * (m / r) * pi0, 1.0)
    adjusted = _step_up(x, r, lambda j: m / j)
    return MethodOutput(adjusted, fdrs)


def compute_by(p, pi0: float = 1.0, ranks: Optional[RankVector] = None,
               correlation: str = "positive") -> MethodOutput:
    # same c(m) for both correlation settings; see README
    if correlation not in ("positive", "negative"):
        raise ValueError(f"correlation must be 'positive' or 'negative', got {correlation!r}")
    x, r = _prepare(p, ranks)
    m = len(x)
    pi0 = _check_pi0(pi0)
    mc = m * harmonic_sum(m)
    fdrs = np.minimum(x * (mc / r) * pi0, 1.0)
    adjusted = _step_up(x, r, lambda j: mc / j)
    return MethodOutput(adjusted, fdrs)


def compute_bonferroni(p, pi0: float = 1.0) -> MethodOutput:
    x = _values(p)
    m = len(x)
    pi0 = _check_pi0(pi0)
    base = x * m
    return MethodOutput(np.minimum(base, 1.0), np.minimum(base * pi0, 1.0))


def compute_sidak(p, pi0: float = 1.0) -> MethodOutput:
    x = _values(p)
    m = len(x)
    pi0 = _check_pi0(pi0)
    with np.errstate(divide="ignore"):
        base = -np.expm1(m * np.log1p(-x))
    # rounding guard: 1 - (1 - p)^m <= m p holds exactly
    base = np.minimum(base, x * m)
    return MethodOutput(np.minimum(base, 1.0), np.minimum(base * pi0, 1.0))


def compute_holm(p, pi0: float = 1.0, ranks: Optional[RankVector] = None) -> MethodOutput:
    x, r = _prepare(p, ranks)
    m = len(x)
    pi0 = _check_pi0(pi0)
    fdrs = np.minimum(x * (m + 1 - r) * pi0, 1.0)
    adjusted = _step_down(x, r, lambda j: m + 1 - j)
    return MethodOutput(adjusted, fdrs)


def compute_hochberg(p, pi0: float = 1.0, ranks: Optional[RankVector] = None) -> MethodOutput:
    x, r = _prepare(p, ranks)
    m = len(x)
    pi0 = _check_pi0(pi0)
    fdrs = np.minimum(x * (m + 1 - r) * pi0, 1.0)
    adjusted = _step_up(x, r, lambda j: m + 1 - j)
    return MethodOutput(adjusted, fdrs)


def compute(method: AdjustmentMethod, p, pi0: float = 1.0,
            ranks: Optional[RankVector] = None) -> MethodOutput:
    """Dispatch to the ``compute_*`` function for ``method``."""
    kind = method.kind
    if kind == "BH":
        return compute_bh(p, pi0, ranks)
    if kind == "BY":
        return compute_by(p, pi0, ranks, method.by_correlation)
    if kind == "Bonferroni":
        return compute_bonferroni(p, pi0)
    if kind == "Sidak":
        return compute_sidak(p, pi0)
    if kind == "Holm":
        return compute_holm(p, pi0, ranks)
    return compute_hochberg(p, pi0, ranks)


def p_fdr(p, method="BH", threshold: float = 0.05, pi0_spec: Optional[Pi0Spec] = None,
          tie_policy: str = "random", seed: Optional[int] = DEFAULT_SEED,
          sort_results: bool = False, just_fdr: bool = False) -> FdrResult:
    """FDR estimates, adjusted p-values and reject decisions in one call.

    Parameters
    ----------
    p : PValueSet or array_like
        Raw p-values. NaN entries are excluded from ``m`` and come back as
        NaN in every output column.
    method : str or AdjustmentMethod
        One of BH, BY, Bonferroni, Holm, Hochberg, Sidak.
    threshold : float
        Control level gamma; feature i is rejected when its adjusted
        p-value is <= gamma.
    pi0_spec : Pi0Spec, optional
        How pi0 is obtained. Defaults to the fixed value 1.
    tie_policy, seed
        Passed to :func:`rank_with_ties`.
    sort_results : bool
        Reorder every row by ascending FDR (stable).
    just_fdr : bool
        Fill only the FDR column; adjusted p-values and rejects are None.
    """
    if not isinstance(method, AdjustmentMethod):
        method = AdjustmentMethod(method)
    threshold = float(threshold)
    if not 0.0 <= threshold <= 1.0:
        raise ValueError(f"threshold must lie in [0, 1], got {threshold}")
    pset = p if isinstance(p, PValueSet) else PValueSet(np.asarray(p, dtype=float))
    x = pset.observed
    if len(x) == 0:
        raise EmptyInputError("no p-values left after removing missing values")

    pi0 = get_pi0(x, pi0_spec or Pi0Spec()).value
    ranks = rank_with_ties(x, tie_policy, seed)
    out = compute(method, x, pi0, ranks)

    ok = ~pset.na_mask
    n = len(pset)
    fdrs = np.full(n, np.nan)
    fdrs[ok] = out.fdrs
    adjusted = reject = None
    if not just_fdr:
        adjusted = np.full(n, np.nan)
        adjusted[ok] = out.adjusted_pvalues
        reject = np.zeros(n, dtype=bool)
        reject[ok] = out.adjusted_pvalues <= threshold

    result = FdrResult(method, pset, MethodOutput(adjusted, fdrs), reject, pi0, threshold)
    return sort_by_fdr(result) if sort_results else result


def sort_by_fdr(result: FdrResult) -> FdrResult:
    """Reorder all per-feature columns by ascending FDR; missing rows last."""
    order = np.argsort(result.fdrs, kind="stable")
    raw = result.raw
    ids = None if raw.ids is None else tuple(raw.ids[i] for i in order)
    adjusted = None if result.adjusted_pvalues is None else result.adjusted_pvalues[order]
    reject = None if result.reject is None else result.reject[order]
    return replace(
        result,
        raw=PValueSet(raw.values[order], ids),
        output=MethodOutput(adjusted, result.fdrs[order]),
        reject=reject,
    )


def bh_selection(p, threshold: float) -> np.ndarray:
    """Boolean mask of features selected by the BH largest-k rule.

    Finds ``k = max{i : p_(i) <= gamma i / m}`` directly and selects the
    k smallest p-values, without going through adjusted p-values.
    """
    x = np.asarray(p, dtype=float)
    m = len(x)
    order = np.argsort(x, kind="stable")
    i = np.arange(1, m + 1)
    hits = np.flatnonzero(x[order] <= threshold * i / m)
    selected = np.zeros(m, dtype=bool)
    if len(hits):
        selected[order[: hits[-1] + 1]] = True
    return selected
