"""Two-group mixture pieces: mixture density, step-function CDF, lower bound."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import RankVector

_INV_SQRT2PI = 1.0 / math.sqrt(2.0 * math.pi)
# exp() overflows a double just above 709; bound is 0 to working precision well before.
_EXP_LIMIT = 700.0


@dataclass(frozen=True)
class TwoGroupModel:
    pi0: float
    alt_mean: float = 2.0
    alt_sd: float = 1.0
    null_mean: float = 0.0
    null_sd: float = 1.0

    def __post_init__(self):
        if not 0.0 <= self.pi0 <= 1.0:
            raise ValueError(f"pi0 must lie in [0, 1], got {self.pi0}")
        if self.null_sd <= 0 or self.alt_sd <= 0:
            raise ValueError("standard deviations must be positive")


@dataclass(frozen=True)
class LowerBoundConfig:
    default_odds: float = 1.0  # pi1 / pi0

    def __post_init__(self):
        if not self.default_odds > 0:
            raise ValueError(f"default_odds must be positive, got {self.default_odds}")


def _normal_pdf(z, mean, sd):
    u = (np.asarray(z, dtype=float) - mean) / sd
    return _INV_SQRT2PI * np.exp(-0.5 * u * u) / sd


def mixture_density(z, model: TwoGroupModel):
    """``pi0 f0(z) + (1 - pi0) f1(z)`` with Gaussian components."""
    out = (model.pi0 * _normal_pdf(z, model.null_mean, model.null_sd)
           + (1.0 - model.pi0) * _normal_pdf(z, model.alt_mean, model.alt_sd))
    return float(out) if np.ndim(out) == 0 else out


def empirical_mixture_cdf(ranks: RankVector) -> np.ndarray:
    """Step-function estimate of the mixture CDF, ``rank(p_i) / m``."""
    r = np.asarray(ranks.ranks if isinstance(ranks, RankVector) else ranks, dtype=float)
    return r / len(r)


def lower_bound_fdr(z: float, config: LowerBoundConfig = LowerBoundConfig()) -> float:
    """Gaussian lower bound on the posterior null probability of one test.

    Returns ``1 / (1 + exp(z**2 / 2) * odds)`` where ``odds = pi1 / pi0``.
    Feed two-sided p-values through ``p_to_z`` first.
    """
    z = float(z)
    if not math.isfinite(z):
        raise ValueError(f"z must be finite, got {z}")
    half_sq = 0.5 * z * z
    if half_sq > _EXP_LIMIT:
        return 0.0
    return 1.0 / (1.0 + math.exp(half_sq) * config.default_odds)
