import math

import numpy as np
import pytest
from scipy.integrate import trapezoid
from hypothesis import given
from hypothesis import strategies as st

from fdrkit.core import p_to_z, rank_with_ties
from fdrkit.twogroup import (LowerBoundConfig, TwoGroupModel, empirical_mixture_cdf,
                             lower_bound_fdr, mixture_density)

from conftest import FIVE_LB, FIVE_P


def test_density_at_zero():
    d = mixture_density(0.0, TwoGroupModel(0.8))
    expect = (0.8 + 0.2 * math.exp(-2.0)) / math.sqrt(2 * math.pi)
    assert d == pytest.approx(expect, rel=1e-14)
    assert d == pytest.approx(0.329952, abs=1e-6)


@pytest.mark.parametrize("pi0", [0.0, 0.3, 1.0])
def test_density_integrates_to_one(pi0):
    z = np.linspace(-12, 14, 200001)
    f = mixture_density(z, TwoGroupModel(pi0, alt_mean=2.0, alt_sd=1.5))
    assert trapezoid(f, z) == pytest.approx(1.0, abs=1e-9)


def test_model_validation():
    with pytest.raises(ValueError):
        TwoGroupModel(1.2)
    with pytest.raises(ValueError):
        TwoGroupModel(0.5, alt_sd=0.0)


def test_empirical_cdf():
    p = [0.3, 0.1, 0.2, 0.4]
    assert list(empirical_mixture_cdf(rank_with_ties(p))) == [0.75, 0.25, 0.5, 1.0]


def test_lower_bound_five():
    z = [p_to_z(p) for p in FIVE_P]
    lb = [lower_bound_fdr(v) for v in z]
    assert [f"{v:.3f}" for v in lb] == [f"{v:.3f}" for v in FIVE_LB]


def test_lower_bound_at_zero():
    assert lower_bound_fdr(0.0) == 0.5
    assert lower_bound_fdr(0.0, LowerBoundConfig(3.0)) == 0.25


def test_lower_bound_overflow():
    assert lower_bound_fdr(40.0) == 0.0
    assert lower_bound_fdr(-40.0) == 0.0


@pytest.mark.parametrize("z", [math.inf, math.nan])
def test_lower_bound_nonfinite(z):
    with pytest.raises(ValueError):
        lower_bound_fdr(z)


def test_bad_odds():
    with pytest.raises(ValueError):
        LowerBoundConfig(0.0)


@given(st.floats(0, 30), st.floats(0, 30), st.floats(0.01, 100))
def test_lower_bound_decreasing_in_abs_z(a, b, odds):
    lo, hi = sorted((a, b))
    cfg = LowerBoundConfig(odds)
    assert 0.0 <= lower_bound_fdr(hi, cfg) <= lower_bound_fdr(lo, cfg) <= 1.0
    assert lower_bound_fdr(-hi, cfg) == lower_bound_fdr(hi, cfg)
