import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import ndtri

from fdrkit.core import (DomainError, EmptyInputError, PValueSet, ZValueSet, inv_norm_cdf,
                         p_to_z, rank_with_ties, z_to_p)

from conftest import FIVE_P, FIVE_Z

probs = st.floats(min_value=1e-300, max_value=1 - 1e-16, exclude_min=False)


def test_inv_norm_cdf_examples():
    assert inv_norm_cdf(0.5) == 0.0
    assert inv_norm_cdf(0.9975) == pytest.approx(2.807, abs=5e-4)
    assert inv_norm_cdf(0.975) == pytest.approx(1.960, abs=5e-4)


@pytest.mark.parametrize("u", [0.0, 1.0, -0.1, 1.5])
def test_inv_norm_cdf_domain(u):
    with pytest.raises(DomainError):
        inv_norm_cdf(u)


def test_inv_norm_cdf_accuracy_grid():
    us = np.concatenate([np.logspace(-300, -1, 2000), np.linspace(0.01, 0.99, 2000),
                         1 - np.logspace(-16, -1, 2000)])
    ours = np.array([inv_norm_cdf(u) for u in us])
    assert np.max(np.abs(ours - ndtri(us))) < 1e-9


@given(probs)
def test_inv_norm_cdf_matches_scipy(u):
    assert abs(inv_norm_cdf(u) - ndtri(u)) < 1e-9


@given(st.floats(min_value=1e-300, max_value=0.5))
def test_inv_norm_cdf_antisymmetric(u):
    # snap u so that 1 - u is exact in floating point
    u = 1.0 - (1.0 - u)
    if u == 0.0:
        return
    assert inv_norm_cdf(1.0 - u) == pytest.approx(-inv_norm_cdf(u), abs=1e-12)


def _log_space_quantile(log_u):
    import mpmath
    mpmath.mp.dps = 40
    return float(mpmath.findroot(lambda x: mpmath.log(mpmath.ncdf(x)) - log_u, -37))


@pytest.mark.parametrize("u", [5e-324, 1e-320, 1e-310, 2e-308])
def test_inv_norm_cdf_subnormal(u):
    ref = _log_space_quantile(math.log(u))
    assert inv_norm_cdf(u) == pytest.approx(ref, rel=5e-9)


@pytest.mark.parametrize("p", [5e-324, 1e-315, 3e-308])
def test_p_to_z_subnormal(p):
    ref = -_log_space_quantile(math.log(p) - math.log(2))
    assert p_to_z(p) == pytest.approx(ref, rel=5e-9)


def test_inv_norm_cdf_strictly_increasing():
    us = np.linspace(1e-6, 1 - 1e-6, 10_000)
    z = np.array([inv_norm_cdf(u) for u in us])
    assert np.all(np.diff(z) > 0)


@pytest.mark.parametrize("p,z", list(zip(FIVE_P, FIVE_Z)))
def test_p_to_z_five(p, z):
    assert p_to_z(p) == pytest.approx(z, abs=5e-4)


def test_p_to_z_boundaries():
    assert p_to_z(1.0) == 0.0
    with pytest.raises(DomainError):
        p_to_z(0.0)
    with pytest.raises(DomainError):
        p_to_z(1.0, "greater")


def test_one_sided_signs():
    assert p_to_z(0.025, "greater") == pytest.approx(1.959964, abs=1e-6)
    assert p_to_z(0.025, "less") == pytest.approx(-1.959964, abs=1e-6)


def test_two_sided_round_trip_grid():
    ps = np.linspace(1e-10, 1.0, 10_000)
    back = np.array([z_to_p(p_to_z(p)) for p in ps])
    assert np.max(np.abs(back - ps)) < 1e-8


@given(st.floats(min_value=1e-300, max_value=1.0),
       st.sampled_from(["two.sided", "greater", "less"]))
def test_round_trip(p, side):
    if side != "two.sided" and p == 1.0:
        return
    assert z_to_p(p_to_z(p, side), side) == pytest.approx(p, abs=1e-9)


@given(st.floats(min_value=1e-12, max_value=1.0), st.floats(min_value=1e-12, max_value=1.0))
def test_two_sided_decreasing(a, b):
    if a < b:
        assert p_to_z(a) >= p_to_z(b) >= 0.0


def test_zvalueset_round_trip():
    zs = ZValueSet.from_pvalues(FIVE_P)
    assert np.allclose(zs.to_pvalues().values, FIVE_P, atol=1e-12)


class TestPValueSet:
    def test_na_removed_by_default(self):
        ps = PValueSet.from_values([0.1, None, float("nan"), 0.4], ids=["a", "b", "c", "d"])
        assert ps.m == 2
        assert ps.ids == ("a", "d")
        assert list(ps.values) == [0.1, 0.4]

    def test_na_kept_but_not_counted(self):
        ps = PValueSet.from_values([0.1, None, 0.4], na_rm=False)
        assert len(ps) == 3
        assert ps.m == 2
        assert list(ps.na_mask) == [False, True, False]

    @pytest.mark.parametrize("bad", [-0.01, 1.01])
    def test_out_of_range(self, bad):
        with pytest.raises(ValueError):
            PValueSet([0.2, bad])

    def test_ids_length(self):
        with pytest.raises(ValueError):
            PValueSet([0.2, 0.3], ids=("a",))

    def test_immutable(self):
        ps = PValueSet([0.2, 0.3])
        with pytest.raises(ValueError):
            ps.values[0] = 0.5


class TestRanks:
    @pytest.mark.parametrize("policy", ["first", "last", "average", "min", "max", "random"])
    def test_distinct(self, policy):
        assert list(rank_with_ties([0.3, 0.1, 0.2], policy).ranks) == [3, 1, 2]

    def test_min(self):
        # oracle: group minimum of the occupied positions {1, 2}
        assert list(rank_with_ties([0.1, 0.1, 0.2], "min").ranks) == [1, 1, 3]

    def test_average(self):
        assert list(rank_with_ties([0.1, 0.1, 0.2], "average").ranks) == [1.5, 1.5, 3]

    def test_max_first_last(self):
        p = [0.1, 0.1, 0.2]
        assert list(rank_with_ties(p, "max").ranks) == [2, 2, 3]
        assert list(rank_with_ties(p, "first").ranks) == [1, 2, 3]
        assert list(rank_with_ties(p, "last").ranks) == [2, 1, 3]

    def test_random_seeded(self):
        p = [0.1] * 6 + [0.5]
        a = rank_with_ties(p, "random", seed=11).ranks
        b = rank_with_ties(p, "random", seed=11).ranks
        assert np.array_equal(a, b)
        assert sorted(a[:6]) == [1, 2, 3, 4, 5, 6]
        assert a[6] == 7
        seen = {tuple(rank_with_ties(p, "random", seed=s).ranks) for s in range(20)}
        assert len(seen) > 1

    def test_empty(self):
        with pytest.raises(EmptyInputError):
            rank_with_ties([])

    def test_unknown_policy(self):
        with pytest.raises(ValueError):
            rank_with_ties([0.1], "dense")

    @given(st.lists(st.sampled_from([0.01, 0.2, 0.3, 0.5, 0.9, 1.0]), min_size=1, max_size=40),
           st.sampled_from(["first", "last", "average", "min", "max", "random"]))
    def test_properties(self, vals, policy):
        r = rank_with_ties(vals, policy, seed=3).ranks
        m = len(vals)
        assert math.isclose(r.sum(), m * (m + 1) / 2) or policy in ("min", "max")
        for i in range(m):
            for j in range(m):
                if vals[i] < vals[j]:
                    assert r[i] < r[j]
        assert np.array_equal(r, rank_with_ties(vals, policy, seed=3).ranks)

    @settings(max_examples=50)
    @given(st.lists(st.floats(0, 1), min_size=1, max_size=50, unique=True), st.randoms())
    def test_permutation_equivariance(self, vals, rnd):
        perm = list(range(len(vals)))
        rnd.shuffle(perm)
        r = rank_with_ties(vals, "first").ranks
        rp = rank_with_ties([vals[i] for i in perm], "first").ranks
        assert np.array_equal(rp, r[perm])
        assert sorted(r) == list(range(1, len(vals) + 1))
