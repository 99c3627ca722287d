"""Build exit criteria; the terminal summary prints one PASS/FAIL line each."""

import time
from decimal import Decimal

import numpy as np
import pytest

from fdrkit.adjust import (bh_selection, compute_bh, compute_bonferroni, compute_by,
                           compute_hochberg, compute_holm, compute_sidak, harmonic_sum,
                           p_fdr)
from fdrkit.cli import main, read_input
from fdrkit.core import p_to_z
from fdrkit.pi0 import Pi0Spec
from fdrkit.report import ResultsTable
from fdrkit.sim import AlternativeSpec, compare_pi0_estimators
from fdrkit.twogroup import lower_bound_fdr

from conftest import FIVE_ADJ, FIVE_FDR, FIVE_LB, FIVE_P, FIVE_Z, random_pvectors
from oracles import bh_largest_k, naive_step_down, naive_step_up

TOL = Decimal("0.0005")


def within(values, printed):
    # decimal arithmetic on the shortest repr, so 0.1225 vs 0.122 counts as within
    return all(abs(Decimal(repr(float(v))) - Decimal(repr(p))) <= TOL for v, p in zip(values, printed))


@pytest.mark.acceptance("five-feature-golden")
def test_five_feature_golden():
    start = time.perf_counter()
    res = p_fdr(FIVE_P, "BH", 0.05)
    table = ResultsTable.from_result(res)
    elapsed = time.perf_counter() - start
    assert within(table.z, FIVE_Z)
    assert within(table.adjusted_p, FIVE_ADJ)
    assert within(table.fdr, FIVE_FDR)
    assert within(table.lower_bound, FIVE_LB)
    assert res.pi0 == 1.0
    assert elapsed < 1.0


@pytest.mark.acceptance("control-vs-estimation")
def test_control_vs_estimation():
    res = p_fdr(FIVE_P, "BH", 0.07)
    assert set(np.flatnonzero(res.reject) + 1) == {1, 2, 3, 4}
    assert set(np.flatnonzero(res.fdrs < 0.07) + 1) == {1, 4}


@pytest.mark.acceptance("envelope-oracle")
def test_envelope_oracle():
    start = time.perf_counter()
    gammas = np.round(np.arange(1, 21) * 0.01, 2)
    for p in random_pvectors(500, seed=2024, max_m=200, ties=True):
        m = len(p)
        # constant shared; its accuracy is pinned separately against exact rationals
        c = m * harmonic_sum(m)
        assert np.array_equal(compute_bh(p).adjusted_pvalues, naive_step_up(p, lambda j: m / j))
        assert np.array_equal(compute_by(p).adjusted_pvalues, naive_step_up(p, lambda j: c / j))
        assert np.array_equal(compute_holm(p).adjusted_pvalues, naive_step_down(p, lambda j: m + 1 - j))
        assert np.array_equal(compute_hochberg(p).adjusted_pvalues, naive_step_up(p, lambda j: m + 1 - j))
        for g in gammas:
            assert set(np.flatnonzero(bh_selection(p, g))) == bh_largest_k(list(p), g)
    assert time.perf_counter() - start < 30


@pytest.mark.acceptance("dominance-capping")
def test_dominance_and_capping():
    start = time.perf_counter()
    for p in random_pvectors(1000, seed=77, max_m=200, ties=True):
        bh, by = compute_bh(p), compute_by(p)
        bon, sid = compute_bonferroni(p), compute_sidak(p)
        holm, hoch = compute_holm(p), compute_hochberg(p)
        a = {k: o.adjusted_pvalues for k, o in
             dict(bh=bh, by=by, bon=bon, sid=sid, holm=holm, hoch=hoch).items()}
        assert np.all(p <= a["bh"]) and np.all(a["bh"] <= a["by"]) and np.all(a["bh"] <= a["bon"])
        assert np.all(a["sid"] <= a["bon"]) and np.all(a["hoch"] <= a["holm"])
        order = np.argsort(p, kind="stable")
        for out in (bh, by, bon, sid, holm, hoch):
            assert np.all(out.adjusted_pvalues <= 1) and np.all(out.fdrs <= 1)
            assert np.all(np.diff(out.adjusted_pvalues[order]) >= 0)
    assert time.perf_counter() - start < 30


@pytest.mark.acceptance("lower-bound")
def test_lower_bound():
    lb = [lower_bound_fdr(p_to_z(p)) for p in FIVE_P]
    assert within(lb, FIVE_LB)
    for p, v in zip(FIVE_P, lb):
        z = p_to_z(p)
        assert v == pytest.approx(1 / (1 + np.exp(z * z / 2)), rel=1e-14)
    grid = np.linspace(0, 10, 1000)
    vals = np.array([lower_bound_fdr(z) for z in grid])
    assert np.all(np.diff(vals) < 0)
    assert lower_bound_fdr(0.0) == 0.5


@pytest.fixture(scope="module")
def benchmark():
    start = time.perf_counter()
    table = compare_pi0_estimators(100, [0.5, 0.8, 1.0], [AlternativeSpec("uniform_low", max=0.01)],
                                   [Pi0Spec("last_hist"), Pi0Spec("storey")], R=200, master_seed=12345)
    return table, time.perf_counter() - start


@pytest.mark.acceptance("pi0-benchmark")
@pytest.mark.parametrize("estimator", ["last_hist", "storey"])
@pytest.mark.parametrize("pi0", [0.5, 0.8, 1.0])
def test_pi0_benchmark(benchmark, estimator, pi0):
    table, elapsed = benchmark
    row = table.cell(estimator, pi0)
    print(f"{estimator} pi0={pi0}: mean={row.mean:.4f} mse={row.mse:.4f}")
    assert elapsed < 60
    assert row.failures == 0
    assert abs(row.mean - pi0) <= 0.1


@pytest.mark.acceptance("determinism")
def test_determinism(tmp_path):
    outs = []
    for workers in ("1", "1", "4"):
        out = tmp_path / f"sim{len(outs)}.csv"
        code = main(["simulate", "--m", "100", "--pi0-grid", "0.5,0.8,1.0", "--alt", "uniform_low:0.01",
                     "--alt", "normal_shift:2:1", "-R", "20", "--seed", "99", "--workers", workers,
                     "-o", str(out)])
        assert code == 0
        outs.append(out.read_bytes())
    assert outs[0] == outs[1] == outs[2]


@pytest.mark.acceptance("cli-roundtrip")
def test_cli_roundtrip(tmp_path):
    src = tmp_path / "in.csv"
    rng = np.random.default_rng(5)
    p = np.concatenate((rng.random(40), rng.random(10) * 1e-4, [0.0, 1.0]))
    src.write_text("id,p\n" + "".join(f"g{i},{float(v)!r}\n" for i, v in enumerate(p)))
    out = tmp_path / "out.csv"
    assert main(["adjust", str(src), "--method", "BY", "--estim-method", "storey", "-o", str(out)]) == 0
    args = dict(method="BY", pi0_spec=Pi0Spec("storey"))
    expect = ResultsTable.from_result(p_fdr(read_input(str(src))[0], **args))
    assert ResultsTable.from_csv(out.read_text()).equals(expect)

    bad = tmp_path / "bad.csv"
    bad.write_text("id,p\na,0.1\nb,oops\n")
    assert main(["adjust", str(bad)]) == 2
    empty = tmp_path / "empty.csv"
    empty.write_text("id,p\na,NA\n")
    assert main(["adjust", str(empty)]) == 3
