import numpy as np
import pytest
from scipy.interpolate import make_smoothing_spline

from fdrkit.spline import SmoothingSpline

GRID = np.arange(20) * 0.05


def test_trace_matches_df():
    y = np.sin(GRID * 4)
    s = SmoothingSpline(GRID, y, df=3.0)
    assert s.trace == pytest.approx(3.0, abs=1e-6)


def test_matches_scipy_at_same_penalty():
    rng = np.random.default_rng(3)
    y = 0.8 + 0.05 * rng.standard_normal(len(GRID))
    s = SmoothingSpline(GRID, y)
    ref = make_smoothing_spline(GRID, y, lam=s.alpha)
    t = np.linspace(0, 0.95, 77)
    assert np.max(np.abs(s(t) - ref(t))) < 1e-9


def test_linear_data_reproduced_and_extrapolated():
    y = 0.3 + 0.5 * GRID
    s = SmoothingSpline(GRID, y)
    assert s(1.0) == pytest.approx(0.8, abs=1e-8)
    assert s(-0.5) == pytest.approx(0.05, abs=1e-8)
    assert np.allclose(s.fitted, y, atol=1e-10)


def test_extrapolation_is_tangent_line():
    rng = np.random.default_rng(9)
    y = rng.uniform(0, 1, len(GRID))
    s = SmoothingSpline(GRID, y)
    ref = make_smoothing_spline(GRID, y, lam=s.alpha)
    end = GRID[-1]
    assert s(1.0) == pytest.approx(float(ref(end) + ref.derivative()(end) * (1 - end)), abs=1e-9)


@pytest.mark.parametrize("x,y,df", [
    ([0, 1, 2], [0, 1, 2], 2.5),
    ([0, 1, 1, 2], [0, 1, 2, 3], 3.0),
    ([0, 1, 2, 3], [0, 1, 2], 3.0),
    ([0, 1, 2, 3, 4], [0, 1, 2, 3, 4], 5.0),
])
def test_invalid(x, y, df):
    with pytest.raises(ValueError):
        SmoothingSpline(x, y, df=df)
