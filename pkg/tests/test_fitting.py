import logging

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from temkin_poet.fitting import (
    DataSet,
    FitError,
    LinLin,
    Poly,
    eval_model,
    fit_linlin,
    fit_poly,
    residual_norm,
    trim_extremes,
)

QUARTIC = (0.042012, -0.650385, 3.8148108, -10.0556766, 10.054884)
SEXTIC = (0.046054, -0.49753, 2.90446, -9.505798, 16.482738, -14.075808, 4.691936)
KINKED = (0.018326, 0.001411, 0.049555, 0.864263)


def test_poly_horner_against_numpy():
    x = np.linspace(0, 2, 13)
    np.testing.assert_allclose(Poly(SEXTIC)(x), np.polynomial.polynomial.polyval(x, SEXTIC), rtol=1e-13)


def test_model_validation():
    with pytest.raises(ValueError):
        Poly(())
    with pytest.raises(ValueError):
        Poly(tuple(range(8)))
    with pytest.raises(ValueError):
        DataSet([0.0, 0.0], [1.0, 2.0])
    with pytest.raises(ValueError):
        DataSet([0.0, 1.0], [1.0, np.nan])
    with pytest.raises(ValueError):
        DataSet([0.0, 1.0], [1.0, 2.0], weights=[1.0, 0.0])


def test_eval_axes():
    m = Poly(QUARTIC)
    assert eval_model(m, 0.5) == eval_model(m, 0.25, axis="fraction", E=2.0)
    with pytest.raises(ValueError, match="total energy"):
        eval_model(m, 0.5, axis="fraction")
    with pytest.raises(ValueError, match="axis"):
        eval_model(m, 0.5, axis="hyperangle")


def test_kinked_line_round_trip():
    x = np.linspace(0, 2, 80)
    m = fit_linlin(DataSet(x, LinLin(*KINKED)(x)))
    np.testing.assert_allclose(m.coefficients, KINKED, rtol=1e-8)
    assert m.kink_identified
    assert m.residual < 1e-12


def test_kinked_line_without_kink_is_flagged(caplog):
    x = np.linspace(0, 1, 40)
    with caplog.at_level(logging.WARNING):
        m = fit_linlin(DataSet(x, 0.3 + 0.2 * x))
    assert not m.kink_identified
    assert "not identifiable" in caplog.text
    assert m.residual < 1e-12


@given(seed=st.integers(0, 10_000))
@settings(max_examples=25, deadline=None)
def test_linlin_is_a_local_optimum(seed):
    rng = np.random.default_rng(seed)
    x = np.linspace(0, 1, 60)
    d = rng.uniform(0.2, 0.8)
    y = LinLin(0.1, 0.05, rng.uniform(0.05, 0.3), d)(x) + 1e-3 * rng.normal(size=x.size)
    data = DataSet(x, y)
    m = fit_linlin(data)
    for dd in (-1e-3, 1e-3):
        # best (a, b, c) for a nudged kink is never better
        X = np.column_stack([np.ones_like(x), x, np.abs(x - (m.d + dd))])
        coef = np.linalg.lstsq(X, y, rcond=None)[0]
        alt = LinLin(*coef, m.d + dd)
        assert residual_norm(alt, data) >= m.residual - 1e-12


def test_poly_degree_residuals_monotone():
    rng = np.random.default_rng(5)
    x = np.linspace(0, 1, 80)
    data = DataSet(x, np.exp(x) + 1e-3 * rng.normal(size=80))
    res = [fit_poly(data, k).residual for k in range(7)]
    assert all(b <= a + 1e-15 for a, b in zip(res, res[1:]))


def test_poly_errors():
    x = np.linspace(0, 1, 4)
    with pytest.raises(FitError, match="at least"):
        fit_poly(DataSet(x, x), 5)
    with pytest.raises(FitError, match="degree"):
        fit_poly(DataSet(x, x), 7)
    with pytest.raises(FitError):
        fit_linlin(DataSet(x[:3], x[:3]))


def test_weighted_poly_ignores_low_weight_point():
    x = np.linspace(0, 1, 30)
    y = 1 + 2 * x
    y[10] += 5.0
    w = np.ones(30)
    w[10] = 1e-20
    m = fit_poly(DataSet(x, y, weights=w), 1)
    np.testing.assert_allclose(m.coeffs, (1.0, 2.0), rtol=1e-9)


def _sample(planted=(), interior=None):
    x = np.linspace(0, 1, 80)
    y = Poly(QUARTIC)(x).copy()
    for i in planted:
        y[i] *= 3.0
    if interior is not None:
        y[interior] *= 3.0
    return DataSet(x, y)


def test_trim_removes_planted_end_points():
    data = _sample(planted=(0, 1, 3))
    trimmed = trim_extremes(data, max_drop=8)
    assert trimmed.trimmed == (0, 1, 3)
    m = fit_poly(trimmed, 4)
    np.testing.assert_allclose(m.coeffs, QUARTIC, rtol=1e-8)


def test_trim_never_touches_interior():
    data = _sample(interior=40)
    assert 40 not in trim_extremes(data, max_drop=8).trimmed


def test_trim_clean_data_and_identity():
    clean = _sample()
    assert trim_extremes(clean).trimmed == ()
    noisy = _sample(planted=(0,))
    assert trim_extremes(noisy, max_drop=0) is noisy


def test_trim_cap():
    with pytest.raises(FitError, match="10%"):
        trim_extremes(_sample(), max_drop=9)
    with pytest.raises(ValueError):
        trim_extremes(_sample(), max_drop=-1)


def test_trim_with_custom_fit():
    data = _sample(planted=(79,))
    out = trim_extremes(data, max_drop=2, fit=lambda d: fit_poly(d, 4))
    assert out.trimmed == (79,)


@given(seed=st.integers(0, 2**32 - 1))
@settings(max_examples=40, deadline=None)
def test_trim_finds_planted_points_under_noise(seed):
    rng = np.random.default_rng(seed)
    x = np.linspace(0, 1, 80)
    y = Poly(QUARTIC)(x) + 1e-3 * rng.normal(size=80)
    for i in (0, 1, 3):
        y[i] *= 3.0
    y[40] += 1.0
    trimmed = set(trim_extremes(DataSet(x, y)).trimmed)
    assert {0, 1, 3} <= trimmed
    assert all(i < 8 or i >= 72 for i in trimmed)
