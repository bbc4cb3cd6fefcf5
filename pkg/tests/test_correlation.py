import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from claytonrf.correlation import (
    CorrelationModel,
    FactorizationError,
    SpatialConfig,
    chol_factor,
    corr_matrix,
    corr_with_nugget,
    exp_corr,
    gw_corr,
)


def gw_integral_oracle(r, delta, mu):
    """Generalized Wendland as its defining integral (normalised at r=0)."""
    # u = x + t^2 removes the (u^2 - x^2)^(delta-1) endpoint singularity
    with mp.workdps(30):
        def raw(x):
            x = mp.mpf(x)
            f = lambda t: (2 * t ** (2 * delta - 1) * (x + t * t) * (2 * x + t * t) ** (delta - 1)
                           * (1 - x - t * t) ** mu)
            return mp.quad(f, [0, mp.sqrt(1 - x)])
        return float(mp.re(raw(r) / raw(0)))


def test_askey_taper_value():
    m = CorrelationModel(b=0.15, delta=0.0, mu=4.0)
    assert gw_corr(0.075, m) == pytest.approx(0.0625, abs=1e-15)


def test_gw_unit_at_zero_and_zero_past_support():
    m = CorrelationModel(b=0.2, delta=1.5, mu=4.0)
    assert gw_corr(0.0, m) == 1.0
    assert gw_corr(0.2, m) == 0.0
    assert gw_corr(0.3, m) == 0.0


@pytest.mark.parametrize("delta", [0.5, 1.0, 1.5, 2.5])
def test_gw_matches_integral_definition(delta):
    mu = 0.5 * 3 + delta + 0.5
    m = CorrelationModel(b=1.0, delta=delta, mu=mu)
    for r in (0.05, 0.3, 0.7, 0.95):
        assert gw_corr(r, m) == pytest.approx(gw_integral_oracle(r, delta, mu), rel=1e-12, abs=1e-15)


def test_gw_delta_one_closed_form():
    # delta=1: (1-r)^(mu+1) (1 + (mu+1) r)
    mu = 4.0
    m = CorrelationModel(b=1.0, delta=1.0, mu=mu)
    r = np.linspace(0.0, 0.99, 12)
    np.testing.assert_allclose(gw_corr(r, m), (1 - r) ** (mu + 1) * (1 + (mu + 1) * r),
                               rtol=1e-12, atol=1e-15)


def test_gw_support_edge_is_continuous():
    m = CorrelationModel(b=0.2, delta=1.5, mu=4.0)
    assert gw_corr(0.2 * (1 - 1e-9), m) < 1e-20


@settings(max_examples=40, deadline=None)
@given(delta=st.floats(0.0, 3.0), extra=st.floats(0.0, 3.0),
       r1=st.floats(0.0, 1.2), r2=st.floats(0.0, 1.2))
def test_gw_monotone_and_bounded(delta, extra, r1, r2):
    m = CorrelationModel(b=1.0, delta=delta, mu=1.5 + delta + extra)
    lo, hi = sorted((r1, r2))
    a, b = gw_corr(lo, m), gw_corr(hi, m)
    assert 0.0 <= b <= a + 1e-12 <= 1.0 + 1e-12


def test_exponential():
    m = CorrelationModel("exponential", b=0.3)
    assert exp_corr(0.3, m) == pytest.approx(math.exp(-1))


def test_nugget_scaling():
    assert corr_with_nugget(0.5, 0.2, False) == pytest.approx(0.4)
    assert corr_with_nugget(0.5, 0.2, True) == pytest.approx(0.6)
    m = CorrelationModel(b=0.15, mu=4.0, tau2=0.2)
    assert m(0.075) == pytest.approx(0.05)
    with pytest.raises(ValueError):
        corr_with_nugget(0.5, 1.5, False)


def test_model_validation():
    with pytest.raises(ValueError, match="mu"):
        CorrelationModel(delta=1.0, mu=2.0)
    with pytest.raises(ValueError):
        CorrelationModel(b=0.0)
    with pytest.raises(ValueError):
        CorrelationModel(family="matern")
    with pytest.raises(ValueError):
        gw_corr(-0.1, CorrelationModel())
    assert CorrelationModel(mu=5.0).mu_gw == 5.0
    assert CorrelationModel().replace(b=0.4).b == 0.4


def test_spatial_config_rejects_duplicates():
    with pytest.raises(ValueError, match="duplicate"):
        SpatialConfig(np.array([[0.0, 0.0], [1.0, 1.0], [0.0, 0.0]]))
    with pytest.raises(ValueError):
        SpatialConfig(np.zeros((1, 2)), covariates=np.ones((2, 1)))


def test_corr_matrix_structure():
    rng = np.random.default_rng(3)
    cfg = SpatialConfig(rng.random((30, 2)))
    r = corr_matrix(cfg, CorrelationModel(b=0.4, tau2=0.1))
    assert np.array_equal(r, r.T)
    assert np.all(np.diag(r) == 1.0)
    assert corr_matrix(SpatialConfig(np.zeros((1, 2))), CorrelationModel()).shape == (1, 1)


def test_chol_2x2():
    L = chol_factor(np.array([[1.0, 0.5], [0.5, 1.0]]))
    assert L[1, 0] == pytest.approx(0.5)
    assert L[1, 1] == pytest.approx(math.sqrt(0.75))
    assert L[0, 1] == 0.0


def test_chol_reconstructs_gw_matrix():
    rng = np.random.default_rng(11)
    cfg = SpatialConfig(rng.random((50, 2)))
    r = corr_matrix(cfg, CorrelationModel(b=0.5, delta=1.0, mu=4.0))
    L = chol_factor(r)
    assert np.max(np.abs(L @ L.T - r)) < 1e-8


def test_chol_jitter_rescues_semidefinite():
    v = np.array([1.0, 1.0, 1.0]) / math.sqrt(3)
    a = np.outer(v, v) * 3.0  # rank one, unit diagonal
    L = chol_factor(a)
    assert np.max(np.abs(L @ L.T - a)) < 1e-5


def test_chol_gives_up_on_indefinite():
    with pytest.raises(FactorizationError, match="jitter"):
        chol_factor(np.array([[1.0, 2.0], [2.0, 1.0]]))
