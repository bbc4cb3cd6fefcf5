import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st
from scipy import stats

from claytonrf.correlation import CorrelationModel, SpatialConfig, chol_factor, corr_matrix
from claytonrf.fields import (
    DependenceParams,
    FieldRealization,
    MarginalSpec,
    child_seed,
    rescale_bounded,
    sim_aux_beta,
    sim_clayton,
    sim_gamma,
    sim_gauss_copula,
    sim_gaussian,
    simulate,
    transform_marginal,
    unscale_bounded,
)

ASKEY = CorrelationModel(b=1.0, delta=0.0, mu=4.0)


def two_sites(rho):
    """Two sites whose Askey correlation (b=1, mu=4) equals ``rho``."""
    d = 1.0 - rho ** 0.25 if rho > 0 else 1.5
    return SpatialConfig(np.array([[0.0, 0.0], [d, 0.0]]))


def test_two_site_helper():
    cfg = two_sites(0.64)
    assert corr_matrix(cfg, ASKEY)[0, 1] == pytest.approx(0.64, abs=1e-12)


def test_gaussian_single_site_is_first_normal():
    cfg = SpatialConfig(np.zeros((1, 2)))
    z = sim_gaussian(cfg, np.ones((1, 1)), 42)
    assert z[0] == np.random.default_rng(42).standard_normal()


def test_gaussian_moments_and_correlation():
    cfg = two_sites(0.9)
    L = chol_factor(corr_matrix(cfg, ASKEY))
    n = 100_000
    z = sim_gaussian(cfg, L, 1, n)
    assert z.shape == (n, 2)
    assert abs(z[:, 0].mean()) < 4 / np.sqrt(n)
    assert np.corrcoef(z.T)[0, 1] == pytest.approx(0.9, abs=0.01)


def test_gamma_moments():
    cfg = two_sites(0.8)
    g2 = sim_gamma(cfg, 2, ASKEY, 3, n_rep=100_000)
    assert g2[:, 0].mean() == pytest.approx(1.0, abs=0.02)
    g1 = sim_gamma(cfg, 1, ASKEY, 4, n_rep=100_000)
    assert g1[:, 0].var() == pytest.approx(0.5, abs=0.02)
    g4 = sim_gamma(cfg, 4, ASKEY, 5, n_rep=100_000)
    # corr of chi-square type fields is rho^2
    assert np.corrcoef(g4.T)[0, 1] == pytest.approx(0.64, abs=0.01)


def test_aux_beta_moments_and_law():
    cfg = two_sites(0.5)
    y = sim_aux_beta(cfg, 2, 2, ASKEY, 6, n_rep=100_000)
    assert y[:, 0].mean() == pytest.approx(0.5, abs=0.01)
    y13 = sim_aux_beta(cfg, 1, 3, ASKEY, 7, n_rep=100_000)
    assert y13[:, 1].var() == pytest.approx(0.0625, abs=0.005)
    assert stats.kstest(y13[:, 0], stats.beta(0.5, 1.5).cdf).pvalue > 0.01


def test_clayton_uniform_margins():
    cfg = two_sites(0.5)
    u = sim_clayton(cfg, 5, ASKEY, 8, n_rep=100_000)
    assert u[:, 0].mean() == pytest.approx(0.5, abs=0.005)
    assert u[:, 0].var() == pytest.approx(1 / 12, abs=0.002)
    assert stats.kstest(u[:, 1], "uniform").pvalue > 0.01


def test_gauss_copula_uniform_margins():
    cfg = two_sites(0.5)
    u = sim_gauss_copula(cfg, ASKEY, 9, n_rep=50_000)
    assert stats.kstest(u[:, 0], "uniform").pvalue > 0.01


def test_simulators_reject_bad_integers():
    cfg = two_sites(0.5)
    with pytest.raises(ValueError):
        sim_gamma(cfg, 0, ASKEY, 1)
    with pytest.raises(ValueError):
        sim_clayton(cfg, 1.5, ASKEY, 1)
    with pytest.raises(ValueError):
        simulate(cfg, MarginalSpec(), DependenceParams(2.5, ASKEY), 1)
    with pytest.raises(ValueError):
        simulate(cfg, MarginalSpec(), DependenceParams(2, ASKEY), 1, copula="frank")


def test_simulation_is_reproducible():
    rng = np.random.default_rng(0)
    cfg = SpatialConfig(rng.random((40, 2)))
    dep = DependenceParams(3, CorrelationModel(b=0.3))
    a = simulate(cfg, MarginalSpec(), dep, 17)
    b = simulate(cfg, MarginalSpec(), dep, 17)
    c = simulate(cfg, MarginalSpec(), dep, 18)
    assert np.array_equal(a.values, b.values)
    assert not np.array_equal(a.values, c.values)
    assert a.seed == 17 and a.params == dep


def test_child_seeds_are_distinct_streams():
    x = np.random.default_rng(child_seed(5, 0)).random()
    y = np.random.default_rng(child_seed(5, 1)).random()
    assert x != y


def test_beta_regression_mean():
    spec = MarginalSpec("beta_regression", beta_coeffs=(0.2, -0.2), precision=1.5)
    assert spec.mean_param([[1.0, 0.5]])[0] == pytest.approx(0.525, abs=1e-3)
    with pytest.raises(ValueError):
        spec.mean_param([[1.0, 0.5, 0.1]])


def test_transform_to_beta_margin():
    u = np.random.default_rng(1).random(100_000)
    out = transform_marginal(u, MarginalSpec("beta", xi=2.0, delta=3.0))
    assert stats.kstest(out.values, stats.beta(2, 3).cdf).pvalue > 0.01


def test_transform_regression_needs_covariates():
    spec = MarginalSpec("beta_regression", beta_coeffs=(0.2,), precision=2.0)
    with pytest.raises(ValueError):
        transform_marginal(np.array([0.5]), spec)


def test_marginal_moments_and_validation():
    m, v = MarginalSpec("beta", xi=2.0, delta=3.0).moments()
    assert m == pytest.approx(0.4)
    assert v == pytest.approx(6 / (25 * 6))
    assert MarginalSpec().moments() == pytest.approx((0.5, 1 / 12))
    with pytest.raises(ValueError):
        MarginalSpec("beta", xi=-1.0)
    with pytest.raises(ValueError):
        MarginalSpec("beta_regression")
    with pytest.raises(ValueError):
        MarginalSpec("lognormal")


@settings(max_examples=50, deadline=None)
@given(u=st.floats(1e-6, 1 - 1e-6), xi=st.floats(0.3, 10), d=st.floats(0.3, 10))
def test_beta_cdf_inverts_ppf(u, xi, d):
    spec = MarginalSpec("beta", xi=xi, delta=d)
    y = float(spec.ppf(u))
    # quantiles within a few ulps of 0 or 1 cannot round-trip in double precision
    assume(1e-12 < y < 1 - 1e-12)
    assert float(spec.cdf(y)) == pytest.approx(u, abs=1e-9)


@pytest.mark.parametrize("u", [0.9, 0.999, 1 - 1e-6])
def test_beta_ppf_upper_tail_closed_form(u):
    # Beta(1, d) has cdf 1 - (1 - y)^d, so 1 - y = (1 - u)^(1/d)
    spec = MarginalSpec("beta", xi=1.0, delta=0.5)
    assert 1 - float(spec.ppf(u)) == pytest.approx((1 - u) ** 2, rel=1e-6)


def test_rescale_round_trip():
    assert rescale_bounded(0.0, -1.0, 1.0) == 0.5
    y = np.array([-0.9, 0.0, 0.3])
    np.testing.assert_allclose(unscale_bounded(rescale_bounded(y, -1, 1), -1, 1), y)
    with pytest.raises(ValueError):
        rescale_bounded(0.5, 1.0, 1.0)


def test_field_realization_coerces_values():
    assert FieldRealization([1, 2]).values.dtype == float


def test_transform_preserves_ranks_exactly():
    cfg = two_sites(0.5)
    u = sim_clayton(cfg, 2, ASKEY, 12, n_rep=2000)
    s = transform_marginal(u, MarginalSpec("beta", xi=0.7, delta=4.0)).values
    assert stats.spearmanr(u[:, 0], u[:, 1])[0] == stats.spearmanr(s[:, 0], s[:, 1])[0]
