import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from claytonrf.correlation import CorrelationModel, SpatialConfig
from claytonrf.fields import DependenceParams, FieldRealization, MarginalSpec, simulate
from claytonrf.inference import (
    FitConfig,
    LikelihoodError,
    PairSet,
    _Objective,
    bootstrap_godambe,
    build_model,
    fit,
    nn_pairs,
    numerical_gradient,
    numerical_hessian,
    plic,
    wpl,
)


@pytest.fixture(scope="module")
def regression_data():
    rng = np.random.default_rng(5)
    n = 150
    cov = np.column_stack([np.ones(n), rng.random(n)])
    cfg = SpatialConfig(rng.random((n, 2)), cov)
    marg = MarginalSpec("beta_regression", beta_coeffs=(0.2, -0.2), precision=1.5)
    dep = DependenceParams(2, CorrelationModel(b=0.2, mu=4.0))
    return cfg, simulate(cfg, marg, dep, 3)


@pytest.fixture(scope="module")
def regression_fit(regression_data):
    cfg, data = regression_data
    return fit(data, cfg, FitConfig(nu_grid=(2,)))


# -------------------------------------------------------------------- pairs


def test_pairs_two_sites():
    p = nn_pairs(SpatialConfig(np.array([[0.0, 0.0], [1.0, 0.0]])), 1)
    assert p.pairs.tolist() == [[1, 0], [0, 1]]


def test_pairs_collinear():
    cfg = SpatialConfig(np.array([[0.0], [1.0], [3.0]]))
    assert nn_pairs(cfg, 1).pairs.tolist() == [[1, 0], [0, 1], [1, 2]]
    assert nn_pairs(cfg, 2).pairs.tolist() == [[1, 0], [2, 0], [0, 1], [2, 1], [1, 2], [0, 2]]


def test_pairs_count_and_ties():
    cfg = SpatialConfig(np.random.default_rng(0).random((100, 2)))
    p = nn_pairs(cfg, 2)
    assert len(p) == 200 and p.m == 2
    # two sites equidistant from the middle one: the lower index wins
    tie = SpatialConfig(np.array([[1.0, 0.0], [0.0, 0.0], [-1.0, 0.0]]))
    assert nn_pairs(tie, 1).pairs[1].tolist() == [0, 1]


def test_pairs_validation():
    cfg = SpatialConfig(np.array([[0.0, 0.0], [1.0, 0.0]]))
    with pytest.raises(ValueError):
        nn_pairs(cfg, 2)
    with pytest.raises(ValueError):
        nn_pairs(cfg, 0)
    with pytest.raises(ValueError):
        PairSet(np.array([[1, 1]]), 1)


# -------------------------------------------------------------- objective


def test_wpl_is_zero_under_independence():
    rng = np.random.default_rng(1)
    cfg = SpatialConfig(rng.random((40, 2)) * 100)
    data = FieldRealization(rng.random(40))
    dep = DependenceParams(3, CorrelationModel(b=0.01))
    assert wpl(data, cfg, dep, nn_pairs(cfg, 2)) == 0.0


def test_wpl_rejects_values_on_the_boundary():
    cfg = SpatialConfig(np.array([[0.0, 0.0], [0.1, 0.0]]))
    data = FieldRealization(np.array([0.3, 1.0]), MarginalSpec("beta", xi=2.0, delta=3.0))
    with pytest.raises(LikelihoodError, match="pair"):
        wpl(data, cfg, DependenceParams(2, CorrelationModel(b=1.0)), nn_pairs(cfg, 1))


def test_wpl_unknown_copula():
    cfg = SpatialConfig(np.array([[0.0, 0.0], [0.1, 0.0]]))
    with pytest.raises(ValueError):
        wpl(FieldRealization([0.2, 0.4]), cfg, DependenceParams(), nn_pairs(cfg, 1), "frank")


@settings(max_examples=15, deadline=None)
@given(seed=st.integers(0, 10_000))
def test_wpl_permutation_invariant(seed):
    rng = np.random.default_rng(seed)
    cfg = SpatialConfig(rng.random((30, 2)))
    data = FieldRealization(rng.uniform(0.05, 0.95, 30))
    dep = DependenceParams(3, CorrelationModel(b=0.4))
    base = wpl(data, cfg, dep, nn_pairs(cfg, 2))
    perm = rng.permutation(30)
    cfg_p = cfg.permuted(perm)
    data_p = FieldRealization(data.values[perm])
    assert wpl(data_p, cfg_p, dep, nn_pairs(cfg_p, 2)) == pytest.approx(base, rel=1e-12)


def test_plic_with_matching_matrices():
    h = np.diag([2.0, 3.0, 0.5])
    assert plic(-10.0, h, np.linalg.inv(h)) == pytest.approx(20.0 + 6.0)


def test_plic_rejects_bad_matrices():
    with pytest.raises(ValueError):
        plic(-1.0, np.eye(2), np.eye(3))
    with pytest.raises(np.linalg.LinAlgError):
        plic(-1.0, np.eye(2), np.array([[1.0, 1.0], [1.0, 1.0]]))
    with pytest.raises(np.linalg.LinAlgError):
        plic(-1.0, np.array([[np.nan, 0.0], [0.0, 1.0]]), np.eye(2))


def test_numerical_derivatives_on_quadratic():
    a = np.array([[3.0, 1.0], [1.0, 2.0]])
    f = lambda x: 0.5 * x @ a @ x
    x = np.array([0.3, -0.7])
    np.testing.assert_allclose(numerical_gradient(f, x), a @ x, atol=1e-8)
    np.testing.assert_allclose(numerical_hessian(f, x), a, atol=1e-5)


# -------------------------------------------------------------- parameters


def test_layout_round_trip():
    fc = FitConfig(marginal="beta_regression", fit_nugget=True)
    lay = fc.layout(n_cov=2, free_nu=True)
    theta = {"beta0": 0.2, "beta1": -0.4, "precision": 1.5, "b": 0.2, "tau2": 0.1, "nu": 3.0}
    back = lay.to_natural(lay.to_internal(theta))
    for k, v in theta.items():
        assert back[k] == pytest.approx(v, rel=1e-12)


def test_build_model():
    marg, dep = build_model({"xi": 2.0, "delta": 3.0, "b": 0.3}, FitConfig(marginal="beta"), 4)
    assert (marg.xi, marg.delta) == (2.0, 3.0)
    assert dep.nu == 4 and dep.corr.b == 0.3


def test_fit_config_validation():
    with pytest.raises(ValueError):
        FitConfig(nu_grid=())
    with pytest.raises(ValueError):
        FitConfig(nu_grid=(0,))
    with pytest.raises(ValueError):
        FitConfig(nu_mode="free")


# ---------------------------------------------------------------------- fit


def test_fit_recovers_sensible_values(regression_fit):
    th = regression_fit.theta_hat
    assert regression_fit.converged
    assert set(th) == {"beta0", "beta1", "precision", "b"}
    assert abs(th["beta0"] - 0.2) < 0.3 and abs(th["beta1"] + 0.2) < 0.4
    assert 0.05 < th["b"] < 0.6
    assert regression_fit.n_pairs == 300


def test_fit_gradient_vanishes_at_optimum(regression_data, regression_fit):
    cfg, data = regression_data
    fc = regression_fit.fit_cfg
    obj = _Objective(data, cfg, nn_pairs(cfg, 2), fc, fc.layout(2), 2)
    g = numerical_gradient(obj.value, regression_fit.x_hat, 1e-6)
    assert np.max(np.abs(g)) < 1e-4


def test_fit_range_is_equivariant_under_scaling(regression_data, regression_fit):
    cfg, data = regression_data
    scaled = SpatialConfig(cfg.coords * 3.0, cfg.covariates)
    res = fit(data, scaled, FitConfig(nu_grid=(2,)))
    assert res.theta_hat["b"] == pytest.approx(3.0 * regression_fit.theta_hat["b"], rel=1e-3)
    assert res.wpl_max == pytest.approx(regression_fit.wpl_max, abs=1e-5)


def test_fit_result_serialises(regression_fit):
    out = json.loads(json.dumps(regression_fit.to_dict()))
    assert out["nu_selected"] == 2
    assert "theta_hat" in out


def test_fit_profiles_nu_grid():
    rng = np.random.default_rng(8)
    cfg = SpatialConfig(rng.random((80, 2)))
    data = simulate(cfg, MarginalSpec(), DependenceParams(1, CorrelationModel(b=0.4)), 2)
    res = fit(data, cfg, FitConfig(marginal="uniform", nu_grid=(1, 2, 4)))
    assert set(res.profile) == {1, 2, 4}
    assert res.wpl_max == max(v["wpl"] for v in res.profile.values())


def test_fit_gaussian_copula_uniform():
    rng = np.random.default_rng(9)
    cfg = SpatialConfig(rng.random((80, 2)))
    data = simulate(cfg, MarginalSpec(), DependenceParams(2, CorrelationModel(b=0.4)), 4,
                    copula="gaussian")
    res = fit(data, cfg, FitConfig(marginal="uniform", copula="gaussian"))
    assert res.copula == "gaussian" and 0.1 < res.theta_hat["b"] < 1.5


def test_bootstrap_needs_enough_replicates(regression_data, regression_fit):
    cfg, _ = regression_data
    with pytest.raises(ValueError):
        bootstrap_godambe(regression_fit, cfg, B=10)


def test_bootstrap_plic_and_standard_errors():
    rng = np.random.default_rng(10)
    cfg = SpatialConfig(rng.random((60, 2)))
    data = simulate(cfg, MarginalSpec(), DependenceParams(2, CorrelationModel(b=0.5)), 6)
    res = fit(data, cfg, FitConfig(marginal="uniform", bootstrap=30, xatol=1e-4, fatol=1e-5))
    assert res.godambe_inv.shape == (1, 1)
    assert res.std_errors["b"] > 0
    assert np.isfinite(res.plic) and res.plic > -2 * res.wpl_max
