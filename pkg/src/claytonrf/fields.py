"""Exact (Cholesky) simulation of the Gaussian -> Gamma -> beta -> Clayton hierarchy.

All simulators take an integer ``seed``.  Independent Gaussian copies needed
by one field come from child streams of ``numpy.random.SeedSequence`` keyed
by ``(seed, stream index)``, so every realization is reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import betaln, expit, ndtr, ndtri

from .correlation import CorrelationModel, SpatialConfig, chol_factor, corr_matrix
from .specfun import beta_quantile, reg_inc_beta

MARGINALS = ("uniform", "beta", "beta_regression", "gaussian")
U_CLAMP = 1e-15


@dataclass(frozen=True)
class MarginalSpec:
    """Marginal law of the observed field.

    ``beta`` uses shapes (xi, delta); ``beta_regression`` uses site means
    mu(s) = 1/(1+exp(-X(s) beta)) with shapes (mu*precision, (1-mu)*precision).
    ``gaussian`` (standard normal) is only used to draw copula contours.
    """

    family: str = "uniform"
    xi: float = 1.0
    delta: float = 1.0
    beta_coeffs: tuple = ()
    precision: float = 1.0

    def __post_init__(self):
        if self.family not in MARGINALS:
            raise ValueError(f"unknown marginal family {self.family!r}")
        object.__setattr__(self, "beta_coeffs", tuple(float(b) for b in self.beta_coeffs))
        if self.family == "beta" and not (self.xi > 0 and self.delta > 0):
            raise ValueError("beta shapes must be positive")
        if self.family == "beta_regression":
            if not self.beta_coeffs:
                raise ValueError("beta_regression needs regression coefficients")
            if not self.precision > 0:
                raise ValueError("precision must be positive")

    def mean_param(self, covariates) -> np.ndarray:
        """Logistic-link mean mu(s) for each covariate row."""
        x = np.atleast_2d(np.asarray(covariates, dtype=float))
        if x.shape[1] != len(self.beta_coeffs):
            raise ValueError(
                f"{x.shape[1]} covariates but {len(self.beta_coeffs)} coefficients"
            )
        return expit(x @ np.asarray(self.beta_coeffs))

    def shapes(self, covariates=None):
        """Beta shape parameters (scalars, or per-site arrays for regression)."""
        if self.family == "beta":
            return self.xi, self.delta
        if self.family == "beta_regression":
            if covariates is None:
                raise ValueError("beta_regression marginal requires covariates")
            mu = self.mean_param(covariates)
            return mu * self.precision, (1.0 - mu) * self.precision
        if self.family == "uniform":
            return 1.0, 1.0
        raise ValueError("gaussian marginal has no beta shapes")

    def cdf(self, s, covariates=None):
        s = np.asarray(s, dtype=float)
        if self.family == "gaussian":
            return ndtr(s)
        if self.family == "uniform":
            return np.clip(s, 0.0, 1.0)
        a, b = self.shapes(covariates)
        return reg_inc_beta(np.clip(s, 0.0, 1.0), a, b)

    def logpdf(self, s, covariates=None):
        s = np.asarray(s, dtype=float)
        if self.family == "gaussian":
            return -0.5 * s * s - 0.5 * np.log(2 * np.pi)
        if self.family == "uniform":
            return np.where((s > 0) & (s < 1), 0.0, -np.inf)
        a, b = self.shapes(covariates)
        with np.errstate(divide="ignore", invalid="ignore"):
            return (a - 1) * np.log(s) + (b - 1) * np.log1p(-s) - betaln(a, b)

    def ppf(self, u, covariates=None):
        u = np.clip(np.asarray(u, dtype=float), U_CLAMP, 1 - U_CLAMP)
        if self.family == "gaussian":
            return ndtri(u)
        if self.family == "uniform":
            return u
        a, b = self.shapes(covariates)
        return beta_quantile(u, a, b)

    def moments(self, covariates=None):
        """(mean, variance) of the marginal."""
        if self.family == "gaussian":
            return 0.0, 1.0
        a, b = self.shapes(covariates)
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        m = a / (a + b)
        v = a * b / ((a + b) ** 2 * (a + b + 1))
        return (float(m), float(v)) if m.ndim == 0 else (m, v)


@dataclass(frozen=True)
class DependenceParams:
    """Asymmetry parameter nu and the underlying correlation model."""

    nu: float = 2
    corr: CorrelationModel = field(default_factory=CorrelationModel)

    def __post_init__(self):
        if not self.nu > 0:
            raise ValueError(f"nu must be positive, got {self.nu}")

    @property
    def simulable(self) -> bool:
        return float(self.nu).is_integer()


@dataclass
class FieldRealization:
    values: np.ndarray
    marginal: MarginalSpec = field(default_factory=MarginalSpec)
    params: DependenceParams | None = None
    seed: int | None = None

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)


def _check_positive_int(name, v):
    if int(v) != v or v < 1:
        raise ValueError(f"{name} must be a positive integer, got {v}")
    return int(v)


def child_seed(seed: int, stream: int) -> np.random.SeedSequence:
    return np.random.SeedSequence(int(seed), spawn_key=(int(stream),))


def _factor(cfg, corr, L):
    if L is not None:
        return L
    return chol_factor(corr_matrix(cfg, corr))


def sim_gaussian(cfg: SpatialConfig, L, seed, size=()):
    """Standard Gaussian field draws L @ eps, shape ``(*size, n)``."""
    rng = np.random.default_rng(seed)
    size = (size,) if np.isscalar(size) else tuple(size)
    eps = rng.standard_normal(size + (cfg.n,))
    return eps @ np.asarray(L).T


def sim_gamma(cfg: SpatialConfig, psi: int, corr: CorrelationModel, seed,
              n_rep: int | None = None, L=None):
    """Gamma(psi/2, 1) field as half the sum of psi squared Gaussian copies."""
    psi = _check_positive_int("psi", psi)
    L = _factor(cfg, corr, L)
    size = (psi,) if n_rep is None else (n_rep, psi)
    z = sim_gaussian(cfg, L, seed, size)
    return 0.5 * np.sum(z * z, axis=-2)


def sim_aux_beta(cfg: SpatialConfig, nu: int, alpha: int, corr: CorrelationModel,
                 seed, n_rep: int | None = None, L=None):
    """Beta(nu/2, alpha/2) field H/(H+N) from two independent Gamma fields."""
    nu = _check_positive_int("nu", nu)
    alpha = _check_positive_int("alpha", alpha)
    L = _factor(cfg, corr, L)
    h = sim_gamma(cfg, nu, corr, child_seed(seed, 0), n_rep, L)
    g = sim_gamma(cfg, alpha, corr, child_seed(seed, 1), n_rep, L)
    return h / (h + g)


def sim_clayton(cfg: SpatialConfig, nu: int, corr: CorrelationModel, seed,
                n_rep: int | None = None, L=None):
    """Uniform-marginal Clayton field Y_{nu,2} ** (nu/2)."""
    nu = _check_positive_int("nu", nu)
    y = sim_aux_beta(cfg, nu, 2, corr, seed, n_rep, L)
    return y ** (nu / 2.0)


def sim_gauss_copula(cfg: SpatialConfig, corr: CorrelationModel, seed,
                     n_rep: int | None = None, L=None):
    """Uniform-marginal Gaussian copula field Phi(Z)."""
    L = _factor(cfg, corr, L)
    size = () if n_rep is None else (n_rep,)
    return ndtr(sim_gaussian(cfg, L, seed, size))


def transform_marginal(u, spec: MarginalSpec, cfg: SpatialConfig | None = None) -> FieldRealization:
    """Pointwise quantile transform of a uniform field to ``spec``."""
    if isinstance(u, FieldRealization):
        vals, params, seed = u.values, u.params, u.seed
    else:
        vals, params, seed = np.asarray(u, dtype=float), None, None
    cov = None if cfg is None else cfg.covariates
    if spec.family == "beta_regression" and cov is None:
        raise ValueError("beta_regression transform needs covariates in the SpatialConfig")
    if spec.family == "uniform":
        out = vals.copy()
    else:
        out = spec.ppf(vals, cov)
    return FieldRealization(out, spec, params, seed)


def simulate(cfg: SpatialConfig, marginal: MarginalSpec, dep: DependenceParams,
             seed: int, copula: str = "clayton", L=None) -> FieldRealization:
    """One realization of the observed field with the requested copula."""
    if copula == "clayton":
        if not dep.simulable:
            raise ValueError(f"Clayton field simulation needs integer nu, got {dep.nu}")
        u = sim_clayton(cfg, int(dep.nu), dep.corr, seed, L=L)
    elif copula == "gaussian":
        u = sim_gauss_copula(cfg, dep.corr, seed, L=L)
    else:
        raise ValueError(f"unknown copula {copula!r}")
    real = transform_marginal(FieldRealization(u, MarginalSpec(), dep, seed), marginal, cfg)
    return real


def rescale_bounded(y, a1: float, a2: float):
    """Map data on (a1, a2) to (0, 1)."""
    if not a2 > a1:
        raise ValueError(f"need a2 > a1, got ({a1}, {a2})")
    out = (np.asarray(y, dtype=float) - a1) / (a2 - a1)
    return float(out) if out.ndim == 0 else out


def unscale_bounded(y, a1: float, a2: float):
    """Inverse of :func:`rescale_bounded`."""
    if not a2 > a1:
        raise ValueError(f"need a2 > a1, got ({a1}, {a2})")
    out = a1 + (a2 - a1) * np.asarray(y, dtype=float)
    return float(out) if out.ndim == 0 else out
