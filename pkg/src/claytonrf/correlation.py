"""Underlying correlation models, correlation matrices and Cholesky factors."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import lapack
from scipy.spatial import cKDTree
from scipy.spatial.distance import pdist, squareform
from scipy.special import gammaln, hyp2f1

FAMILIES = ("generalized_wendland", "exponential")


class FactorizationError(np.linalg.LinAlgError):
    """Cholesky failed even after the largest diagonal jitter."""


@dataclass(frozen=True)
class CorrelationModel:
    """Isotropic correlation model of the underlying Gaussian field.

    Parameters
    ----------
    family : {"generalized_wendland", "exponential"}
    b : float
        Compact support (Wendland) or scale (exponential), in coordinate units.
    delta : float
        Generalized Wendland smoothness (0 gives the Askey taper).
    mu : float
        Generalized Wendland shape.
    tau2 : float
        Nugget share in [0, 1].
    dim : int
        Spatial dimension used for the validity condition on ``mu``.
    """

    family: str = "generalized_wendland"
    b: float = 0.2
    delta: float = 0.0
    mu: float = 4.0
    tau2: float = 0.0
    dim: int = 2

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown correlation family {self.family!r}")
        if not self.b > 0:
            raise ValueError(f"b must be positive, got {self.b}")
        if not 0.0 <= self.tau2 <= 1.0:
            raise ValueError(f"tau2 must lie in [0, 1], got {self.tau2}")
        if self.family == "generalized_wendland":
            if self.delta < 0:
                raise ValueError(f"delta must be >= 0, got {self.delta}")
            bound = 0.5 * (self.dim + 1) + self.delta
            if self.mu < bound:
                raise ValueError(
                    f"mu={self.mu} violates mu >= 0.5(d+1)+delta = {bound} for d={self.dim}"
                )

    @property
    def mu_gw(self) -> float:
        """Alias of ``mu``."""
        return self.mu

    def replace(self, **kw) -> "CorrelationModel":
        return CorrelationModel(**{**self.__dict__, **kw})

    def __call__(self, dist):
        """Correlation at lag ``dist`` > 0 including the nugget reduction."""
        rho = gw_corr(dist, self) if self.family == "generalized_wendland" else exp_corr(dist, self)
        return rho * (1.0 - self.tau2)


def _gw_constant(delta, mu):
    # normalising constant; Gamma(delta+mu+1) is what makes the value 1 at lag 0.
    # Gamma(delta)/Gamma(2 delta) is written as 2 Gamma(delta+1)/Gamma(2 delta+1),
    # which stays finite as delta -> 0.
    return math.exp(gammaln(delta + 1) + gammaln(2 * delta + mu + 1)
                    - gammaln(2 * delta + 1) - gammaln(delta + mu + 1)
                    - mu * math.log(2.0))


def gw_corr(dist, model: CorrelationModel):
    """Generalized Wendland correlation (no nugget)."""
    d = np.asarray(dist, dtype=float)
    if np.any(d < 0):
        raise ValueError("distances must be nonnegative")
    r = d / model.b
    inside = r < 1.0
    out = np.zeros_like(r)
    if model.delta == 0:
        out[inside] = (1.0 - r[inside]) ** model.mu
    else:
        x = 1.0 - r[inside] ** 2
        val = (_gw_constant(model.delta, model.mu) * x ** (model.delta + model.mu)
               * hyp2f1(model.mu / 2, (model.mu + 1) / 2, model.delta + model.mu + 1, x))
        out[inside] = np.minimum(val, 1.0)
        out[inside & (d == 0)] = 1.0
    return float(out) if out.ndim == 0 else out


def exp_corr(dist, model: CorrelationModel):
    d = np.asarray(dist, dtype=float)
    out = np.exp(-d / model.b)
    return float(out) if out.ndim == 0 else out


def corr_with_nugget(rho, tau2: float, is_zero_lag):
    """rho * (1 - tau2) + tau2 at zero lag."""
    if not 0.0 <= tau2 <= 1.0:
        raise ValueError(f"tau2 must lie in [0, 1], got {tau2}")
    out = np.asarray(rho, dtype=float) * (1.0 - tau2) + tau2 * np.asarray(is_zero_lag, dtype=float)
    return float(out) if out.ndim == 0 else out


@dataclass
class SpatialConfig:
    """Site coordinates (n x d) and an optional n x k covariate matrix."""

    coords: np.ndarray
    covariates: np.ndarray | None = None
    _tree: cKDTree | None = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        c = np.asarray(self.coords, dtype=float)
        if c.ndim == 1:
            c = c[:, None]
        self.coords = c
        if self.covariates is not None:
            x = np.asarray(self.covariates, dtype=float)
            if x.ndim == 1:
                x = x[:, None]
            if x.shape[0] != c.shape[0]:
                raise ValueError("covariates must have one row per site")
            self.covariates = x
        if c.shape[0] > 1:
            dd, _ = self.tree.query(c, k=2)
            dup = np.flatnonzero(dd[:, 1] == 0.0)
            if dup.size:
                raise ValueError(f"duplicate site coordinates at index {int(dup[0])}")

    @property
    def n(self) -> int:
        return self.coords.shape[0]

    @property
    def dim(self) -> int:
        return self.coords.shape[1]

    @property
    def tree(self) -> cKDTree:
        if self._tree is None:
            self._tree = cKDTree(self.coords)
        return self._tree

    def permuted(self, perm) -> "SpatialConfig":
        perm = np.asarray(perm)
        cov = None if self.covariates is None else self.covariates[perm]
        return SpatialConfig(self.coords[perm], cov)


def corr_matrix(cfg: SpatialConfig, model: CorrelationModel) -> np.ndarray:
    """n x n correlation matrix with exact unit diagonal and exact symmetry."""
    if cfg.n == 1:
        return np.ones((1, 1))
    d = pdist(cfg.coords)
    r = model(d)
    mat = squareform(r)
    np.fill_diagonal(mat, 1.0)
    return mat


def chol_factor(matrix, jitter0: float = 1e-10, jitter_max: float = 1e-6) -> np.ndarray:
    """Lower Cholesky factor, retrying with diagonal jitter 1e-10 ... 1e-6."""
    a = np.asarray(matrix, dtype=float)
    jitter = 0.0
    while True:
        work = a + jitter * np.eye(a.shape[0]) if jitter else a
        c, info = lapack.dpotrf(work, lower=1, clean=1)
        if info == 0:
            return c
        if info < 0:
            raise ValueError(f"invalid argument {-info} passed to dpotrf")
        jitter = jitter0 if jitter == 0.0 else jitter * 10.0
        if jitter > jitter_max * (1 + 1e-12):
            raise FactorizationError(
                f"matrix not positive definite: leading minor of order {info} "
                f"fails even with jitter {jitter_max:g}"
            )
