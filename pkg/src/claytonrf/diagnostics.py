"""Empirical diagnostics used on real data: NDVI, normal scores, semivariograms."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import pdist
from scipy.special import ndtri
from scipy.stats import rankdata

from .copula import clayton_corr, marginal_corr
from .correlation import SpatialConfig
from .fields import DependenceParams, MarginalSpec


def ndvi(nir, red):
    """Normalized difference vegetation index (NIR - RED) / (NIR + RED)."""
    nir = np.asarray(nir, dtype=float)
    red = np.asarray(red, dtype=float)
    if np.any(nir < 0) or np.any(red < 0):
        raise ValueError("band reflectances must be nonnegative")
    tot = nir + red
    if np.any(tot == 0):
        raise ZeroDivisionError("NDVI is undefined where NIR + RED = 0")
    out = (nir - red) / tot
    return float(out) if out.ndim == 0 else out


def normal_score(values) -> np.ndarray:
    """Phi^{-1}(r / (n + 1)) with average ranks for ties."""
    v = np.asarray(values, dtype=float).ravel()
    if v.size < 2:
        raise ValueError("normal scores need at least two values")
    return ndtri(rankdata(v, method="average") / (v.size + 1))


@dataclass
class Semivariogram:
    centers: np.ndarray
    gamma: np.ndarray
    counts: np.ndarray

    def rows(self):
        return list(zip(self.centers.tolist(), self.gamma.tolist(), self.counts.tolist()))


def empirical_semivariogram(cfg: SpatialConfig, values, n_bins: int = 15,
                            max_dist: float | None = None) -> Semivariogram:
    """Matheron estimator on equal-width distance bins over (0, max_dist].

    Bins without pairs are dropped.
    """
    v = np.asarray(values, dtype=float).ravel()
    if v.size != cfg.n:
        raise ValueError(f"{v.size} values for {cfg.n} sites")
    if n_bins < 1:
        raise ValueError("n_bins must be >= 1")
    d = pdist(cfg.coords)
    sq = pdist(v[:, None], "sqeuclidean")
    if max_dist is None:
        max_dist = 0.5 * float(d.max())
    if not max_dist > 0:
        raise ValueError("max_dist must be positive")
    edges = np.linspace(0.0, max_dist, n_bins + 1)
    keep = d <= max_dist
    which = np.clip(np.searchsorted(edges, d[keep], side="left") - 1, 0, n_bins - 1)
    counts = np.bincount(which, minlength=n_bins)
    sums = np.bincount(which, weights=sq[keep], minlength=n_bins)
    ok = counts > 0
    centers = 0.5 * (edges[:-1] + edges[1:])
    return Semivariogram(centers[ok], 0.5 * sums[ok] / counts[ok], counts[ok])


def theoretical_semivariogram(spec: MarginalSpec, params: DependenceParams, dist_grid,
                              covariates=None, quad_nodes: int = 64) -> np.ndarray:
    """sigma^2 (1 - rho_S(h)) of the transformed Clayton field on ``dist_grid``."""
    h = np.atleast_1d(np.asarray(dist_grid, dtype=float))
    _, var = spec.moments(covariates)
    var = float(np.ravel(var)[0])
    rho = np.atleast_1d(params.corr(h))
    out = np.empty_like(h)
    cache = {}
    for k, (hk, rk) in enumerate(zip(h, rho)):
        if hk == 0:
            out[k] = 0.0
            continue
        if rk not in cache:
            if spec.family == "uniform":
                cache[rk] = clayton_corr(params.nu, rk)
            else:
                cache[rk] = marginal_corr(spec, params.nu, rk, quad_nodes, covariates=covariates)
        out[k] = var * (1.0 - cache[rk])
    return out
