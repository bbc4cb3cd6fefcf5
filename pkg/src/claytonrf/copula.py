"""Bivariate densities, cdf, correlations and dependence measures.

Every function here depends on the underlying correlation only through
rho**2, so negative ``rho`` is accepted and treated through its square.
Values of |rho| above ``1 - RHO_CLAMP`` are clamped with a warning because
optimizers routinely probe the boundary.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.special import betaln, gammaln, ndtri, xlogy

from .fields import MarginalSpec, U_CLAMP
from .specfun import (
    DEFAULT_CONTROL,
    KdFSpec,
    SeriesControl,
    SeriesConvergenceError,
    kampe_de_feriet,
    log_appell_f4,
    log_bessel_i,
)

RHO_CLAMP = 1e-10


class QuadratureError(RuntimeError):
    """Node doubling moved a quadrature result by more than the tolerance."""


def clamp_rho(rho):
    """|rho| clipped to ``1 - RHO_CLAMP`` (warns when clipping happens)."""
    r = np.abs(np.asarray(rho, dtype=float))
    top = 1.0 - RHO_CLAMP
    if np.any(r > top):
        warnings.warn(f"|rho| clamped to 1 - {RHO_CLAMP:g}", RuntimeWarning, stacklevel=3)
        r = np.minimum(r, top)
    return float(r) if r.ndim == 0 else r


@dataclass(frozen=True)
class BivariateEval:
    """Underlying correlation at one lag plus the shape parameters."""

    rho: float
    nu: float
    alpha: float | None = None

    def __post_init__(self):
        if not self.nu > 0:
            raise ValueError(f"nu must be positive, got {self.nu}")
        if self.alpha is not None and not self.alpha > 0:
            raise ValueError(f"alpha must be positive, got {self.alpha}")
        if not abs(self.rho) <= 1:
            raise ValueError(f"rho must lie in [-1, 1], got {self.rho}")

    @property
    def c(self) -> float:
        if self.alpha is None:
            raise ValueError("alpha is required for this quantity")
        return 0.5 * (self.nu + self.alpha)

    @property
    def rho2(self) -> float:
        return clamp_rho(self.rho) ** 2


def _out(x):
    x = np.asarray(x, dtype=float)
    return float(x) if x.ndim == 0 else x


# ---------------------------------------------------------------- gamma / beta


def bigamma_pdf(g_i, g_j, psi: float, rho: float) -> float:
    """Kibble bivariate Gamma(psi/2, 1) density."""
    if not (g_i > 0 and g_j > 0):
        raise ValueError("bivariate gamma density needs g_i, g_j > 0")
    if not psi > 0:
        raise ValueError(f"psi must be positive, got {psi}")
    h = 0.5 * psi
    r2 = clamp_rho(rho) ** 2
    log_marg = (h - 1) * math.log(g_i * g_j) - 2 * gammaln(h)
    if r2 == 0.0:
        return math.exp(log_marg - g_i - g_j)
    om = 1.0 - r2
    q = math.sqrt(r2 * g_i * g_j) / om
    logf = ((h - 1) * math.log(g_i * g_j) - (g_i + g_j) / om - gammaln(h)
            - h * math.log(om) + (1 - h) * math.log(q) + log_bessel_i(h - 1, 2 * q))
    return math.exp(logf)


def log_auxbeta_bipdf(y_i, y_j, ev: BivariateEval):
    """Log of the auxiliary beta pair density (vectorised over y)."""
    nu, al, c = ev.nu, ev.alpha, ev.c
    y_i = np.asarray(y_i, dtype=float)
    y_j = np.asarray(y_j, dtype=float)
    if np.any((y_i <= 0) | (y_i >= 1) | (y_j <= 0) | (y_j >= 1)):
        raise ValueError("auxiliary beta density needs 0 < y < 1")
    r2 = ev.rho2
    log_marg = ((nu / 2 - 1) * np.log(y_i * y_j) + (al / 2 - 1) * np.log((1 - y_i) * (1 - y_j))
                - 2 * betaln(nu / 2, al / 2))
    if r2 == 0.0:
        return _out(log_marg)
    lf4 = log_appell_f4(c, c, nu / 2, al / 2, r2 * y_i * y_j, r2 * (1 - y_i) * (1 - y_j))
    # Gamma^2(c) / (Gamma^2(nu/2) Gamma^2(alpha/2)) is 1 / B^2(nu/2, alpha/2)
    return _out(log_marg + c * math.log1p(-r2) + lf4)


def auxbeta_bipdf(y_i, y_j, ev: BivariateEval):
    """Pair density of the auxiliary beta field via Appell F4."""
    return _out(np.exp(log_auxbeta_bipdf(y_i, y_j, ev)))


def auxbeta_kdf_spec(nu: float, alpha: float) -> KdFSpec:
    c = 0.5 * (nu + alpha)
    return KdFSpec(a_list=(c, c), b_list=(alpha / 2,), c_list=(nu / 2 + 1, nu / 2 + 1),
                   e_list=(c + 1, c + 1), g_list=(), h_list=(nu / 2,))


def auxbeta_corr(ev: BivariateEval, ctrl: SeriesControl = DEFAULT_CONTROL) -> float:
    """Correlation of the auxiliary beta field through a Kampe de Feriet series."""
    r2 = ev.rho2
    if r2 == 0.0:
        return 0.0
    c = ev.c
    a_val = kampe_de_feriet(auxbeta_kdf_spec(ev.nu, ev.alpha), r2, r2, ctrl)
    return ev.nu * (c + 1) / ev.alpha * ((1 - r2) ** c * a_val - 1)


def product_moment(a: float, ev: BivariateEval, ctrl: SeriesControl = DEFAULT_CONTROL) -> float:
    """E{Y(s_i)^a Y(s_j)^a} for the auxiliary beta field."""
    if not a > 0:
        raise ValueError(f"moment order must be positive, got {a}")
    nu, c = ev.nu, ev.c
    log_pref = 2 * (gammaln(c) + gammaln(nu / 2 + a) - gammaln(nu / 2) - gammaln(c + a))
    r2 = ev.rho2
    if r2 == 0.0:
        return math.exp(log_pref)
    spec = KdFSpec(a_list=(c, c), b_list=(nu / 2 + a, nu / 2 + a), c_list=(ev.alpha / 2,),
                   e_list=(c + a, c + a), g_list=(nu / 2,), h_list=())
    return math.exp(log_pref + c * math.log1p(-r2)) * kampe_de_feriet(spec, r2, r2, ctrl)


# --------------------------------------------------------------------- Clayton


def log_clayton_bipdf(u_i, u_j, nu: float, rho):
    """Log Clayton copula density; ``rho`` may be an array matching ``u``."""
    if not nu > 0:
        raise ValueError(f"nu must be positive, got {nu}")
    u_i = np.clip(np.asarray(u_i, dtype=float), U_CLAMP, 1 - U_CLAMP)
    u_j = np.clip(np.asarray(u_j, dtype=float), U_CLAMP, 1 - U_CLAMP)
    r2 = np.asarray(clamp_rho(rho)) ** 2
    p_i = u_i ** (2.0 / nu)
    p_j = u_j ** (2.0 / nu)
    w = r2 * p_i * p_j
    z = r2 * (1 - p_i) * (1 - p_j)
    w, z = np.broadcast_arrays(w, z)
    h = nu / 2 + 1
    return _out(h * np.log1p(-r2) + log_appell_f4(h, h, nu / 2, 1.0, w, z))


def clayton_bipdf(u_i, u_j, nu: float, rho):
    """Clayton copula density of the pair (U(s_i), U(s_j))."""
    return _out(np.exp(log_clayton_bipdf(u_i, u_j, nu, rho)))


def _mixture_weights(r2, shape, tol, max_terms, what):
    """Truncated pmf of NegBin(shape, r2) so the dropped mass is below tol."""
    if r2 == 0.0:
        return np.ones(1)
    k = np.arange(max_terms, dtype=float)
    logp = shape * math.log1p(-r2) + gammaln(shape + k) - gammaln(shape) - gammaln(k + 1) \
        + k * math.log(r2)
    p = np.exp(logp)
    tail = 1.0 - np.cumsum(p)
    stop = np.flatnonzero(tail < tol)
    if stop.size == 0:
        raise SeriesConvergenceError(
            f"{what} mixture for rho^2={r2!r} needs more than {max_terms} terms"
        )
    return p[: stop[0] + 1]


def _inc_beta_ladder(x, s, n_terms):
    """I_x(s, m+1) for m = 0..n_terms-1, as rows per element of ``x``."""
    j = np.arange(n_terms, dtype=float)
    log_coef = gammaln(s + j) - gammaln(s) - gammaln(j + 1)
    with np.errstate(divide="ignore", invalid="ignore"):
        log_t = xlogy(s, x)[:, None] + xlogy(j[None, :], (1 - x)[:, None]) + log_coef[None, :]
    return np.minimum(np.cumsum(np.exp(log_t), axis=1), 1.0)


def clayton_bicdf(t_i, t_j, nu: float, rho: float, ctrl: SeriesControl = DEFAULT_CONTROL):
    """Clayton copula cdf F(t_i, t_j).

    The double series is summed in the equivalent mixture form

        F = sum_k sum_m p_k q_m I_{X_i}(k + nu/2, m + 1) I_{X_j}(k + nu/2, m + 1),

    with X = t^(2/nu), p ~ NegBin(nu/2, rho^2) and q ~ Geometric(rho^2).
    All terms are positive and bounded by p_k q_m, so truncating each pmf at
    mass ``ctrl.rel_tol`` bounds the absolute error by twice that.
    """
    if not nu > 0:
        raise ValueError(f"nu must be positive, got {nu}")
    t_i, t_j = np.broadcast_arrays(np.asarray(t_i, dtype=float), np.asarray(t_j, dtype=float))
    if np.any((t_i < 0) | (t_i > 1) | (t_j < 0) | (t_j > 1)):
        raise ValueError("cdf arguments must lie in [0, 1]")
    shape = t_i.shape
    x_i = t_i.ravel() ** (2.0 / nu)
    x_j = t_j.ravel() ** (2.0 / nu)
    r2 = clamp_rho(rho) ** 2
    p = _mixture_weights(r2, nu / 2, ctrl.rel_tol, ctrl.max_terms, "cdf (k)")
    q = _mixture_weights(r2, 1.0, ctrl.rel_tol, ctrl.max_terms, "cdf (m)")
    total = np.zeros(x_i.size)
    for k, pk in enumerate(p):
        s = k + nu / 2
        lad_i = _inc_beta_ladder(x_i, s, q.size)
        lad_j = _inc_beta_ladder(x_j, s, q.size)
        total += pk * (lad_i * lad_j) @ q
    return _out(np.clip(total, 0.0, 1.0).reshape(shape))


def clayton_kdf_spec(nu: float) -> KdFSpec:
    h = nu / 2 + 1
    return KdFSpec(a_list=(h, h), b_list=(nu, nu), c_list=(1.0,),
                   e_list=(nu + 1, nu + 1), g_list=(nu / 2,), h_list=())


def clayton_corr(nu: float, rho: float, ctrl: SeriesControl = DEFAULT_CONTROL) -> float:
    """Correlation (equal to Spearman's rho) of the Clayton field."""
    if not nu > 0:
        raise ValueError(f"nu must be positive, got {nu}")
    if abs(rho) >= 1.0:
        # both sites carry the same variable
        return 1.0
    r2 = clamp_rho(rho) ** 2
    if r2 == 0.0:
        return 0.0
    kdf = kampe_de_feriet(clayton_kdf_spec(nu), r2, r2, ctrl)
    return 3.0 * (math.exp((nu / 2 + 1) * math.log1p(-r2)) * kdf - 1.0)


# Taylor coefficients of (1-x)^-2 (rho_2(x)/3 + 1) are (2/3)(k+1)(2k+3)/(k+2).
_SYM_SERIES = np.array([(2.0 / 3.0) * (k + 1) * (2 * k + 3) / (k + 2) for k in range(40)])


def clayton_corr_sym(rho: float) -> float:
    """Closed-form correlation of the symmetric (nu = 2) Clayton field."""
    x = clamp_rho(rho) ** 2
    if x == 0.0:
        return 0.0
    if x < 1e-2:
        inner = np.polyval(_SYM_SERIES[::-1], x)
        return 3.0 * ((1 - x) ** 2 * inner - 1.0)
    return 2.0 * (x * (3 * x - 1) - (x - 1) ** 2 * math.log1p(-x)) / (x * x) - 3.0


# ---------------------------------------------------------------- Gaussian copula


def log_gauss_copula_bipdf(u_i, u_j, rho):
    """Log Gaussian copula density (vectorised, ``rho`` may be an array)."""
    r = np.asarray(rho, dtype=float)
    if np.any(np.abs(r) >= 1):
        r = np.sign(r) * clamp_rho(r)
    x = ndtri(np.clip(np.asarray(u_i, dtype=float), U_CLAMP, 1 - U_CLAMP))
    y = ndtri(np.clip(np.asarray(u_j, dtype=float), U_CLAMP, 1 - U_CLAMP))
    om = 1.0 - r * r
    return _out(-0.5 * np.log(om) - (r * r * (x * x + y * y) - 2 * r * x * y) / (2 * om))


def gauss_copula_bipdf(u_i, u_j, rho):
    return _out(np.exp(log_gauss_copula_bipdf(u_i, u_j, rho)))


# ------------------------------------------------------------ arbitrary margins


def log_marginal_bipdf(s_i, s_j, spec: MarginalSpec, nu: float, rho, copula: str = "clayton",
                       cov_i=None, cov_j=None):
    """Log density of (S(s_i), S(s_j)) = copula density at the cdfs times the margins."""
    u_i = spec.cdf(s_i, cov_i)
    u_j = spec.cdf(s_j, cov_j)
    marg = spec.logpdf(s_i, cov_i) + spec.logpdf(s_j, cov_j)
    if copula == "clayton":
        cop = log_clayton_bipdf(u_i, u_j, nu, rho)
    elif copula == "gaussian":
        cop = log_gauss_copula_bipdf(u_i, u_j, rho)
    else:
        raise ValueError(f"unknown copula {copula!r}")
    return _out(cop + marg)


def marginal_bipdf(s_i, s_j, spec: MarginalSpec, nu: float, rho, copula: str = "clayton",
                   cov_i=None, cov_j=None):
    """Pair density of a field with marginal ``spec`` and the chosen copula."""
    return _out(np.exp(log_marginal_bipdf(s_i, s_j, spec, nu, rho, copula, cov_i, cov_j)))


# ------------------------------------------------------------------- quadrature


def unit_nodes(n: int):
    """Gauss-Legendre nodes on (0, 1) after a smoothstep map clustering at both ends."""
    t, w = np.polynomial.legendre.leggauss(n)
    t = 0.5 * (t + 1)
    w = 0.5 * w
    u = t ** 3 * (10 - 15 * t + 6 * t * t)
    du = 30 * t * t * (1 - t) ** 2
    return u, w * du


def integrate_unit_square(func, nodes: int = 64, tol: float = 1e-7, check: bool = True):
    """Tensor Gauss-Legendre integral over (0,1)^2.

    ``func(u, v)`` receives the flattened tensor grid and must be vectorised.
    With ``check`` the rule is repeated at twice the nodes and a
    :class:`QuadratureError` is raised when the two results differ by more
    than ``tol``; the finer value is returned.
    """

    def rule(n):
        u, w = unit_nodes(n)
        uu, vv = np.meshgrid(u, u, indexing="ij")
        vals = np.asarray(func(uu.ravel(), vv.ravel()), dtype=float).reshape(uu.shape)
        return float(w @ vals @ w)

    coarse = rule(nodes)
    if not check:
        return coarse
    fine = rule(2 * nodes)
    if not abs(fine - coarse) < tol:
        raise QuadratureError(
            f"quadrature with {nodes} and {2 * nodes} nodes differs by {abs(fine - coarse):.3g}"
        )
    return fine


def marginal_corr(spec: MarginalSpec, nu: float, rho: float, quad_nodes: int = 64,
                  copula: str = "clayton", covariates=None) -> float:
    """Correlation of the transformed field F_S^{-1}(U) at underlying correlation rho."""
    r = clamp_rho(rho)
    if r == 0.0:
        return 0.0
    mean, var = spec.moments(covariates)
    if np.ndim(mean) > 0:
        if np.size(mean) != 1:
            raise ValueError("marginal_corr needs a single covariate row for beta_regression")
        mean, var = float(np.ravel(mean)[0]), float(np.ravel(var)[0])
    dens = clayton_bipdf if copula == "clayton" else (lambda u, v, _, r: gauss_copula_bipdf(u, v, r))

    def f(u, v):
        return spec.ppf(u, covariates) * spec.ppf(v, covariates) * dens(u, v, nu, r)

    prod = integrate_unit_square(f, quad_nodes)
    return (prod - mean * mean) / var


def blomqvist_beta(nu: float, rho: float, ctrl: SeriesControl = DEFAULT_CONTROL) -> float:
    """Medial correlation 4 F(1/2, 1/2) - 1."""
    return 4.0 * clayton_bicdf(0.5, 0.5, nu, rho, ctrl) - 1.0


def kendall_tau(nu: float, rho: float, quad_nodes: int = 64) -> float:
    """Kendall's tau 4 E{F(U_i, U_j)} - 1 by quadrature."""
    if clamp_rho(rho) == 0.0:
        return 0.0
    val = integrate_unit_square(
        lambda u, v: clayton_bicdf(u, v, nu, rho) * clayton_bipdf(u, v, nu, rho), quad_nodes
    )
    return 4.0 * val - 1.0


def tail_probe(nu: float, rho: float, t_grid=(1e-1, 1e-2, 1e-3, 1e-4)):
    """Finite-t tail dependence ratios (lower F(t,t)/t, upper survival analogue).

    These are diagnostics only; no limit value is asserted.
    """
    t = np.asarray(t_grid, dtype=float)
    lower = clayton_bicdf(t, t, nu, rho) / t
    s = 1.0 - t
    upper = (1.0 - 2.0 * s + clayton_bicdf(s, s, nu, rho)) / t
    return {"t": t, "lower": np.atleast_1d(lower), "upper": np.atleast_1d(upper)}
