"""Weighted pairwise composite likelihood: pairs, objective, fitting, Godambe and PLIC."""

from __future__ import annotations

import logging
import math
import time
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.optimize import minimize
from scipy.special import expit, logit

from .copula import clamp_rho, log_clayton_bipdf, log_gauss_copula_bipdf
from .correlation import CorrelationModel, SpatialConfig, chol_factor, corr_matrix
from .fields import DependenceParams, FieldRealization, MarginalSpec, simulate
from .specfun import SeriesConvergenceError

log = logging.getLogger(__name__)

COPULAS = ("clayton", "gaussian")


class LikelihoodError(FloatingPointError):
    """A pair contribution to the composite likelihood is not finite."""


class FitError(RuntimeError):
    """The optimizer failed to converge after its restart."""


# ----------------------------------------------------------------------- pairs


@dataclass(frozen=True)
class PairSet:
    """Index pairs (i, j) with s_i among the m nearest neighbours of s_j."""

    pairs: np.ndarray
    m: int

    def __post_init__(self):
        p = np.asarray(self.pairs, dtype=np.int64).reshape(-1, 2)
        if np.any(p[:, 0] == p[:, 1]):
            raise ValueError("self-pairs are not allowed")
        object.__setattr__(self, "pairs", p)

    def __len__(self) -> int:
        return self.pairs.shape[0]

    @property
    def i(self) -> np.ndarray:
        return self.pairs[:, 0]

    @property
    def j(self) -> np.ndarray:
        return self.pairs[:, 1]

    def distances(self, cfg: SpatialConfig) -> np.ndarray:
        return np.linalg.norm(cfg.coords[self.i] - cfg.coords[self.j], axis=1)


def nn_pairs(cfg: SpatialConfig, m: int = 2) -> PairSet:
    """Exact m-nearest-neighbour pairs; distance ties go to the lower site index.

    For every site j the pairs (i, j) are emitted for its m neighbours i in
    order of increasing distance, so the result has n*m rows.
    """
    n = cfg.n
    if int(m) != m or m < 1:
        raise ValueError(f"m must be a positive integer, got {m}")
    if m >= n:
        raise ValueError(f"neighbour order m={m} must be below the number of sites n={n}")
    m = int(m)
    q = min(n, m + 2)
    while True:
        d, idx = cfg.tree.query(cfg.coords, k=q)
        own = idx == np.arange(n)[:, None]
        d = d[~own].reshape(n, q - 1)
        idx = idx[~own].reshape(n, q - 1)
        # a tie straddling the cut means the tree may have dropped an equal-distance site
        if q == n or not np.any(d[:, m - 1] == d[:, -1]):
            break
        q = min(n, 2 * q)
    order = np.lexsort((idx, d), axis=1)
    nb = np.take_along_axis(idx, order, axis=1)[:, :m]
    j = np.repeat(np.arange(n), m)
    return PairSet(np.column_stack([nb.ravel(), j]), m)


# ------------------------------------------------------------------ objective


def _site_terms(data: FieldRealization, cfg: SpatialConfig, marginal: MarginalSpec):
    cov = cfg.covariates if marginal.family == "beta_regression" else None
    with np.errstate(divide="ignore", invalid="ignore"):
        u = marginal.cdf(data.values, cov)
        lf = marginal.logpdf(data.values, cov)
    return np.asarray(u, dtype=float), np.asarray(lf, dtype=float)


def pair_log_densities(data: FieldRealization, cfg: SpatialConfig, params: DependenceParams,
                       pairs: PairSet, copula: str = "clayton", marginal: MarginalSpec | None = None,
                       dist=None) -> np.ndarray:
    """log f_{S_ij} for every pair, using the compact-support factorization."""
    if copula not in COPULAS:
        raise ValueError(f"unknown copula {copula!r}")
    marginal = data.marginal if marginal is None else marginal
    u, lf = _site_terms(data, cfg, marginal)
    i, j = pairs.i, pairs.j
    out = lf[i] + lf[j]
    d = pairs.distances(cfg) if dist is None else dist
    rho = np.asarray(params.corr(d), dtype=float)
    live = rho != 0.0
    if live.any():
        ui, uj, r = u[i[live]], u[j[live]], rho[live]
        if copula == "clayton":
            out[live] += log_clayton_bipdf(ui, uj, params.nu, r)
        else:
            out[live] += np.atleast_1d(log_gauss_copula_bipdf(ui, uj, r))
    return out


def wpl(data: FieldRealization, cfg: SpatialConfig, params: DependenceParams, pairs: PairSet,
        copula: str = "clayton", marginal: MarginalSpec | None = None, dist=None) -> float:
    """Weighted pairwise log composite likelihood (unit weights on ``pairs``)."""
    if len(pairs) == 0:
        raise ValueError("wpl needs at least one pair")
    contrib = pair_log_densities(data, cfg, params, pairs, copula, marginal, dist)
    bad = ~np.isfinite(contrib)
    if bad.any():
        k = int(np.flatnonzero(bad)[0])
        i, j = pairs.pairs[k]
        raise LikelihoodError(
            f"non-finite log density {contrib[k]} for pair ({i}, {j}) with values "
            f"({data.values[i]!r}, {data.values[j]!r}), nu={params.nu}, corr={params.corr}, "
            f"marginal={marginal or data.marginal}"
        )
    return float(np.sum(contrib))


# --------------------------------------------------------------- parameters


@dataclass(frozen=True)
class ParamLayout:
    """Ordered free parameters and their transforms to an unconstrained scale."""

    names: tuple
    transforms: tuple

    def to_internal(self, natural: dict) -> np.ndarray:
        out = []
        for name, tr in zip(self.names, self.transforms):
            v = float(natural[name])
            out.append(math.log(v) if tr == "log" else float(logit(v)) if tr == "logit" else v)
        return np.array(out)

    def to_natural(self, x) -> dict:
        out = {}
        for name, tr, v in zip(self.names, self.transforms, np.asarray(x, dtype=float)):
            out[name] = math.exp(v) if tr == "log" else float(expit(v)) if tr == "logit" else float(v)
        return out

    def jacobian(self, x) -> np.ndarray:
        """d natural / d internal (diagonal)."""
        d = []
        for tr, v in zip(self.transforms, np.asarray(x, dtype=float)):
            if tr == "log":
                d.append(math.exp(v))
            elif tr == "logit":
                e = float(expit(v))
                d.append(e * (1 - e))
            else:
                d.append(1.0)
        return np.diag(d)


@dataclass
class FitConfig:
    """Model and optimizer settings for :func:`fit`.

    Transforms are fixed per parameter: log for b, xi, delta, precision and
    (two-step) nu; identity for regression coefficients; logit for tau2.
    """

    marginal: str = "beta_regression"
    copula: str = "clayton"
    nu_grid: tuple = (2,)
    nu_mode: str = "grid"
    corr_family: str = "generalized_wendland"
    gw_delta: float = 0.0
    gw_mu: float = 4.0
    fit_nugget: bool = False
    m: int = 2
    start: dict | None = None
    xatol: float = 1e-7
    fatol: float = 1e-8
    maxiter: int = 5000
    initial_step: float = 0.1
    bootstrap: int = 0
    seed: int = 0

    def __post_init__(self):
        self.nu_grid = tuple(self.nu_grid)
        if not self.nu_grid:
            raise ValueError("nu_grid must be nonempty")
        if any(not v > 0 for v in self.nu_grid):
            raise ValueError("nu_grid entries must be positive")
        if self.nu_mode not in ("grid", "two_step"):
            raise ValueError(f"unknown nu_mode {self.nu_mode!r}")
        if self.copula not in COPULAS:
            raise ValueError(f"unknown copula {self.copula!r}")
        if self.marginal not in ("uniform", "beta", "beta_regression"):
            raise ValueError(f"unknown marginal family {self.marginal!r}")
        if self.bootstrap and self.bootstrap < 30:
            raise ValueError("bootstrap needs B >= 30")

    def layout(self, n_cov: int = 0, free_nu: bool = False) -> ParamLayout:
        names, trs = [], []
        if self.marginal == "beta":
            names += ["xi", "delta"]
            trs += ["log", "log"]
        elif self.marginal == "beta_regression":
            names += [f"beta{k}" for k in range(n_cov)] + ["precision"]
            trs += ["identity"] * n_cov + ["log"]
        names.append("b")
        trs.append("log")
        if self.fit_nugget:
            names.append("tau2")
            trs.append("logit")
        if free_nu:
            names.append("nu")
            trs.append("log")
        return ParamLayout(tuple(names), tuple(trs))


def build_model(theta: dict, fit_cfg: FitConfig, nu: float):
    """MarginalSpec and DependenceParams from a natural-scale parameter dict."""
    if fit_cfg.marginal == "beta":
        marg = MarginalSpec("beta", xi=theta["xi"], delta=theta["delta"])
    elif fit_cfg.marginal == "beta_regression":
        k = sum(1 for key in theta if key.startswith("beta"))
        coeffs = tuple(theta[f"beta{q}"] for q in range(k))
        marg = MarginalSpec("beta_regression", beta_coeffs=coeffs, precision=theta["precision"])
    else:
        marg = MarginalSpec("uniform")
    corr = CorrelationModel(fit_cfg.corr_family, b=theta["b"], delta=fit_cfg.gw_delta,
                            mu=fit_cfg.gw_mu, tau2=theta.get("tau2", 0.0))
    return marg, DependenceParams(theta.get("nu", nu), corr)


class _Objective:
    """Negative wpl on the internal scale with cached pair geometry."""

    def __init__(self, data, cfg, pairs, fit_cfg, layout, nu):
        self.data, self.cfg, self.pairs = data, cfg, pairs
        self.fit_cfg, self.layout, self.nu = fit_cfg, layout, nu
        self.dist = pairs.distances(cfg)
        self.n_eval = 0

    def model(self, x):
        return build_model(self.layout.to_natural(x), self.fit_cfg, self.nu)

    def value(self, x) -> float:
        self.n_eval += 1
        try:
            marg, dep = self.model(x)
            return wpl(self.data, self.cfg, dep, self.pairs, self.fit_cfg.copula, marg, self.dist)
        except (ValueError, FloatingPointError, ArithmeticError, SeriesConvergenceError):
            return -np.inf

    def __call__(self, x) -> float:
        v = self.value(x)
        return -v if np.isfinite(v) else 1e300


# ------------------------------------------------------------------ fitting


@dataclass
class FitResult:
    """Outcome of :func:`fit` (natural-scale estimates unless stated)."""

    theta_hat: dict
    wpl_max: float
    nu_selected: float
    names: tuple
    x_hat: np.ndarray
    copula: str
    marginal: str
    m: int
    n_pairs: int
    converged: bool
    boundary: list = field(default_factory=list)
    profile: dict = field(default_factory=dict)
    n_evals: int = 0
    wall_time: float = 0.0
    godambe_inv: np.ndarray | None = None
    godambe_inv_internal: np.ndarray | None = None
    hessian: np.ndarray | None = None
    std_errors: dict | None = None
    plic: float | None = None
    fit_cfg: FitConfig | None = None

    def model(self):
        """(MarginalSpec, DependenceParams) at the estimate."""
        return build_model(self.theta_hat, self.fit_cfg, self.nu_selected)

    def to_dict(self) -> dict:
        def conv(v):
            if isinstance(v, np.ndarray):
                return v.tolist()
            if isinstance(v, dict):
                return {str(k): conv(x) for k, x in v.items()}
            if isinstance(v, (list, tuple)):
                return [conv(x) for x in v]
            if isinstance(v, (np.floating, np.integer)):
                return v.item()
            return v

        out = {k: conv(v) for k, v in self.__dict__.items() if k != "fit_cfg"}
        if self.fit_cfg is not None:
            out["fit_cfg"] = conv(asdict(self.fit_cfg))
        return out


def _nm(fun, x0, fit_cfg: FitConfig, step=None):
    step = fit_cfg.initial_step if step is None else step
    sim = np.vstack([x0] + [x0 + step * e for e in np.eye(x0.size)])
    return minimize(fun, x0, method="Nelder-Mead",
                    options={"initial_simplex": sim, "xatol": fit_cfg.xatol,
                             "fatol": fit_cfg.fatol, "maxiter": fit_cfg.maxiter,
                             "maxfev": fit_cfg.maxiter * 2, "adaptive": x0.size > 4})


def _optimize(obj: _Objective, x0, fit_cfg: FitConfig, restart: bool = True):
    """Simplex search, then one restart from the incumbent."""
    res = _nm(obj, x0, fit_cfg)
    trace = [(res.fun, res.nit, res.message)]
    if restart:
        res2 = _nm(obj, res.x, fit_cfg)
        trace.append((res2.fun, res2.nit, res2.message))
        if res2.fun <= res.fun:
            res2.success = res2.success or res.success
            res = res2
    if not np.isfinite(res.fun) or res.fun >= 1e300:
        raise FitError(f"optimizer found no finite objective; trace={trace}")
    return res, trace


def independence_start(data: FieldRealization, cfg: SpatialConfig, fit_cfg: FitConfig) -> dict:
    """Marginal parameters maximizing the independence (site-wise) likelihood."""
    v = data.values
    if fit_cfg.marginal == "uniform":
        return {}
    if fit_cfg.marginal == "beta":
        mu, var = float(np.mean(v)), float(np.var(v))
        k = max(mu * (1 - mu) / max(var, 1e-12) - 1, 0.1)
        theta0 = {"xi": mu * k, "delta": (1 - mu) * k}
    else:
        x = cfg.covariates
        if x is None:
            raise ValueError("beta_regression fit needs covariates in the SpatialConfig")
        z = np.log(v / (1 - v))
        coef = np.linalg.lstsq(x, z, rcond=None)[0]
        mu = np.clip(np.mean(v), 1e-3, 1 - 1e-3)
        theta0 = {f"beta{k}": float(c) for k, c in enumerate(coef)}
        theta0["precision"] = max(mu * (1 - mu) / max(float(np.var(v)), 1e-12) - 1, 0.1)
    names = tuple(theta0)
    lay = ParamLayout(names, tuple("identity" if n.startswith("beta") else "log" for n in names))

    def negll(x):
        th = lay.to_natural(x)
        marg, _ = build_model({**th, "b": 1.0}, fit_cfg, 1.0)
        cov = cfg.covariates if fit_cfg.marginal == "beta_regression" else None
        with np.errstate(all="ignore"):
            s = float(np.sum(marg.logpdf(v, cov)))
        return -s if np.isfinite(s) else 1e300

    res = minimize(negll, lay.to_internal(theta0), method="Nelder-Mead",
                   options={"xatol": 1e-6, "fatol": 1e-8, "maxiter": 4000})
    return lay.to_natural(res.x)


def _b_candidates(dist: np.ndarray, family: str) -> np.ndarray:
    base = float(np.max(dist)) if family == "generalized_wendland" else float(np.median(dist))
    return base * np.array([1.25, 2.0, 4.0, 8.0, 16.0])


def _boundary_flags(theta: dict, x: np.ndarray, layout: ParamLayout, dist) -> list:
    flags = []
    for name, tr, v in zip(layout.names, layout.transforms, x):
        if tr != "identity" and abs(v) > 12:
            flags.append(name)
    if "b" in theta and theta["b"] < float(np.min(dist)) and "b" not in flags:
        flags.append("b")
    return flags


def _fit_fixed_nu(data, cfg, pairs, fit_cfg, nu, start: dict, layout, restart=True):
    obj = _Objective(data, cfg, pairs, fit_cfg, layout, nu)
    x0 = layout.to_internal(start)
    res, trace = _optimize(obj, x0, fit_cfg, restart)
    return res, trace, obj


def fit(data: FieldRealization, cfg: SpatialConfig, fit_cfg: FitConfig | None = None,
        pairs: PairSet | None = None) -> FitResult:
    """Maximize wpl over the free parameters, profiling nu over ``nu_grid``.

    With ``fit_cfg.bootstrap = B`` the parametric-bootstrap Godambe matrix
    and PLIC are computed at each candidate nu and the lowest PLIC wins;
    otherwise the highest wpl does.
    """
    fit_cfg = FitConfig() if fit_cfg is None else fit_cfg
    t0 = time.perf_counter()
    pairs = nn_pairs(cfg, fit_cfg.m) if pairs is None else pairs
    n_cov = 0 if cfg.covariates is None else cfg.covariates.shape[1]
    dist = pairs.distances(cfg)

    if fit_cfg.start is not None:
        start = dict(fit_cfg.start)
    else:
        start = independence_start(data, cfg, fit_cfg)
        if fit_cfg.fit_nugget:
            start["tau2"] = 0.1
    copula_nu_grid = fit_cfg.nu_grid if fit_cfg.copula == "clayton" else (fit_cfg.nu_grid[0],)

    if fit_cfg.nu_mode == "two_step" and fit_cfg.copula == "clayton":
        lay1 = fit_cfg.layout(n_cov, free_nu=True)
        s1 = _with_b(start, data, cfg, pairs, fit_cfg, lay1, float(np.median(copula_nu_grid)), dist)
        s1.setdefault("nu", float(np.median(copula_nu_grid)))
        res1, _, _ = _fit_fixed_nu(data, cfg, pairs, fit_cfg, None, s1, lay1)
        th1 = lay1.to_natural(res1.x)
        nu_round = max(1, int(round(th1.pop("nu"))))
        copula_nu_grid = (nu_round,)
        start = th1

    layout = fit_cfg.layout(n_cov)
    best = None
    profile = {}
    n_evals = 0
    for nu in copula_nu_grid:
        s = _with_b(start, data, cfg, pairs, fit_cfg, layout, nu, dist)
        res, trace, obj = _fit_fixed_nu(data, cfg, pairs, fit_cfg, nu, s, layout)
        n_evals += obj.n_eval
        cand = FitResult(
            theta_hat=layout.to_natural(res.x), wpl_max=-float(res.fun), nu_selected=nu,
            names=layout.names, x_hat=np.asarray(res.x), copula=fit_cfg.copula,
            marginal=fit_cfg.marginal, m=pairs.m, n_pairs=len(pairs),
            converged=bool(res.success), fit_cfg=fit_cfg,
        )
        if not res.success:
            log.warning("nu=%s: simplex did not report convergence: %s", nu, trace)
        cand.boundary = _boundary_flags(cand.theta_hat, cand.x_hat, layout, dist)
        if fit_cfg.bootstrap:
            attach_godambe(cand, data, cfg, fit_cfg.bootstrap, fit_cfg.seed, pairs)
            profile[nu] = {"wpl": cand.wpl_max, "plic": cand.plic}
            better = best is None or cand.plic < best.plic
        else:
            profile[nu] = {"wpl": cand.wpl_max}
            better = best is None or cand.wpl_max > best.wpl_max
        if better:
            best = cand
    if not best.converged:
        raise FitError(f"simplex failed to converge for nu={best.nu_selected}: {profile}")
    best.profile = profile
    best.n_evals = n_evals
    best.wall_time = time.perf_counter() - t0
    return best


def _with_b(start, data, cfg, pairs, fit_cfg, layout, nu, dist):
    """Complete ``start`` with the best b from a coarse grid if it is missing."""
    s = dict(start)
    if "b" in s:
        return s
    obj = _Objective(data, cfg, pairs, fit_cfg, layout, nu)
    best_b, best_v = None, -np.inf
    for b in _b_candidates(dist, fit_cfg.corr_family):
        trial = {**s, "b": b}
        if "nu" in layout.names:
            trial.setdefault("nu", nu)
        v = obj.value(layout.to_internal(trial))
        if v > best_v:
            best_b, best_v = b, v
    s["b"] = float(best_b if best_b is not None else np.max(dist))
    return s


# -------------------------------------------------------- Godambe and PLIC


def numerical_hessian(fun, x, step: float = 1e-5) -> np.ndarray:
    """Central-difference Hessian of a scalar function."""
    x = np.asarray(x, dtype=float)
    p = x.size
    h = np.empty((p, p))
    f0 = fun(x)
    e = np.eye(p) * step
    for a in range(p):
        h[a, a] = (fun(x + e[a]) - 2 * f0 + fun(x - e[a])) / step ** 2
        for b in range(a + 1, p):
            v = (fun(x + e[a] + e[b]) - fun(x + e[a] - e[b])
                 - fun(x - e[a] + e[b]) + fun(x - e[a] - e[b])) / (4 * step ** 2)
            h[a, b] = h[b, a] = v
    return h


def numerical_gradient(fun, x, step: float = 1e-5) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    e = np.eye(x.size) * step
    return np.array([(fun(x + e[a]) - fun(x - e[a])) / (2 * step) for a in range(x.size)])


def wpl_hessian(fit_res: FitResult, data, cfg, pairs=None, step: float = 1e-5) -> np.ndarray:
    """H = minus the Hessian of wpl at the estimate, on the internal scale."""
    fc = fit_res.fit_cfg
    pairs = nn_pairs(cfg, fit_res.m) if pairs is None else pairs
    obj = _Objective(data, cfg, pairs, fc, _layout_of(fit_res, cfg), fit_res.nu_selected)
    return -numerical_hessian(obj.value, fit_res.x_hat, step)


def _layout_of(fit_res: FitResult, cfg) -> ParamLayout:
    n_cov = 0 if cfg.covariates is None else cfg.covariates.shape[1]
    return fit_res.fit_cfg.layout(n_cov)


def plic(fit_res: FitResult | float, H_hat, Ginv_hat) -> float:
    """-2 wpl_max + 2 tr(H G^{-1})."""
    w = fit_res.wpl_max if isinstance(fit_res, FitResult) else float(fit_res)
    h = np.atleast_2d(np.asarray(H_hat, dtype=float))
    g = np.atleast_2d(np.asarray(Ginv_hat, dtype=float))
    if h.shape != g.shape or h.shape[0] != h.shape[1]:
        raise ValueError(f"H {h.shape} and G^-1 {g.shape} must be square and match")
    for name, mat in (("H", h), ("G^-1", g)):
        if not np.all(np.isfinite(mat)):
            raise np.linalg.LinAlgError(f"{name} has non-finite entries")
        if np.linalg.cond(mat) > 1e14:
            raise np.linalg.LinAlgError(f"{name} is numerically singular")
    return -2.0 * w + 2.0 * float(np.trace(h @ g))


@dataclass
class BootstrapResult:
    godambe_inv: np.ndarray
    godambe_inv_internal: np.ndarray
    std_errors: dict
    estimates: np.ndarray
    failures: list


def bootstrap_godambe(fit_res: FitResult, cfg: SpatialConfig, B: int = 100, seed: int = 0,
                      pairs: PairSet | None = None, max_fail: float = 0.1) -> BootstrapResult:
    """Parametric bootstrap of the estimator at the fitted parameters.

    Each replicate is simulated at theta-hat with seed stream
    ``(seed, b)`` and refitted from theta-hat at the selected nu.  The
    sample covariance of the estimates estimates G^{-1}.
    """
    if B < 30:
        raise ValueError(f"bootstrap needs B >= 30, got {B}")
    fc = fit_res.fit_cfg
    lay = _layout_of(fit_res, cfg)
    marg, dep = fit_res.model()
    if fc.copula == "clayton" and not float(dep.nu).is_integer():
        raise ValueError("bootstrap simulation needs integer nu")
    pairs = nn_pairs(cfg, fit_res.m) if pairs is None else pairs
    refit_cfg = FitConfig(**{**asdict(fc), "nu_grid": (fit_res.nu_selected,), "nu_mode": "grid",
                             "start": dict(fit_res.theta_hat), "bootstrap": 0})
    L = chol_factor(corr_matrix(cfg, dep.corr))
    ss = np.random.SeedSequence(seed)
    est_int, est_nat, failures = [], [], []
    for b, child in enumerate(ss.spawn(B)):
        rep_seed = int(child.generate_state(1, dtype=np.uint64)[0])
        try:
            sim = simulate(cfg, marg, dep, rep_seed, fc.copula, L=L)
            sim.values = np.clip(sim.values, 1e-12, 1 - 1e-12)
            r = fit(sim, cfg, refit_cfg, pairs)
            est_int.append(r.x_hat)
            est_nat.append([r.theta_hat[k] for k in lay.names])
        except (FitError, ValueError, FloatingPointError, np.linalg.LinAlgError) as exc:
            failures.append((b, repr(exc)))
    if len(failures) > max_fail * B:
        raise FitError(f"{len(failures)} of {B} bootstrap refits failed: {failures}")
    est_int = np.asarray(est_int)
    est_nat = np.asarray(est_nat)
    g_int = np.atleast_2d(np.cov(est_int, rowvar=False))
    g_nat = np.atleast_2d(np.cov(est_nat, rowvar=False))
    se = dict(zip(lay.names, np.sqrt(np.diag(g_nat)).tolist()))
    return BootstrapResult(g_nat, g_int, se, est_nat, failures)


def attach_godambe(fit_res: FitResult, data, cfg, B: int, seed: int = 0,
                   pairs: PairSet | None = None) -> FitResult:
    """Fill godambe_inv, std_errors, hessian and plic in place."""
    boot = bootstrap_godambe(fit_res, cfg, B, seed, pairs)
    fit_res.godambe_inv = boot.godambe_inv
    fit_res.godambe_inv_internal = boot.godambe_inv_internal
    fit_res.std_errors = boot.std_errors
    fit_res.hessian = wpl_hessian(fit_res, data, cfg, pairs)
    fit_res.plic = plic(fit_res, fit_res.hessian, boot.godambe_inv_internal)
    return fit_res
