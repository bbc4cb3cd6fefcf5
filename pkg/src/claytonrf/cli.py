"""Command-line workflows: simulate, fit, variogram, density, corrcurve.

Data files are CSV with header ``x,y,value[,cov1,...]``; configs and
results are JSON.  On failure a JSON object ``{"error": ..., "message": ...}``
is written to stderr and the exit code is nonzero.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from pathlib import Path

import numpy as np

from .copula import clayton_bipdf, clayton_corr, gauss_copula_bipdf
from .correlation import CorrelationModel, SpatialConfig
from .diagnostics import empirical_semivariogram
from .fields import (
    DependenceParams,
    FieldRealization,
    MarginalSpec,
    child_seed,
    rescale_bounded,
    simulate,
)
from .inference import FitConfig, fit, nn_pairs

_MARGINAL_ALIASES = {"uniform": "uniform", "beta": "beta", "beta-reg": "beta_regression",
                     "beta_regression": "beta_regression"}


def _floats(text: str) -> list[float]:
    return [float(t) for t in text.split(",") if t.strip()]


def write_csv(path, coords, values, covariates=None):
    coords = np.atleast_2d(coords)
    header = ["x", "y"][: coords.shape[1]] + ["value"]
    k = 0 if covariates is None else covariates.shape[1]
    header += [f"cov{q + 1}" for q in range(k)]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for r in range(coords.shape[0]):
            row = [repr(float(c)) for c in coords[r]] + [repr(float(values[r]))]
            if k:
                row += [repr(float(c)) for c in covariates[r]]
            w.writerow(row)


def read_csv(path):
    """(coords, values, covariates-or-None) from a ``x,y,value[,cov...]`` file."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ValueError(f"{path}: empty file")
    header = [h.strip() for h in rows[0]]
    if "value" not in header:
        raise ValueError(f"{path}: header must contain a 'value' column, got {header}")
    iv = header.index("value")
    try:
        data = np.array([[float(x) for x in r] for r in rows[1:] if r], dtype=float)
    except ValueError as exc:
        raise ValueError(f"{path}: non-numeric field ({exc})") from None
    if data.size == 0:
        raise ValueError(f"{path}: no data rows")
    cov_cols = [c for c, h in enumerate(header) if h.startswith("cov")]
    cov = data[:, cov_cols] if cov_cols else None
    return data[:, :iv], data[:, iv], cov


def _write_rows(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for r in rows:
            w.writerow([repr(float(v)) for v in r])


# ----------------------------------------------------------------- commands


def cmd_simulate(args):
    family = _MARGINAL_ALIASES[args.marginal]
    site_rng = np.random.default_rng(child_seed(args.seed, 1000))
    coords = site_rng.random((args.n, 2))
    cov = None
    if family == "beta_regression":
        coeffs = _floats(args.beta)
        cov = np.column_stack([np.ones(args.n)] + [site_rng.random(args.n)
                                                   for _ in range(len(coeffs) - 1)])
        marg = MarginalSpec(family, beta_coeffs=coeffs, precision=args.precision)
    elif family == "beta":
        marg = MarginalSpec(family, xi=args.xi, delta=args.shape2)
    else:
        marg = MarginalSpec()
    corr = CorrelationModel("generalized_wendland" if args.model == "gw" else "exponential",
                            b=args.range, delta=args.delta, mu=args.mu, tau2=args.nugget)
    cfg = SpatialConfig(coords, cov)
    real = simulate(cfg, marg, DependenceParams(args.nu, corr), args.seed, args.copula)
    write_csv(args.out, coords, real.values, cov)
    return {"out": str(args.out), "n": args.n, "seed": args.seed}


def cmd_fit(args):
    coords, values, cov = read_csv(args.data)
    conf = json.loads(Path(args.config).read_text()) if args.config else {}
    bounds = conf.pop("support", None)
    if bounds is not None:
        values = rescale_bounded(values, *bounds)
    if np.any((values <= 0) | (values >= 1)):
        raise ValueError("values must lie strictly inside (0, 1); set 'support' in the config")
    if args.nu_grid:
        conf["nu_grid"] = [int(v) for v in _floats(args.nu_grid)]
    conf["m"] = args.neighbors
    conf["copula"] = args.copula
    if args.bootstrap:
        conf["bootstrap"] = args.bootstrap
    conf["seed"] = args.seed
    conf.setdefault("marginal", "beta_regression" if cov is not None else "beta")
    fit_cfg = FitConfig(**conf)
    cfg = SpatialConfig(coords, cov)
    t0 = time.perf_counter()
    res = fit(FieldRealization(values), cfg, fit_cfg, nn_pairs(cfg, fit_cfg.m))
    out = res.to_dict()
    out["wall_time"] = time.perf_counter() - t0
    Path(args.out).write_text(json.dumps(out, indent=2))
    return {"out": str(args.out), "wpl": res.wpl_max, "nu": res.nu_selected, "plic": res.plic}


def cmd_variogram(args):
    coords, values, _ = read_csv(args.data)
    sv = empirical_semivariogram(SpatialConfig(coords), values, args.bins, args.maxdist)
    _write_rows(args.out, ["distance", "semivariance", "count"], sv.rows())
    return {"out": str(args.out), "bins": len(sv.centers)}


def cmd_density(args):
    n = args.grid
    if args.transform == "uniform":
        axis = (np.arange(n) + 0.5) / n
        uu, vv = np.meshgrid(axis, axis, indexing="ij")
        c = clayton_bipdf(uu.ravel(), vv.ravel(), args.nu, args.rho)
        g = gauss_copula_bipdf(uu.ravel(), vv.ravel(), args.rho)
        rows = zip(uu.ravel(), vv.ravel(), c, g)
        header = ["u", "v", "clayton", "gaussian"]
    else:
        from scipy.stats import norm

        axis = np.linspace(-args.zmax, args.zmax, n)
        xx, yy = np.meshgrid(axis, axis, indexing="ij")
        phi = norm.pdf(xx.ravel()) * norm.pdf(yy.ravel())
        ux, uy = norm.cdf(xx.ravel()), norm.cdf(yy.ravel())
        c = clayton_bipdf(ux, uy, args.nu, args.rho) * phi
        g = gauss_copula_bipdf(ux, uy, args.rho) * phi
        rows = zip(xx.ravel(), yy.ravel(), c, g)
        header = ["x", "y", "clayton", "gaussian"]
    _write_rows(args.out, header, rows)
    return {"out": str(args.out), "points": n * n}


def cmd_corrcurve(args):
    nus = _floats(args.nu)
    model = CorrelationModel("generalized_wendland", b=args.range, delta=args.delta, mu=args.mu)
    h = np.linspace(0.0, args.range, args.points)
    rho = np.atleast_1d(model(h))
    rows = [[hk, rk] + [clayton_corr(nu, rk) for nu in nus] for hk, rk in zip(h, rho)]
    _write_rows(args.out, ["distance", "rho"] + [f"nu{v:g}" for v in nus], rows)
    return {"out": str(args.out), "points": len(rows)}


# -------------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="claytonrf", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", help="simulate a field on random sites in the unit square")
    s.add_argument("--n", type=int, default=400)
    s.add_argument("--model", choices=["gw", "exp"], default="gw")
    s.add_argument("--delta", type=float, default=0.0, help="Wendland smoothness")
    s.add_argument("--mu", type=float, default=4.0, help="Wendland shape")
    s.add_argument("--range", type=float, default=0.2, help="compact support b")
    s.add_argument("--nugget", type=float, default=0.0)
    s.add_argument("--nu", type=int, default=2)
    s.add_argument("--copula", choices=["clayton", "gaussian"], default="clayton")
    s.add_argument("--marginal", choices=["uniform", "beta", "beta-reg"], default="uniform")
    s.add_argument("--xi", type=float, default=2.0)
    s.add_argument("--shape2", type=float, default=3.0, help="second beta shape")
    s.add_argument("--beta", default="0.2,-0.2", help="regression coefficients (intercept first)")
    s.add_argument("--precision", type=float, default=1.5)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_simulate)

    f = sub.add_parser("fit", help="weighted pairwise likelihood fit")
    f.add_argument("--data", required=True)
    f.add_argument("--config", help="JSON with FitConfig fields and optional 'support': [a1, a2]")
    f.add_argument("--neighbors", type=int, default=2)
    f.add_argument("--nu-grid", default="")
    f.add_argument("--copula", choices=["clayton", "gaussian"], default="clayton")
    f.add_argument("--bootstrap", type=int, default=0)
    f.add_argument("--seed", type=int, default=0)
    f.add_argument("--out", required=True)
    f.set_defaults(func=cmd_fit)

    v = sub.add_parser("variogram", help="Matheron empirical semivariogram")
    v.add_argument("--data", required=True)
    v.add_argument("--bins", type=int, default=15)
    v.add_argument("--maxdist", type=float, default=None)
    v.add_argument("--out", required=True)
    v.set_defaults(func=cmd_variogram)

    d = sub.add_parser("density", help="copula density grid for contour plots")
    d.add_argument("--nu", type=float, default=2.0)
    d.add_argument("--rho", type=float, default=0.5)
    d.add_argument("--grid", type=int, default=50)
    d.add_argument("--transform", choices=["uniform", "gaussian-margins"], default="uniform")
    d.add_argument("--zmax", type=float, default=3.0)
    d.add_argument("--out", required=True)
    d.set_defaults(func=cmd_density)

    c = sub.add_parser("corrcurve", help="Clayton correlation against distance")
    c.add_argument("--nu", default="1,2,5")
    c.add_argument("--range", type=float, default=0.15)
    c.add_argument("--delta", type=float, default=0.0)
    c.add_argument("--mu", type=float, default=4.0)
    c.add_argument("--points", type=int, default=61)
    c.add_argument("--out", required=True)
    c.set_defaults(func=cmd_corrcurve)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        summary = args.func(args)
    except Exception as exc:  # reported as JSON for scripted callers
        json.dump({"error": type(exc).__name__, "message": str(exc)}, sys.stderr)
        sys.stderr.write("\n")
        return 1
    json.dump(summary, sys.stdout)
    sys.stdout.write("\n")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
