"""Hypergeometric-type special functions used by the Clayton field formulas.

Every evaluator here is a plain truncated power series.  Term magnitudes are
tracked in log space (with a running reference scale) wherever they can leave
the representable range, so large-index Pochhammer products never overflow.

Truncation rule shared by all series: stop once the newest term (or the newest
anti-diagonal of a double series) is below ``rel_tol * |partial sum|`` for
three consecutive steps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.special import betaln, gammaln, gammasgn, logsumexp


class SeriesConvergenceError(RuntimeError):
    """A series did not reach its tolerance within ``max_terms``."""


class DomainError(ValueError):
    """Arguments outside the region where a series is defined."""


@dataclass(frozen=True)
class SeriesControl:
    rel_tol: float = 1e-12
    max_terms: int = 20000

    def __post_init__(self):
        if not self.rel_tol > 0:
            raise ValueError(f"rel_tol must be > 0, got {self.rel_tol}")
        if int(self.max_terms) < 1:
            raise ValueError(f"max_terms must be >= 1, got {self.max_terms}")


DEFAULT_CONTROL = SeriesControl()

# consecutive negligible steps required before a series is cut
_N_SMALL = 3
# diagonals summed between convergence checks in log_appell_f4
_BATCH = 8
# rescale the running sum once a log-term exceeds the reference by this much
_RESCALE_GAP = 300.0


def _is_nonpositive_int(v: float) -> bool:
    return v <= 0 and float(v).is_integer()


class _ScaledSum:
    """Running signed sum stored as ``acc * exp(ref)``."""

    __slots__ = ("acc", "ref")

    def __init__(self, first_log: float, first_sign: float):
        self.ref = first_log
        self.acc = first_sign

    def add(self, log_mag: float, sign: float) -> float:
        """Add ``sign*exp(log_mag)``; return the term on the current scale."""
        if log_mag > self.ref + _RESCALE_GAP:
            self.acc *= math.exp(self.ref - log_mag)
            self.ref = log_mag
        t = sign * math.exp(log_mag - self.ref) if sign else 0.0
        self.acc += t
        return t

    def log_value(self) -> tuple[float, float]:
        if self.acc == 0.0:
            return 0.0, -math.inf
        return math.copysign(1.0, self.acc), self.ref + math.log(abs(self.acc))


def _log_hyp2f1(a, b, c, x, ctrl: SeriesControl) -> tuple[float, float]:
    """(sign, log|2F1(a, b; c; x)|) by term-ratio recursion in log space."""
    acc = _ScaledSum(0.0, 1.0)
    if x == 0 or a == 0 or b == 0:
        return acc.log_value()
    log_t, sgn = 0.0, 1.0
    small = 0
    for k in range(int(ctrl.max_terms)):
        r = (a + k) * (b + k) * x / ((c + k) * (k + 1))
        if r == 0.0:
            return acc.log_value()
        log_t += math.log(abs(r))
        if r < 0:
            sgn = -sgn
        t = acc.add(log_t, sgn)
        if abs(t) < ctrl.rel_tol * abs(acc.acc):
            small += 1
            if small >= _N_SMALL:
                return acc.log_value()
        else:
            small = 0
    raise SeriesConvergenceError(
        f"2F1({a}, {b}; {c}; {x}) not converged within {ctrl.max_terms} terms"
    )


def gauss_2f1(a: float, b: float, c: float, x: float,
              ctrl: SeriesControl = DEFAULT_CONTROL) -> float:
    """Gauss hypergeometric function 2F1(a, b; c; x) for |x| < 1.

    Terminating series (``a`` or ``b`` a non-positive integer) are also
    accepted at |x| >= 1 since they are polynomials.
    """
    if _is_nonpositive_int(c):
        raise DomainError(f"2F1 undefined: c={c} is a non-positive integer")
    terminating = _is_nonpositive_int(a) or _is_nonpositive_int(b)
    if not terminating and not abs(x) < 1:
        raise DomainError(f"2F1({a}, {b}; {c}; x) requires |x| < 1, got x={x}")
    sgn, logv = _log_hyp2f1(a, b, c, x, ctrl)
    if logv > 709.0:
        raise SeriesConvergenceError(f"2F1({a}, {b}; {c}; {x}) overflows")
    return sgn * math.exp(logv)


def _check_f4_domain(w, z):
    r = math.sqrt(abs(w)) + math.sqrt(abs(z))
    if not r < 1:
        raise DomainError(f"F4 requires |sqrt(w)|+|sqrt(z)| < 1, got {r!r}")
    return r


def appell_f4(a: float, b: float, c: float, c2: float, w: float, z: float,
              ctrl: SeriesControl = DEFAULT_CONTROL) -> float:
    """Appell F4(a, b; c, c2; w, z) as a single sum of 2F1 values.

    Uses F4 = sum_k (a)_k (b)_k z^k / (k! (c2)_k) * 2F1(a+k, b+k; c; w).
    """
    for v in (c, c2):
        if _is_nonpositive_int(v):
            raise DomainError(f"F4 undefined for denominator parameter {v}")
    _check_f4_domain(w, z)

    s0, l0 = _log_hyp2f1(a, b, c, w, ctrl)
    acc = _ScaledSum(l0, s0)
    if z == 0:
        sgn, logv = acc.log_value()
        return sgn * math.exp(logv)

    log_coef, coef_sgn = 0.0, 1.0
    small = 0
    for k in range(int(ctrl.max_terms)):
        r = (a + k) * (b + k) * z / ((k + 1) * (c2 + k))
        if r == 0.0:
            break
        log_coef += math.log(abs(r))
        if r < 0:
            coef_sgn = -coef_sgn
        s_k, l_k = _log_hyp2f1(a + k + 1, b + k + 1, c, w, ctrl)
        t = acc.add(log_coef + l_k, coef_sgn * s_k)
        if abs(t) < ctrl.rel_tol * abs(acc.acc):
            small += 1
            if small >= _N_SMALL:
                break
        else:
            small = 0
    else:
        raise SeriesConvergenceError(
            f"F4({a}, {b}; {c}, {c2}; {w}, {z}) not converged within "
            f"{ctrl.max_terms} outer terms"
        )
    sgn, logv = acc.log_value()
    return sgn * math.exp(logv)


def log_appell_f4(a: float, b: float, c: float, c2: float, w, z,
                  rel_tol: float = 1e-14, max_terms: int = 20000,
                  method: str = "auto") -> np.ndarray:
    """Vectorised log F4 for positive parameters and nonnegative w, z.

    Two summation schemes are available.  ``"diagonal"`` sums the double
    series by anti-diagonals k + m = n and works for any positive parameters.
    ``"jacobi"`` needs b = a and c = a - 1 (the case of the Clayton copula
    density); it is much faster near the edge of the convergence region.
    ``"auto"`` picks ``"jacobi"`` whenever it applies.  All terms are positive
    under these restrictions, so no cancellation can occur.
    """
    if min(a, b, c, c2) <= 0:
        raise DomainError("log_appell_f4 needs positive a, b, c, c2")
    w, z = np.broadcast_arrays(np.asarray(w, float), np.asarray(z, float))
    shape = w.shape
    w = w.ravel().copy()
    z = z.ravel().copy()
    if np.any(w < 0) or np.any(z < 0):
        raise DomainError("log_appell_f4 needs w, z >= 0")
    r = np.sqrt(w) + np.sqrt(z)
    if np.any(~(r < 1)):
        raise DomainError(
            f"F4 requires |sqrt(w)|+|sqrt(z)| < 1, got max {np.nanmax(r)!r}"
        )
    reducible = a == b and math.isclose(c, a - 1.0, rel_tol=1e-15, abs_tol=1e-15)
    if method == "auto":
        method = "jacobi" if reducible else "diagonal"
    if method == "jacobi":
        if not reducible:
            raise ValueError("the jacobi scheme needs b == a and c == a - 1")
        return _log_f4_jacobi(a, c2, w, z, rel_tol, max_terms).reshape(shape)
    if method != "diagonal":
        raise ValueError(f"unknown method {method!r}")
    return _log_f4_diagonal(a, b, c, c2, w, z, rel_tol, max_terms).reshape(shape)


def _log_f4_jacobi(a, c2, w, z, rel_tol, max_terms):
    """log F4(a, a; a - 1, c2; w, z) from its single sum over the z index.

    Euler's transformation turns every inner 2F1(a + m, a + m; a - 1; w) into
    (1 - w)^(-a - 1 - 2m) 2F1(-m - 1, -m - 1; a - 1; w), a polynomial that is
    a rescaled Jacobi polynomial P^(a-2, 0)_{m+1}((1 + w) / (1 - w)).  Its
    successive ratios follow the forward three-term recurrence, which is
    stable because the argument exceeds 1.  The sum becomes

        F4 = (1 - w)^(-a - 1) sum_m (a)_m^2 / (m! (c2)_m) Z^m y_{m+1},

    with Z = z / (1 - w)^2 and y_n = 2F1(-n, -n; a - 1; w); all terms are
    positive and decay at least as fast as the anti-diagonals of the double
    series.
    """
    out = np.empty(w.size)
    idx = np.arange(w.size)
    al = a - 2.0
    x = (1.0 + w) / (1.0 - w)
    zq = z / (1.0 - w)
    # ratio P_n / P_{n-1} at n = 1, term m = 0 and running sum
    ratio = (al + 1.0) + 0.5 * (al + 2.0) * (x - 1.0)
    term = 1.0 + w / (a - 1.0)
    total = term.copy()
    batch = np.empty((w.size, _BATCH))
    for m in range(1, int(max_terms)):
        n = m + 1.0
        den = 2 * n * (n + al) * (2 * n + al - 2)
        ca = (2 * n + al - 1) * (2 * n + al) * (2 * n + al - 2) / den
        cb = (2 * n + al - 1) * al * al / den
        cc = 2 * (n + al - 1) * (n - 1) * (2 * n + al) / den
        ratio = ca * x + cb - cc / ratio
        term = term * ratio
        term *= zq * ((a + m - 1) ** 2 / (m * (c2 + m - 1)) * n / (n + al))
        total += term
        batch[:, m % _BATCH] = term
        if m % _BATCH != _BATCH - 1:
            continue
        # terms are monotone in the tail, so checking the batch end suffices
        done = np.all(batch[:, -_N_SMALL:] < rel_tol * total[:, None], axis=1)
        if done.any():
            out[idx[done]] = np.log(total[done]) - (a + 1.0) * np.log1p(-w[done])
            keep = ~done
            if not keep.any():
                if not np.all(np.isfinite(out)):
                    raise SeriesConvergenceError("F4 jacobi scheme overflowed")
                return out
            idx, w, x, zq = idx[keep], w[keep], x[keep], zq[keep]
            ratio, term, total = ratio[keep], term[keep], total[keep]
            batch = np.empty((idx.size, _BATCH))
    raise SeriesConvergenceError(
        f"F4({a}, {a}; {a - 1}, {c2}) not converged within {max_terms} terms "
        f"for {idx.size} arguments, e.g. w={w[0]!r}, z={zq[0] * (1 - w[0])!r}"
    )


def _log_f4_diagonal(a, b, c, c2, w, z, rel_tol, max_terms):
    shape = w.shape
    out = np.empty(w.size)
    idx = np.arange(w.size)
    diag = np.ones((w.size, 1))
    total = np.ones(w.size)
    logscale = np.zeros(w.size)
    with np.errstate(divide="ignore", invalid="ignore"):
        lwz = np.log(w) - np.log(z)
    # step factors 1/(k(c+k-1)) and 1/(m(c2+m-1)) and their logs, grown on demand
    gw = gz = lgw = lgz = np.empty(0)
    batch = np.empty((w.size, _BATCH))
    for n in range(int(max_terms)):
        if gw.size < n + 2:
            j = np.arange(1.0, 2 * (n + 2) + 64)
            gw = np.concatenate(([np.nan], 1.0 / (j * (c + j - 1.0))))
            gz = np.concatenate(([np.nan], 1.0 / (j * (c2 + j - 1.0))))
            lgw, lgz = np.log(gw), np.log(gz)
        # Entry j of diagonal n holds T(j, n - j).  Each new term is reached
        # from the parent with the smaller step ratio, so no term is ever
        # amplified from an underflowed (floor-stuck subnormal) parent.
        pn = (a + n) * (b + n)
        new = np.empty((idx.size, n + 2))
        np.multiply(diag, gz[n + 1 : 0 : -1], out=new[:, : n + 1])
        new[:, : n + 1] *= (pn * z)[:, None]
        step_w = diag * gw[1 : n + 2]
        step_w *= (pn * w)[:, None]
        new[:, n + 1] = step_w[:, n]
        if n > 0:
            # the w-step has the smaller ratio from position j* on
            use_w = (lgz[n:0:-1] - lgw[1 : n + 1])[None, :] >= lwz[:, None]
            np.copyto(new[:, 1 : n + 1], step_w[:, :n], where=use_w)
        if n % 32 == 31:
            new[new < 1e-290 * new.max(axis=1, keepdims=True)] = 0.0
        new.sum(axis=1, out=batch[:, n % _BATCH])
        diag = new
        if n % _BATCH != _BATCH - 1:
            continue
        # convergence and rescaling are checked once per batch of diagonals
        cum = total[:, None] + np.cumsum(batch, axis=1)
        total = cum[:, -1]
        done = np.all(batch[:, -_N_SMALL:] < rel_tol * cum[:, -_N_SMALL:], axis=1)
        big = total > 1e250
        if big.any():
            diag[big] /= total[big, None]
            logscale[big] += np.log(total[big])
            total[big] = 1.0
        if done.any():
            out[idx[done]] = np.log(total[done]) + logscale[done]
            keep = ~done
            if not keep.any():
                return out.reshape(shape)
            idx, w, z, lwz = idx[keep], w[keep], z[keep], lwz[keep]
            total, logscale, diag = total[keep], logscale[keep], diag[keep]
            batch = np.empty((idx.size, _BATCH))
    raise SeriesConvergenceError(
        f"F4({a}, {b}; {c}, {c2}) not converged within {max_terms} diagonals "
        f"for {idx.size} arguments, e.g. w={w[0]!r}, z={z[0]!r}"
    )


@dataclass(frozen=True)
class KdFSpec:
    """Parameter lists of a Kampe de Feriet function.

    ``a_list``/``e_list`` carry Pochhammers indexed by k+m, ``b_list``/
    ``g_list`` by k and ``c_list``/``h_list`` by m (numerators / denominators).
    Repeated parameters must be listed once per occurrence.
    """

    a_list: Sequence[float] = field(default_factory=tuple)
    b_list: Sequence[float] = field(default_factory=tuple)
    c_list: Sequence[float] = field(default_factory=tuple)
    e_list: Sequence[float] = field(default_factory=tuple)
    g_list: Sequence[float] = field(default_factory=tuple)
    h_list: Sequence[float] = field(default_factory=tuple)

    def __post_init__(self):
        for name in ("a_list", "b_list", "c_list", "e_list", "g_list", "h_list"):
            object.__setattr__(self, name, tuple(float(v) for v in getattr(self, name)))


class _LogPoch:
    """Incrementally extended log|prod_j (p_j)_n| - log|prod_j (q_j)_n| with sign."""

    def __init__(self, num, den, factorial: bool):
        self.num, self.den, self.factorial = num, den, factorial
        self.log = [0.0]
        self.sign = [1.0]

    def extend(self):
        n = len(self.log) - 1
        lg, sg = self.log[-1], self.sign[-1]
        for p in self.num:
            v = p + n
            if v == 0.0 or sg == 0.0:
                lg, sg = -math.inf, 0.0
            else:
                lg += math.log(abs(v))
                sg *= math.copysign(1.0, v)
        for q in self.den:
            v = q + n
            if v == 0.0:
                if sg != 0.0:
                    raise DomainError(
                        f"Kampe de Feriet denominator parameter {q} hits zero"
                    )
                continue
            if sg != 0.0:
                lg -= math.log(abs(v))
                sg *= math.copysign(1.0, v)
        if self.factorial and sg != 0.0:
            lg -= math.log(n + 1)
        self.log.append(lg)
        self.sign.append(sg)


def kampe_de_feriet(spec: KdFSpec, x: float, y: float,
                    ctrl: SeriesControl = DEFAULT_CONTROL) -> float:
    """Two-variable Kampe de Feriet series, summed by anti-diagonals."""
    joint = _LogPoch(spec.a_list, spec.e_list, factorial=False)
    first = _LogPoch(spec.b_list, spec.g_list, factorial=True)
    second = _LogPoch(spec.c_list, spec.h_list, factorial=True)
    lx = math.log(abs(x)) if x != 0 else -math.inf
    ly = math.log(abs(y)) if y != 0 else -math.inf
    sx = -1.0 if x < 0 else 1.0
    sy = -1.0 if y < 0 else 1.0

    acc = _ScaledSum(0.0, 1.0)
    small = 0
    for n in range(1, int(ctrl.max_terms) + 1):
        joint.extend()
        first.extend()
        second.extend()
        k = np.arange(n + 1)
        lb = np.asarray(first.log)
        sb = np.asarray(first.sign)
        lc = np.asarray(second.log)[::-1]
        sc = np.asarray(second.sign)[::-1]
        with np.errstate(invalid="ignore"):
            logt = joint.log[n] + lb + lc
            logt = logt + np.where(k > 0, k * lx, 0.0) + np.where(k < n, (n - k) * ly, 0.0)
        sign = joint.sign[n] * sb * sc * np.where(k % 2 == 1, sx, 1.0) \
            * np.where((n - k) % 2 == 1, sy, 1.0)
        ok = (sign != 0) & np.isfinite(logt)
        if ok.any():
            top = float(logt[ok].max())
            diag = float(np.sum(sign[ok] * np.exp(logt[ok] - top)))
            if diag != 0.0:
                t = acc.add(top + math.log(abs(diag)), math.copysign(1.0, diag))
            else:
                t = 0.0
        else:
            t = 0.0
        if abs(t) < ctrl.rel_tol * abs(acc.acc):
            small += 1
            if small >= _N_SMALL:
                sgn, logv = acc.log_value()
                return sgn * math.exp(logv)
        else:
            small = 0
    raise SeriesConvergenceError(
        f"Kampe de Feriet series {spec} not converged at x={x}, y={y} "
        f"within {ctrl.max_terms} diagonals"
    )


def log_bessel_i(order: float, x: float) -> float:
    """log I_order(x) from the ascending power series, summed in log space."""
    if x < 0:
        raise DomainError(f"bessel_i needs x >= 0, got {x}")
    if x == 0:
        if order == 0:
            return 0.0
        if order > 0 or float(order).is_integer():
            return -math.inf
        raise DomainError(f"I_{order}(0) is infinite")
    kmax = int(x / 2 + 12 * math.sqrt(x + 1) + 60)
    k = np.arange(kmax + 1, dtype=float)
    g = k + order + 1
    sgn = gammasgn(g)
    logt = (2 * k + order) * math.log(x / 2) - gammaln(k + 1) - gammaln(g)
    nz = sgn != 0
    val, s = logsumexp(logt[nz], b=sgn[nz], return_sign=True)
    if s <= 0:
        raise DomainError(f"log I_{order}({x}) undefined (nonpositive value)")
    return float(val)


def bessel_i(order: float, x: float) -> float:
    """Modified Bessel function of the first kind, I_order(x)."""
    lv = log_bessel_i(order, x)
    if lv > 709.0:
        raise OverflowError(f"I_{order}(x) overflows at x={x}")
    return math.exp(lv)


# ---------------------------------------------------------------------------
# regularized incomplete beta and its inverse

_SERIES_BUDGET = 400


def _beta_series(x, p, q, rel_tol, budget):
    """Euler-transformed hypergeometric form, positive terms.

    I_x(p, q) = x^p (1-x)^q / (p B(p, q)) * sum_k (p+q)_k/(p+1)_k x^k.
    Returns (value, converged mask).
    """
    term = np.ones_like(x)
    total = np.ones_like(x)
    small = np.zeros(x.shape, dtype=np.int64)
    for k in range(budget):
        term = term * (p + q + k) * x / (p + 1 + k)
        total = total + term
        small = np.where(term < rel_tol * total, small + 1, 0)
        if np.all(small >= _N_SMALL):
            break
    with np.errstate(divide="ignore"):
        logpre = p * np.log(x) + q * np.log1p(-x) - np.log(p) - betaln(p, q)
    return np.exp(logpre) * total, small >= _N_SMALL


def _beta_cf(x, p, q, rel_tol=1e-15, max_iter=20000):
    """Continued fraction for I_x(p, q) (modified Lentz), vectorised."""
    tiny = 1e-300
    qab, qap, qam = p + q, p + 1.0, p - 1.0
    c = np.ones_like(x)
    d = 1.0 - qab * x / qap
    d = np.where(np.abs(d) < tiny, tiny, d)
    d = 1.0 / d
    h = d.copy()
    done = np.zeros(x.shape, dtype=bool)
    for m in range(1, max_iter + 1):
        m2 = 2 * m
        aa = m * (q - m) * x / ((qam + m2) * (p + m2))
        d = 1.0 + aa * d
        d = np.where(np.abs(d) < tiny, tiny, d)
        c = 1.0 + aa / c
        c = np.where(np.abs(c) < tiny, tiny, c)
        d = 1.0 / d
        h = np.where(done, h, h * d * c)
        aa = -(p + m) * (qab + m) * x / ((p + m2) * (qap + m2))
        d = 1.0 + aa * d
        d = np.where(np.abs(d) < tiny, tiny, d)
        c = 1.0 + aa / c
        c = np.where(np.abs(c) < tiny, tiny, c)
        d = 1.0 / d
        delta = d * c
        h = np.where(done, h, h * delta)
        done |= np.abs(delta - 1.0) < rel_tol
        if done.all():
            break
    else:
        raise SeriesConvergenceError("incomplete beta continued fraction did not converge")
    with np.errstate(divide="ignore"):
        logpre = p * np.log(x) + q * np.log1p(-x) - np.log(p) - betaln(p, q)
    return np.exp(logpre) * h


def _inc_beta_lower(x, p, q, rel_tol):
    val, ok = _beta_series(x, p, q, rel_tol, _SERIES_BUDGET)
    if not ok.all():
        bad = ~ok
        val = val.copy()
        val[bad] = _beta_cf(x[bad], p[bad], q[bad])
    return val


def reg_inc_beta(y, xi, delta, rel_tol: float = 1e-15):
    """Regularized incomplete beta I_y(xi, delta), normalised so I_1 = 1.

    Scalars or broadcastable arrays.  Arguments above the mean-like split
    point ``(xi+1)/(xi+delta+2)`` use I_y(xi, delta) = 1 - I_{1-y}(delta, xi),
    which keeps the series ratio below one from the first term.
    """
    y, xi, delta = np.broadcast_arrays(
        np.asarray(y, float), np.asarray(xi, float), np.asarray(delta, float)
    )
    shape = y.shape
    y, xi, delta = (np.atleast_1d(v).astype(float).ravel() for v in (y, xi, delta))
    if np.any((y < 0) | (y > 1) | np.isnan(y)):
        raise DomainError("reg_inc_beta needs 0 <= y <= 1")
    if np.any(~(xi > 0)) or np.any(~(delta > 0)):
        raise DomainError("reg_inc_beta needs xi > 0 and delta > 0")
    out = np.empty_like(y)
    out[y == 0] = 0.0
    out[y == 1] = 1.0
    inner = (y > 0) & (y < 1)
    lower = inner & (y < (xi + 1) / (xi + delta + 2))
    upper = inner & ~lower
    if lower.any():
        out[lower] = _inc_beta_lower(y[lower], xi[lower], delta[lower], rel_tol)
    if upper.any():
        out[upper] = 1.0 - _inc_beta_lower(1.0 - y[upper], delta[upper], xi[upper], rel_tol)
    out = np.clip(out, 0.0, 1.0)
    if len(shape) == 0:
        return float(out[0])
    return out.reshape(shape)


def _beta_logpdf(y, xi, delta):
    with np.errstate(divide="ignore"):
        return (xi - 1) * np.log(y) + (delta - 1) * np.log1p(-y) - betaln(xi, delta)


def beta_quantile(p, xi, delta, tol: float = 1e-12, max_iter: int = 200):
    """Inverse of :func:`reg_inc_beta` in its first argument.

    Safeguarded Newton iteration inside a shrinking bisection bracket.
    """
    p_arr, xi_arr, d_arr = np.broadcast_arrays(
        np.asarray(p, float), np.asarray(xi, float), np.asarray(delta, float)
    )
    shape = p_arr.shape
    p_arr, xi_arr, d_arr = (np.atleast_1d(v).ravel().astype(float) for v in (p_arr, xi_arr, d_arr))
    if np.any((p_arr < 0) | (p_arr > 1) | np.isnan(p_arr)):
        raise DomainError("beta_quantile needs 0 <= p <= 1")
    if np.any(~(xi_arr > 0)) or np.any(~(d_arr > 0)):
        raise DomainError("beta_quantile needs xi > 0 and delta > 0")

    out = np.where(p_arr >= 1.0, 1.0, 0.0)
    todo = np.flatnonzero((p_arr > 0) & (p_arr < 1))
    if todo.size:
        pp, a, b = p_arr[todo], xi_arr[todo], d_arr[todo]
        # upper half through I_y(a, b) = 1 - I_{1-y}(b, a), so quantiles near 1
        # are resolved in their distance to 1
        upper = pp > 0.5
        pp = np.where(upper, 1.0 - pp, pp)
        a, b = np.where(upper, b, a), np.where(upper, a, b)
        lo = np.zeros_like(pp)
        hi = np.ones_like(pp)
        x = np.clip(a / (a + b), 1e-3, 1 - 1e-3)
        active = np.ones(pp.size, dtype=bool)
        for _ in range(max_iter):
            ia = np.flatnonzero(active)
            if ia.size == 0:
                break
            xa = x[ia]
            f = reg_inc_beta(xa, a[ia], b[ia]) - pp[ia]
            lo[ia] = np.where(f < 0, xa, lo[ia])
            hi[ia] = np.where(f > 0, xa, hi[ia])
            with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
                dens = np.exp(_beta_logpdf(xa, a[ia], b[ia]))
                newton = xa - f / dens
            mid = 0.5 * (lo[ia] + hi[ia])
            ok = np.isfinite(newton) & (newton > lo[ia]) & (newton < hi[ia])
            xn = np.where(ok, newton, mid)
            xn = np.where(f == 0, xa, xn)
            step = np.abs(xn - xa)
            x[ia] = xn
            # relative criterion so that tiny quantiles (small p, xi < 1) resolve
            scale = np.maximum(np.abs(xn), 1e-300)
            conv = (step < tol * scale) | (hi[ia] - lo[ia] < tol * scale) | (f == 0)
            active[ia[conv]] = False
        out[todo] = np.where(upper, 1.0 - x, x)
    if len(shape) == 0:
        return float(out[0])
    return out.reshape(shape)
