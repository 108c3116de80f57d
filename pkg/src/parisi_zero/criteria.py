"""Scalar criterion functions and landmark roots.

Everything the phase logic consults lives here: the tilt equation c(z),
the one-level test function zeta, the asymptotic slope Psi, the two
quadratics in lambda whose roots organize the phase diagram, the four
window functions h11/h21/h12/h22 with their common core f1/f2, the
auxiliary polynomials, and the landmark roots cut out of them.

Numerical backbone: each h-function is a rational-log expression whose
raw form loses every digit as x -> 1 because numerator and denominator
share powers of (1 - x). Instead of switching to local expansions near
the endpoint, all expressions are assembled from exact divided
differences of xi at 1 (Horner-evaluated partial geometric sums), which
remain O(1) and exact arbitrarily close to x = 1. The identities tying
the h's to f1/f2 then hold by construction, not by transcription.

All functions accept scalars or ndarrays in x and are pure.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .mixture import Mixture, xi_deriv

__all__ = [
    "Landmarks",
    "QuadraticRoots",
    "c_log",
    "solve_z",
    "zeta",
    "psi",
    "lambda_stars",
    "s_roots",
    "eval_h1",
    "eval_h2",
    "eval_aux",
    "f12",
    "landmarks",
]


@dataclass(frozen=True)
class Landmarks:
    """Root landmarks of the window functions, None when absent.

    qbar1/qbar2 bound the interval where the first window function
    decreases; the four q's are the zeros of h11, h12, h21, h22 used by
    the two-level and full-type constructions.
    """

    qbar1: float | None = None
    qbar2: float | None = None
    q11: float | None = None
    q12: float | None = None
    q21: float | None = None
    q22: float | None = None


@dataclass(frozen=True)
class QuadraticRoots:
    """A quadratic a*lam**2 + b*lam + c with its real roots, if any.

    ``roots`` is an ordered pair present only when the discriminant is
    strictly positive (tangencies count as no roots). ``shortcut`` is a
    compact printed form of the discriminant kept for diagnostics; the
    sign decision always uses b*b - 4*a*c itself.
    """

    a: float
    b: float
    c: float
    roots: tuple[float, float] | None = None
    shortcut: float | None = None


# ---------------------------------------------------------------------------
# exact divided-difference kernels
#
# gsum(n, x) = sum_{j<n} x^j            (1 - x^n) / (1 - x)
# wsum(n, x) = sum_{i<n} (i+1) x^i      d/dx of gsum(n+1)
# hsum(n, x) = sum_{m<=n-2} (n-1-m) x^m second-order difference weights
# ---------------------------------------------------------------------------


def _gsum(n, x):
    if n <= 0:
        return 0.0 * x
    acc = 0.0 * x
    for _ in range(n):
        acc = acc * x + 1.0
    return acc


def _wsum(n, x):
    if n <= 0:
        return 0.0 * x
    acc = 0.0 * x
    for i in range(n - 1, -1, -1):
        acc = acc * x + (i + 1)
    return acc


def _hsum(n, x):
    if n <= 1:
        return 0.0 * x
    acc = 0.0 * x
    for mm in range(n - 2, -1, -1):
        acc = acc * x + (n - 1 - mm)
    return acc


def _d1(m, x):
    # (xi'(1) - xi'(x)) / (1 - x), exact; equals xi''(1) at x=1
    lam, mu = m.lam, 1.0 - m.lam
    return m.p * lam * _gsum(m.p - 1, x) + m.s * mu * _gsum(m.s - 1, x)


def _d2(m, x):
    # (D1(x) - xi''(x)) / (1 - x); equals xi'''(1)/2 at x=1
    lam, mu = m.lam, 1.0 - m.lam
    return m.p * lam * _wsum(m.p - 2, x) + m.s * mu * _wsum(m.s - 2, x)


def _afun(m, x):
    # (1 - xi(x)) / (1 - x)
    lam, mu = m.lam, 1.0 - m.lam
    return lam * _gsum(m.p, x) + mu * _gsum(m.s, x)


def _bfun(m, x):
    # (xi'(x) - A(x)) / (x - 1); equals xi''(1)/2 at x=1
    lam, mu = m.lam, 1.0 - m.lam
    return lam * _wsum(m.p - 1, x) + mu * _wsum(m.s - 1, x)


def _d12(m, x):
    # (xi''(1) - xi''(x)) / (1 - x)
    lam, mu = m.lam, 1.0 - m.lam
    return (m.p * (m.p - 1) * lam * _gsum(m.p - 2, x)
            + m.s * (m.s - 1) * mu * _gsum(m.s - 2, x))


def _d1r(m, x):
    # (xi''(1) - D1(x)) / (1 - x)
    lam, mu = m.lam, 1.0 - m.lam
    return m.p * lam * _hsum(m.p - 1, x) + m.s * mu * _hsum(m.s - 1, x)


def _tau(m, x):
    # t(x) / (1 - x)^2 with t as in eval_aux; exact, no cancellation at x=1
    a = xi_deriv(m, 1.0, 1)
    return _d1(m, x) ** 2 + a * (_d1r(m, x) - _d12(m, x) - xi_deriv(m, x, 2))


def _windows(m, x):
    wa = xi_deriv(m, 1.0, 1) * x / xi_deriv(m, x, 1)
    wb = _d1(m, x) / xi_deriv(m, x, 2)
    return wa, wb


# ---------------------------------------------------------------------------
# tilt equation
# ---------------------------------------------------------------------------


def c_log(z):
    """c(z) = (1+z) log(1+z) / z^2 - 1/z, the strictly decreasing tilt map.

    Defined on z > -1 with c(-1+) = 1, c(0) = 1/2, c(inf) = 0. Where |z| is
    below 1e-4 the direct form cancels, so a degree-4 series takes over
    (both branches agree to ~1e-11 at the seam).
    """
    z = np.asarray(z, dtype=float)
    if np.any(z <= -1):
        raise ValueError("c_log requires z > -1")
    series = 0.5 - z / 6 + z * z / 12 - z ** 3 / 20 + z ** 4 / 30
    with np.errstate(divide="ignore", invalid="ignore"):
        direct = (1 + z) * np.log1p(z) / (z * z) - 1 / z
    out = np.where(np.abs(z) < 1e-4, series, direct)
    return float(out) if out.ndim == 0 else out


def _c_prime(z):
    z = np.asarray(z, dtype=float)
    series = -1.0 / 6 + z / 6 - 3 * z * z / 20 + 2 * z ** 3 / 15
    with np.errstate(divide="ignore", invalid="ignore"):
        direct = (2 * z - (2 + z) * np.log1p(z)) / z ** 3
    out = np.where(np.abs(z) < 1e-4, series, direct)
    return float(out) if out.ndim == 0 else out


def _c_inv(y):
    # unique z > 0 with c(z) = y, for y in (0, 1/2)
    if not 0.0 < y < 0.5:
        raise ValueError(f"c_inv needs y in (0, 1/2), got {y}")
    hi = 1.0
    while c_log(hi) > y:
        hi *= 2
    z = brentq(lambda t: c_log(t) - y, 0.0, hi, xtol=1e-15, rtol=8.9e-16)
    # one Newton step tightens the residual to the floor
    z -= (c_log(z) - y) / _c_prime(z)
    return z


def solve_z(m: Mixture) -> float:
    """The tilt z >= 0 solving c(z) = 1/xi'(1); exactly 0 when xi'(1) <= 2."""
    a = xi_deriv(m, 1.0, 1)
    if a <= 2.0:
        return 0.0
    return _c_inv(1.0 / a)


# ---------------------------------------------------------------------------
# pointwise criteria
# ---------------------------------------------------------------------------


def _zeta_at(m: Mixture, x, z: float):
    a = xi_deriv(m, 1.0, 1)
    x1 = xi_deriv(m, x, 1)
    return (xi_deriv(m, x) + x1 * (1 - x) + x1 / z
            - (1 + z) * a / z ** 2 * np.log1p(z * x1 / a))


def zeta(m: Mixture, x):
    """One-level optimality gap; the model is one-step iff max zeta <= 0.

    Vanishes identically at both endpoints (at 0 because xi(0)=xi'(0)=0,
    at 1 by the defining equation of z), so callers test the interior
    maximum against a small positive floor, never strict negativity.
    """
    z = solve_z(m)
    if z == 0.0:
        raise ValueError("zeta degenerates at z = 0 (replica-symmetric model)")
    return _zeta_at(m, x, z)


def psi(p: int, s: int, lam: float) -> float:
    """Common x -> 1 limit of the first window functions h11 and h12.

    Its sign at specific roots in lambda decides which regime a (p, s)
    family belongs to.
    """
    a = lam * p + (1 - lam) * s
    b = lam * p * (p - 1) + (1 - lam) * s * (s - 1)
    return -(a - 1) / b - np.log(b / a) + 1 - 2 / a + b / a ** 2


def _q_coeffs(p, s):
    a = (s - p) ** 2 * (s * s - 3 * s + 2 + p * p + 3 * p * s - 3 * p)
    b = -s * (s - p) * (2 * s * s - 6 * s + 4 - p * p + 3 * p * s - 3 * p)
    c = s * s * (s - 1) * (s - 2)
    return float(a), float(b), float(c)


def _quad_roots(a, b, c):
    # stable quadratic roots, ordered; None unless two distinct real roots
    disc = b * b - 4 * a * c
    if a == 0.0 or disc <= 0.0:
        return None
    q = -0.5 * (b + np.copysign(np.sqrt(disc), b))
    r1, r2 = q / a, c / q
    return (r1, r2) if r1 < r2 else (r2, r1)


def lambda_stars(p: int, s: int) -> QuadraticRoots:
    """The lambda-quadratic whose roots bracket the Psi sign change.

    The compact discriminant s^2 - 6(p-1)s + (p-1)(p+7) is attached as a
    diagnostic; the root decision uses the exact b^2 - 4ac.
    """
    a, b, c = _q_coeffs(p, s)
    shortcut = float(s * s - 6 * (p - 1) * s + (p - 1) * (p + 7))
    return QuadraticRoots(a, b, c, roots=_quad_roots(a, b, c), shortcut=shortcut)


def _s_coeffs(p, s):
    c2 = p ** 3 * (p - 1) ** 2 * (p - 2)
    c0 = s ** 3 * (s - 1) ** 2 * (s - 2)
    cx = -2 * p * (p - 1) * s * (s - 1) * (
        (p - 2) * (p - 3) + (s - 2) * (s - 3) - 3 * (p - 2) * (s - 2))
    # c0 (1-lam)^2 + c2 lam^2 + cx lam (1-lam), expanded in lam
    return float(c0 + c2 - cx), float(-2 * c0 + cx), float(c0)


def s_of(p: int, s: int, lam: float) -> float:
    """3 xi'''(1)^2 - 2 xi''(1) xi''''(1) as a quadratic in lambda."""
    a, b, c = _s_coeffs(p, s)
    return (a * lam + b) * lam + c


def s_roots(p: int, s: int) -> QuadraticRoots:
    """Roots of the full-type onset quadratic (smaller root first)."""
    a, b, c = _s_coeffs(p, s)
    shortcut = float(s * s - 6 * (p - 1) * s + (p - 1) * (p + 7)
                     + 2 * (p - 2) * (s - 2))
    return QuadraticRoots(a, b, c, roots=_quad_roots(a, b, c), shortcut=shortcut)


def f12(m: Mixture, q, z2):
    """The two-level stationarity pair (f1, f2) at overlap q and tilt z2.

    f2's z2-dependence enters only through c_log, so its z2 -> 0 limit is
    finite and the strict monotonicity of c transfers to f2.
    """
    if np.any(np.asarray(q) <= 0.0) or np.any(np.asarray(q) >= 1.0):
        raise ValueError(f"q must lie in (0, 1), got {q}")
    if np.any(np.asarray(z2) <= -1.0):
        raise ValueError(f"z2 must exceed -1, got {z2}")
    xq = xi_deriv(m, q)
    x1 = xi_deriv(m, q, 1)
    d1 = _d1(m, q)
    f2 = (1 - q) ** 2 * (d1 * c_log(z2) - _bfun(m, q))
    lam, mu = m.lam, 1.0 - m.lam
    # q xi'(q) - xi(q), assembled term-by-term so it vanishes cleanly at 0
    qxp = lam * (m.p - 1) * q ** m.p + mu * (m.s - 1) * q ** m.s
    f1 = (-qxp * (1 + z2) / d1
          - q * q * np.log(q * d1 / ((1 + z2) * x1))
          + q * q - 2 * xq * q / x1
          + xq * q * q * d1 / ((1 + z2) * x1 ** 2))
    return f1, f2


def eval_h1(m: Mixture, x):
    """First window pair (h11, h21): f1/f2 at the tilt xi'(1)x/xi'(x) - 1."""
    wa = xi_deriv(m, 1.0, 1) * x / xi_deriv(m, x, 1)
    f1, f2 = f12(m, x, wa - 1.0)
    return f1 / (x * x), f2


def eval_h2(m: Mixture, x):
    """Second window pair (h12, h22): f1/f2 at the tilt D1(x)/xi''(x) - 1."""
    wb = _d1(m, x) / xi_deriv(m, x, 2)
    f1, f2 = f12(m, x, wb - 1.0)
    return f1 / (x * x), f2


def eval_aux(m: Mixture, x):
    """The auxiliary polynomials (t, m_cubic, t12), evaluated exactly.

    t < 0 marks the window where the first pair can cross; m_cubic's sign
    tracks the slope of h22; t12's sign at q1 certifies the density jump
    of the mixed constructions.
    """
    a = xi_deriv(m, 1.0, 1)
    x1 = xi_deriv(m, x, 1)
    x2 = xi_deriv(m, x, 2)
    x3 = xi_deriv(m, x, 3)
    t = a * x2 * x * (1 - x) - x1 * (a - x1)
    d1gap = a - x1
    m_cub = x3 * d1gap * (1 - x) - 2 * x2 * (d1gap - x2 * (1 - x))
    t12 = x * x1 * x3 - 2 * x2 * (x * x2 - x1)
    return t, m_cub, t12


# ---------------------------------------------------------------------------
# landmark roots
# ---------------------------------------------------------------------------


def _sign_roots(f, lo, hi, n=4096):
    """Roots of f on [lo, hi] by sign scan + bracket refinement.

    Tangency rule: a sign change counts only between grid values that both
    clear a noise floor tied to the function's scale; sub-floor values are
    bridged so a root landing on a grid point is still caught, while
    rounding noise (several criteria cancel identically at 0) cannot
    fabricate one. Tangential touches therefore resolve to "absent".
    """
    xs = np.linspace(lo, hi, n)
    vs = np.asarray(f(xs), dtype=float)
    eps = 1e-14 * max(1.0, float(np.abs(vs).max()))
    firm = np.nonzero(np.abs(vs) > eps)[0]
    roots = []
    for a, b in zip(firm[:-1], firm[1:]):
        if vs[a] * vs[b] < 0.0:
            roots.append(brentq(lambda t: float(f(t)), xs[a], xs[b],
                                xtol=1e-14, rtol=8.9e-16))
    return roots


def _edge_root(f, lo):
    """A root collapsed against x = 1, below the sign scan's firmness floor.

    Within ~4e-4 of the collapse every value past the root is smaller than
    the scan floor, but the criteria evaluate cancellation-free near 1, so
    the sign stays exact down to ~1e-30; walk a geometric ladder toward 1
    and hand the first sign disagreement to brentq.
    """
    a, fa = lo, float(f(lo))
    for k in range(2, 9):
        x = 1.0 - 10.0 ** -k
        if x <= a:
            continue
        fx = float(f(x))
        if fa != 0.0 and fx != 0.0 and (fa > 0.0) != (fx > 0.0):
            return brentq(lambda t: float(f(t)), a, x,
                          xtol=1e-14, rtol=8.9e-16)
        a, fa = x, fx
    return None


def landmarks(m: Mixture, eps: float = 1e-12) -> Landmarks:
    """Locate the landmark roots; absent landmarks come back as None.

    qbar1/qbar2 are the sign changes of t in (0, 1); exactly one genuine
    change means t stays negative up to 1, so qbar2 := 1 (t(1) itself can
    read as +noise at the knife edge where the lambda-quadratic has a
    root). The h-roots are then isolated inside (qbar1, qbar2) following
    the case split on qbar2 and, for h22 with qbar2 = 1, on the sign of
    the full-type onset quadratic.
    """
    tb = _sign_roots(lambda x: _tau(m, x), 1e-9, 1 - 1e-9)
    if not tb:
        return Landmarks()
    qbar1 = tb[0]
    qbar2 = tb[1] if len(tb) >= 2 else 1.0
    h11 = lambda x: eval_h1(m, x)[0]
    h21 = lambda x: eval_h1(m, x)[1]
    h12 = lambda x: eval_h2(m, x)[0]
    h22 = lambda x: eval_h2(m, x)[1]
    hi_in = qbar2 - eps if qbar2 < 1 else 1 - 1e-9
    q11 = q12 = q21 = q22 = None
    if h11(hi_in if qbar2 == 1.0 else qbar2) > 0:
        r = _sign_roots(h11, qbar1 + eps, hi_in)
        if r:
            q11 = r[0]
        r = _sign_roots(h12, qbar1 + eps, hi_in)
        if r:
            q12 = r[0]
    if h21(qbar1) > 0:
        if qbar2 < 1:
            r = _sign_roots(h21, qbar1 + eps, qbar2 - eps)
            if r:
                q21 = r[-1]
            r = _sign_roots(h22, qbar1 + eps, qbar2 - eps)
            if r:
                q22 = r[-1]
        else:
            q21 = 1.0
            if s_of(m.p, m.s, m.lam) > 0:
                r = _sign_roots(h22, qbar1 + eps, 1 - 1e-7)
                if r:
                    q22 = r[-1]
                else:
                    q22 = _edge_root(h22, qbar1 + eps)
                    if q22 is None:
                        q22 = 1.0
            else:
                q22 = 1.0
    return Landmarks(qbar1=qbar1, qbar2=qbar2, q11=q11, q12=q12, q21=q21, q22=q22)
