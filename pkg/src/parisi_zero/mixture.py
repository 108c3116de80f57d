"""Two-term covariance mixtures and their derivatives.

The whole package works with the one-parameter family

    xi(x) = lam * x**p + (1 - lam) * x**s,   2 <= p <= s, lam in [0, 1],

normalized so xi(1) = 1. Everything downstream (criterion functions,
measure constructions, energies) consumes xi and its first four
derivatives through :func:`xi_deriv`, which evaluates the exact
polynomial with falling-factorial coefficients. No floating-point
`pow` of non-integer exponents is ever involved, so values are
bit-reproducible across platforms.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["Mixture", "make_mixture", "xi_deriv"]


@dataclass(frozen=True)
class Mixture:
    """Validated mixture. Build through :func:`make_mixture`.

    ``is_pure`` marks single-term models (p == s after canonicalization);
    ``exponent`` is the effective exponent in that case and None otherwise.
    """

    p: int
    s: int
    lam: float
    is_pure: bool = False
    exponent: int | None = None


def _as_int(name, value):
    # accept ints and integer-valued floats, nothing else
    if isinstance(value, bool):
        raise ValueError(f"{name} must be an integer, got bool")
    iv = int(value)
    if iv != value:
        raise ValueError(f"{name} must be an integer, got {value!r}")
    return iv


def make_mixture(p, s, lam) -> Mixture:
    """Validate (p, s, lam) and canonicalize pure models.

    A pure model (p == s, or lam at an endpoint of [0, 1]) is stored as a
    single term with lam = 1, so downstream code can branch once on
    ``is_pure`` and never sees a zero-weight term.
    """
    p = _as_int("p", p)
    s = _as_int("s", s)
    lam = float(lam)
    if p < 2:
        raise ValueError(f"p must be >= 2, got {p}")
    if s < p:
        raise ValueError(f"s must be >= p, got s={s} < p={p}")
    if not 0.0 <= lam <= 1.0:
        raise ValueError(f"lambda must lie in [0, 1], got {lam}")
    if p == s or lam == 1.0:
        return Mixture(p, p, 1.0, is_pure=True, exponent=p)
    if lam == 0.0:
        return Mixture(s, s, 1.0, is_pure=True, exponent=s)
    return Mixture(p, s, lam)


def xi_deriv(m: Mixture, x, order: int = 0):
    """d^order xi / dx^order at x, exactly.

    x may be a scalar or an ndarray; the result matches its shape.
    Orders 0..4 only (that is all the theory ever uses). x must be
    nonnegative; the criteria probe slightly above 1, so no upper cap.
    """
    if order not in (0, 1, 2, 3, 4):
        raise ValueError(f"order must be in 0..4, got {order}")
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise ValueError("x must be >= 0")
    out = np.zeros_like(x)
    for n, w in ((m.p, m.lam), (m.s, 1.0 - m.lam)):
        if w == 0.0 or n - order < 0:
            continue
        c = w
        for i in range(order):
            c *= n - i
        out = out + c * x ** (n - order)
    if out.ndim == 0:
        return float(out)
    return out
