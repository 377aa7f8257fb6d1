"""
Incomplete and complete gamma functions.

The lower incomplete gamma uses the power series for ``x <= s + 1`` and the
Legendre continued fraction (modified Lentz) for the upper tail otherwise, so
that neither regime subtracts nearly equal numbers.
"""
import math

import numpy as np

from .exceptions import DomainError

#: smallest shape accepted; smaller shapes are rejected rather than approximated
MIN_SHAPE = 0.05

_EPS = 1e-16
_TINY = 1e-300
_MAX_ITER = 2000
# narrow intervals are integrated directly instead of differencing two gammas
_GL_X, _GL_W = np.polynomial.legendre.leggauss(24)


def _check(s, x=0.0):
    s = float(s)
    x = float(x)
    if not (math.isfinite(s) and math.isfinite(x)):
        raise DomainError(f"non-finite gamma argument (s={s}, x={x})")
    if s <= 0.0:
        raise DomainError(f"gamma shape must be positive, got s={s}")
    if s < MIN_SHAPE:
        raise DomainError(f"gamma shape s={s} below supported minimum {MIN_SHAPE}")
    if x < 0.0:
        raise DomainError(f"incomplete gamma argument must be >= 0, got x={x}")
    return s, x


def _log_prefactor(s, x):
    # log(x^s e^-x)
    return s * math.log(x) - x


def _series_sum(s, x):
    """Sum_{k>=0} x^k / (s (s+1) ... (s+k))."""
    term = 1.0 / s
    total = term
    ap = s
    for _ in range(_MAX_ITER):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * _EPS:
            return total
    raise ArithmeticError(f"gamma series did not converge (s={s}, x={x})")


def _continued_fraction(s, x):
    """Continued fraction F with Gamma(s, x) = x^s e^-x F (modified Lentz)."""
    b = x + 1.0 - s
    c = 1.0 / _TINY
    d = 1.0 / b
    h = d
    for i in range(1, _MAX_ITER):
        an = -i * (i - s)
        b += 2.0
        d = an * d + b
        if abs(d) < _TINY:
            d = _TINY
        c = b + an / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            return h
    raise ArithmeticError(f"gamma continued fraction did not converge (s={s}, x={x})")


def complete_gamma(a):
    """Gamma(a) for real a > 0."""
    a, _ = _check(a)
    return math.gamma(a)


def lower_incomplete_gamma(s, x):
    """Lower incomplete gamma ``gamma(s, x) = int_0^x t^(s-1) e^-t dt``.

    Not regularized. Raises :class:`DomainError` for ``s <= 0`` (or below
    :data:`MIN_SHAPE`), ``x < 0`` and non-finite input.
    """
    s, x = _check(s, x)
    if x == 0.0:
        return 0.0
    if x <= s + 1.0:
        return math.exp(_log_prefactor(s, x)) * _series_sum(s, x)
    return math.gamma(s) - math.exp(_log_prefactor(s, x)) * _continued_fraction(s, x)


def upper_tail_gamma(s, x):
    """``Gamma(s) - gamma(s, x)`` evaluated without cancellation for large x."""
    s, x = _check(s, x)
    if x == 0.0:
        return math.gamma(s)
    if x <= s + 1.0:
        return math.gamma(s) - math.exp(_log_prefactor(s, x)) * _series_sum(s, x)
    return math.exp(_log_prefactor(s, x)) * _continued_fraction(s, x)


def scaled_upper_tail_gamma(s, x):
    """``exp(x) * (Gamma(s) - gamma(s, x))``.

    Stays finite where both factors would over/underflow separately; the bound
    functions M and B need exactly this product.
    """
    s, x = _check(s, x)
    if x <= s + 1.0:
        return math.exp(x) * upper_tail_gamma(s, x)
    return math.exp(s * math.log(x)) * _continued_fraction(s, x)


def weighted_gamma_difference(s, x_lo, x_hi):
    """``exp(x_lo) * (gamma(s, x_hi) - gamma(s, x_lo))``; ``x_hi`` may be inf.

    Appears in every closed-form kernel integral ``int exp(-k t^2) t^-nu dt``
    normalised at the lower limit.
    """
    if x_hi == math.inf:
        return scaled_upper_tail_gamma(s, x_lo)
    width = x_hi - x_lo
    if x_lo > 0.0 and width <= min(1.0, 0.25 * x_lo):
        _check(s, x_lo)
        t = x_lo + 0.5 * width * (_GL_X + 1.0)
        f = np.exp((s - 1.0) * np.log(t) - (t - x_lo))
        return 0.5 * width * float(_GL_W @ f)
    if x_lo > s + 1.0:
        return scaled_upper_tail_gamma(s, x_lo) - \
            math.exp(x_lo - x_hi) * scaled_upper_tail_gamma(s, x_hi)
    return math.exp(x_lo) * gamma_difference(s, x_lo, x_hi)


def gamma_difference(s, x_lo, x_hi):
    """``gamma(s, x_hi) - gamma(s, x_lo)`` for ``0 <= x_lo <= x_hi``.

    When both arguments are in the tail the difference is taken between the
    upper tails, which keeps relative accuracy.
    """
    if x_lo > s + 1.0:
        return upper_tail_gamma(s, x_lo) - upper_tail_gamma(s, x_hi)
    return lower_incomplete_gamma(s, x_hi) - lower_incomplete_gamma(s, x_lo)
