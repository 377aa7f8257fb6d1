"""
Adaptive Gauss-Kronrod quadrature.

``integrate`` is a global adaptive G7/K15 scheme for scalar integrals, with a
geometrically graded split toward the left endpoint when the integrand has an
integrable power singularity there.  ``integrate_panels`` applies the same rule
to many panels at once (vectorized) and is what the kernel module uses to build
cumulative integrals on a profile grid.
"""
import heapq
import math
from dataclasses import dataclass

import numpy as np

from .exceptions import DomainError, QuadratureError
from .special import upper_tail_gamma

# Kronrod 15-point abscissae on [-1, 1] (non-negative half) and weights;
# the odd-indexed abscissae are the 7-point Gauss nodes.
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

# full 15-point abscissae / weights on [-1, 1], ascending
KRONROD_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
KRONROD_WEIGHTS = np.concatenate([_WGK[:-1], _WGK[::-1]])
_GAUSS_MASK = np.zeros(15, dtype=bool)
_GAUSS_MASK[[1, 3, 5, 7, 9, 11, 13]] = True
GAUSS_WEIGHTS = np.zeros(15)
GAUSS_WEIGHTS[_GAUSS_MASK] = np.concatenate([_WG[:3], [_WG[3]], _WG[2::-1]])


@dataclass(frozen=True)
class QuadOptions:
    abs_tol: float = 1e-11
    rel_tol: float = 1e-10
    max_depth: int = 60

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise DomainError("quadrature tolerances must be positive")
        if self.max_depth < 10:
            raise DomainError("max_depth must be at least 10")

    def target(self, value):
        return max(self.abs_tol, self.rel_tol * abs(value))


DEFAULT_QUAD = QuadOptions()


def _gk15(f, a, b):
    """Kronrod value and |K15 - G7| on [a, b] for scalar f."""
    center = 0.5 * (a + b)
    half = 0.5 * (b - a)
    x = center + half * KRONROD_NODES
    fx = np.asarray(f(x), dtype=float)
    if fx.shape != x.shape:
        fx = np.array([float(f(xi)) for xi in x])
    if not np.all(np.isfinite(fx)):
        raise QuadratureError(f"integrand not finite on [{a}, {b}]")
    kron = half * float(KRONROD_WEIGHTS @ fx)
    gauss = half * float(GAUSS_WEIGHTS @ fx)
    return kron, abs(kron - gauss)


def _graded_edges(a, b, ratio=0.5, min_frac=1e-15):
    """Edges a < ... < b refined geometrically toward a."""
    edges = [b]
    width = b - a
    while width > (b - a) * min_frac:
        width *= ratio
        edges.append(a + width)
    edges.append(a)
    return sorted(edges)


def integrate(f, a, b, opts=DEFAULT_QUAD, singular_at_a=None):
    """Integrate f over [a, b].

    Parameters
    ----------
    f : callable
        Integrand; called with a numpy array of abscissae (falls back to
        elementwise calls if it does not vectorize).
    a, b : float
        Finite limits with ``a <= b``.
    opts : QuadOptions
    singular_at_a : bool, optional
        Force (or suppress) the graded split toward ``a``.  By default it is
        used when ``f(a)`` is not finite.

    Returns
    -------
    (value, err_est)
    """
    a = float(a)
    b = float(b)
    if not (math.isfinite(a) and math.isfinite(b)):
        raise DomainError("integrate needs finite limits; use integrate_to_infinity")
    if a > b:
        raise DomainError(f"integration limits out of order: a={a} > b={b}")
    if a == b:
        return 0.0, 0.0

    if singular_at_a is None:
        with np.errstate(all="ignore"):
            try:
                fa = float(np.asarray(f(np.array([a])), dtype=float).ravel()[0])
            except (ZeroDivisionError, ValueError, OverflowError):
                fa = math.inf
        singular_at_a = not math.isfinite(fa)

    edges = _graded_edges(a, b) if singular_at_a else [a, b]
    heap = []
    total = 0.0
    total_err = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        val, err = _gk15(f, lo, hi)
        total += val
        total_err += err
        heapq.heappush(heap, (-err, lo, hi, val, 0))
    sliver = 0.0
    if singular_at_a:
        # keep grading the innermost panel until its mass is negligible;
        # what is left of it is dropped and charged to the error estimate
        inner = min(heap, key=lambda h: h[1])
        heap.remove(inner)
        heapq.heapify(heap)
        _, _, hi, sliver, _ = inner
        total = math.fsum(h[3] for h in heap)
        total_err = math.fsum(-h[0] for h in heap)
        while True:
            cut = a + 0.125 * (hi - a)
            if cut <= a or abs(sliver) <= 1e-3 * opts.target(total):
                break
            v_out, e_out = _gk15(f, cut, hi)
            total += v_out
            total_err += e_out
            heapq.heappush(heap, (-e_out, cut, hi, v_out, 0))
            hi = cut
            sliver, _ = _gk15(f, a, hi)
        total += sliver
        total_err += abs(sliver)

    max_evals = 200000
    n_evals = len(heap)
    while total_err > opts.target(total):
        neg_err, lo, hi, val, depth = heapq.heappop(heap)
        if depth >= opts.max_depth or n_evals > max_evals:
            heapq.heappush(heap, (neg_err, lo, hi, val, depth))
            raise QuadratureError(
                f"quadrature did not converge on [{a}, {b}] "
                f"(estimate {total!r}, error {total_err:.3e})",
                value=total, error=total_err)
        mid = 0.5 * (lo + hi)
        v1, e1 = _gk15(f, lo, mid)
        v2, e2 = _gk15(f, mid, hi)
        n_evals += 2
        total += v1 + v2 - val
        total_err += e1 + e2 + neg_err
        heapq.heappush(heap, (-e1, lo, mid, v1, depth + 1))
        heapq.heappush(heap, (-e2, mid, hi, v2, depth + 1))

    # re-sum to shed accumulated rounding from the running updates
    total = math.fsum([item[3] for item in heap] + [sliver])
    total_err = math.fsum([-item[0] for item in heap] + [abs(sliver)])
    return total, total_err


def gaussian_type_tail(C, c, p, x):
    """Upper bound ``int_x^inf C exp(-c s^p) ds`` for the decay envelope."""
    shape = 1.0 / p
    arg = c * x ** p
    return C / (p * c ** shape) * upper_tail_gamma(shape, arg)


def integrate_to_infinity(f, a, decay, opts=DEFAULT_QUAD):
    """Integrate f over [a, inf) given a decay envelope.

    ``decay`` is ``(C, c, p)`` with ``|f(s)| <= C exp(-c s^p)`` for ``s >= a``.
    The range is truncated at the smallest ``eta_max`` (found by doubling then
    bisection) whose bounded tail is below ``abs_tol / 2``.

    Returns ``(value, err_est, eta_max)``.
    """
    C, c, p = (float(v) for v in decay)
    if not (c > 0 and p > 0):
        raise DomainError(f"decay envelope needs c > 0 and p > 0, got c={c}, p={p}")
    if C < 0:
        raise DomainError("decay constant C must be non-negative")
    a = float(a)
    if a < 0:
        raise DomainError("integrate_to_infinity needs a >= 0 (decay envelope uses s^p)")
    budget = 0.5 * opts.abs_tol

    if C == 0.0 or gaussian_type_tail(C, c, p, a) < budget:
        hi = a
    else:
        step = max(1.0, a)
        hi = a + step
        while gaussian_type_tail(C, c, p, hi) >= budget:
            step *= 2.0
            hi = a + step
        lo = a
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if gaussian_type_tail(C, c, p, mid) < budget:
                hi = mid
            else:
                lo = mid
            if hi - lo <= 1e-12 * max(1.0, hi):
                break
    tail = gaussian_type_tail(C, c, p, hi) if C > 0 and hi > 0 else 0.0
    inner = QuadOptions(abs_tol=budget, rel_tol=opts.rel_tol, max_depth=opts.max_depth)
    value, err = integrate(f, a, hi, inner) if hi > a else (0.0, 0.0)
    return value, err + tail, hi


def integrate_intervals(f, lo, hi, abs_tol, rel_tol, max_splits=30):
    """Adaptive K15 integrals of a vectorized f over independent intervals.

    ``abs_tol`` may be a scalar or one tolerance per interval.  Intervals whose
    |K15 - G7| exceeds ``max(abs_tol, rel_tol * |value|)`` are bisected, all
    failing pieces together, until they pass.  Returns ``(values, errors)``.
    """
    lo = np.asarray(lo, dtype=float).ravel()
    hi = np.asarray(hi, dtype=float).ravel()
    tol = np.broadcast_to(np.asarray(abs_tol, dtype=float), lo.shape).copy()
    values = np.zeros(lo.size)
    errors = np.zeros(lo.size)
    owner = np.arange(lo.size)

    for _ in range(max_splits + 1):
        center = 0.5 * (lo + hi)
        half = 0.5 * (hi - lo)
        x = center[:, None] + half[:, None] * KRONROD_NODES[None, :]
        fx = np.asarray(f(x), dtype=float)
        if not np.all(np.isfinite(fx)):
            raise QuadratureError("interval integrand not finite")
        kron = half * (fx @ KRONROD_WEIGHTS)
        gauss = half * (fx @ GAUSS_WEIGHTS)
        err = np.abs(kron - gauss)
        ok = (err <= np.maximum(tol, rel_tol * np.abs(kron))) | (err <= 1e-15 * np.abs(kron))
        np.add.at(values, owner[ok], kron[ok])
        np.add.at(errors, owner[ok], err[ok])
        if ok.all():
            return values, errors
        bad = ~ok
        mid = center[bad]
        lo = np.concatenate([lo[bad], mid])
        hi = np.concatenate([mid, hi[bad]])
        owner = np.concatenate([owner[bad], owner[bad]])
        tol = np.concatenate([tol[bad], tol[bad]]) * 0.5
    raise QuadratureError("interval quadrature did not converge", value=values, error=errors)


def integrate_panels(f, edges, opts=DEFAULT_QUAD):
    """Integrals of a vectorized f over the consecutive panels of ``edges``.

    The absolute tolerance is shared between panels in proportion to their
    width, so the cumulative sum meets ``opts`` as a whole.
    """
    edges = np.asarray(edges, dtype=float)
    width = np.diff(edges)
    share = opts.abs_tol * np.maximum(width / max(float(edges[-1] - edges[0]), 1e-300), 1e-3)
    return integrate_intervals(f, edges[:-1], edges[1:], share, opts.rel_tol)
