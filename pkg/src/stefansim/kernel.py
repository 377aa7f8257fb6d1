"""
Integral kernels of the similarity profiles.

For a profile u on [eta_lo, eta_hi] (eta_hi may be infinite for the solid):

    I(eta)   = int_{eta_lo}^{eta} s N(u(s)) / L(u(s)) ds
    E(eta)   = exp(-2 I(eta))
    Phi(eta) = int_{eta_lo}^{eta} E(s) / (s^nu L(u(s))) ds

``build_cache`` integrates panel by panel between profile nodes and stores the
cumulative sums; evaluation at arbitrary eta adds a within-panel partial
integral.  Past the last solid node the profile is frozen at its tail value,
so the kernel continues in closed form there.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import DomainError, ModelDomainError
from .profile import LIQUID, SOLID, Profile
from .quad import (DEFAULT_QUAD, KRONROD_NODES, KRONROD_WEIGHTS, QuadOptions,
                   integrate_panels, integrate_to_infinity)
from .special import weighted_gamma_difference
from .thermal import CoefficientModel


@dataclass(frozen=True, eq=False)
class KernelCache:
    model: CoefficientModel
    profile: Profile
    nu: float
    inner_cumulative: np.ndarray
    phi_cumulative: np.ndarray
    phi_total: float
    tail_ratio: float = math.nan   # N/L at the tail value (solid only)
    tail_L: float = math.nan
    tail_integral: float = 0.0     # Phi beyond the last node (solid only)
    opts: QuadOptions = DEFAULT_QUAD

    @property
    def nodes(self):
        return self.profile.nodes


def _u_linear(p: Profile, s):
    """Profile value at s, frozen at tail_value past the last solid node."""
    return p(s)


def _inner_integrand(model, p):
    def g(s):
        u = _u_linear(p, s)
        return s * model.N(u) / model.L(u)
    return g


def _panel_index(nodes, eta):
    k = np.searchsorted(nodes, eta, side="right") - 1
    return np.clip(k, 0, nodes.size - 2)


def _partial(f, lo, hi):
    """Single K15 pass of a vectorized f over many short intervals."""
    half = 0.5 * (hi - lo)
    x = (0.5 * (lo + hi))[..., None] + half[..., None] * KRONROD_NODES
    return half * (f(x) @ KRONROD_WEIGHTS)


def _inner_at(model, p, inner_cum, eta, tail_ratio=math.nan):
    """I(eta) for arbitrary eta within the support."""
    eta = np.asarray(eta, dtype=float)
    nodes = p.nodes
    k = _panel_index(nodes, eta)
    inside = np.minimum(eta, nodes[-1])
    out = inner_cum[k] + _partial(_inner_integrand(model, p), nodes[k], inside)
    if p.kind == SOLID:
        beyond = eta > nodes[-1]
        if np.any(beyond):
            extra = 0.5 * tail_ratio * (eta ** 2 - nodes[-1] ** 2)
            out = np.where(beyond, inner_cum[-1] + extra, out)
    return out


def _phi_integrand(model, p, nu, inner_cum):
    def f(s):
        I = _inner_at(model, p, inner_cum, s)
        return np.exp(-2.0 * I) / (s ** nu * model.L(_u_linear(p, s)))
    return f


def build_cache(model: CoefficientModel, p: Profile, nu, opts: QuadOptions = DEFAULT_QUAD):
    """Cumulative I and Phi at the profile nodes, plus Phi over the whole support."""
    nodes = p.nodes
    if nodes[0] <= 0:
        raise DomainError("kernel needs a positive lower support limit")
    # positivity on a dense sample (nodes and panel midpoints)
    mids = 0.5 * (nodes[:-1] + nodes[1:])
    model.check_positive(p(np.concatenate([nodes, mids])))

    inner_opts = QuadOptions(abs_tol=opts.abs_tol * 1e-2, rel_tol=opts.rel_tol * 1e-2,
                             max_depth=opts.max_depth)
    dI, _ = integrate_panels(_inner_integrand(model, p), nodes, inner_opts)
    inner_cum = np.concatenate([[0.0], np.cumsum(dI)])
    dPhi, _ = integrate_panels(_phi_integrand(model, p, nu, inner_cum), nodes, opts)
    phi_cum = np.concatenate([[0.0], np.cumsum(dPhi)])

    if p.kind == LIQUID:
        return KernelCache(model, p, nu, inner_cum, phi_cum, float(phi_cum[-1]), opts=opts)

    u_tail = p.tail_value
    L_c = float(model.L(np.array(u_tail)))
    N_c = float(model.N(np.array(u_tail)))
    if not (L_c > 0 and N_c > 0):
        raise ModelDomainError("solid coefficients not positive at the far-field value")
    k = N_c / L_c
    eta_end = float(nodes[-1])
    log_E_end = -2.0 * float(inner_cum[-1])

    def tail_f(s):
        return np.exp(log_E_end - k * (s ** 2 - eta_end ** 2)) / (s ** nu * L_c)

    # |tail_f| <= C exp(-k s^2) with C carried in log space
    log_C = log_E_end + k * eta_end ** 2 - nu * math.log(eta_end) - math.log(L_c)
    if log_C < -700:
        tail = 0.0
    else:
        tail, _, _ = integrate_to_infinity(tail_f, eta_end, (math.exp(log_C), k, 2.0), opts)
    return KernelCache(model, p, nu, inner_cum, phi_cum, float(phi_cum[-1] + tail),
                       tail_ratio=k, tail_L=L_c, tail_integral=float(tail), opts=opts)


def _check_support(cache, eta):
    lo, hi = cache.profile.support
    slack = 1e-12 * max(1.0, abs(cache.nodes[-1]))
    if np.any(eta < lo - slack) or np.any(eta > hi + slack):
        raise DomainError(f"eta outside kernel support [{lo}, {hi}]")


def eval_E(cache: KernelCache, eta):
    """E(eta) = exp(-2 I(eta)), in (0, 1]."""
    arr = np.asarray(eta, dtype=float)
    _check_support(cache, arr)
    lo = cache.nodes[0]
    arr_c = np.maximum(arr, lo)
    out = np.exp(-2.0 * _inner_at(cache.model, cache.profile, cache.inner_cumulative,
                                  arr_c, cache.tail_ratio))
    out = np.where(np.isinf(arr_c), 0.0, out) if cache.profile.kind == SOLID else out
    return float(out) if np.ndim(eta) == 0 else out


def _tail_phi(cache, eta):
    """Phi between the last solid node and eta (closed form, frozen tail)."""
    nu = cache.nu
    k = cache.tail_ratio
    a = 0.5 * (1.0 - nu)
    eta_end = float(cache.nodes[-1])
    E_end = math.exp(-2.0 * float(cache.inner_cumulative[-1]))
    scale = E_end / (2.0 * cache.tail_L) * k ** (-a)
    return np.array([scale * weighted_gamma_difference(a, k * eta_end ** 2, k * e ** 2)
                     for e in np.ravel(eta)]).reshape(np.shape(eta))


def eval_Phi(cache: KernelCache, eta):
    """Phi(eta); ``eta = inf`` returns ``phi_total`` for solid profiles."""
    arr = np.asarray(eta, dtype=float)
    _check_support(cache, arr)
    p = cache.profile
    nodes = p.nodes
    arr_c = np.clip(arr, nodes[0], nodes[-1])
    k = _panel_index(nodes, arr_c)
    f = _phi_integrand(cache.model, p, cache.nu, cache.inner_cumulative)
    out = cache.phi_cumulative[k] + _partial(f, nodes[k], arr_c)
    if p.kind == SOLID:
        beyond = arr > nodes[-1]
        if np.any(beyond):
            finite = beyond & np.isfinite(arr)
            extra = np.zeros_like(arr)
            if np.any(finite):
                extra[finite] = _tail_phi(cache, arr[finite])
            out = np.where(finite, cache.phi_cumulative[-1] + extra, out)
            out = np.where(np.isinf(arr), cache.phi_total, out)
    return float(out) if np.ndim(eta) == 0 else out


def eval_integrand_Phi(cache: KernelCache, eta):
    """E(eta) / (eta^nu L(u(eta))), the derivative of Phi."""
    arr = np.asarray(eta, dtype=float)
    E = eval_E(cache, arr)
    return E / (arr ** cache.nu * cache.model.L(cache.profile(arr)))


def frozen_phi(L, N, lo, hi, nu):
    """Phi with coefficients frozen at constants L, N (closed form); hi may be inf."""
    k = N / L
    a = 0.5 * (1.0 - nu)
    return k ** (-a) / (2.0 * L) * weighted_gamma_difference(a, k * lo ** 2, k * hi ** 2)
