"""
Physical temperature field, front positions and residual checks.

theta_i(r, t) = theta_m + (theta_b - theta_m) u_i(r / (2 sqrt(t))), with the
fronts alpha(t) = 2 alpha0 sqrt(t) and beta(t) = 2 beta0 sqrt(t).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import DomainError
from .kernel import eval_E, frozen_phi
from .profile import LIQUID

#: finite-difference stencil spacing in units of the grid spacing
FD_STRIDE = 8


def _eta(r, t):
    r = np.asarray(r, dtype=float)
    t = np.asarray(t, dtype=float)
    if np.any(t <= 0):
        raise DomainError("time must be positive")
    return r / (2.0 * np.sqrt(t))


@dataclass(frozen=True)
class FieldSolution:
    solution: object
    theta_b: float
    theta_m: float

    @property
    def delta_theta(self):
        return self.theta_b - self.theta_m

    def alpha_of_t(self, t):
        t = np.asarray(t, dtype=float)
        if np.any(t < 0):
            raise DomainError("time must be non-negative")
        return 2.0 * self.solution.alpha0 * np.sqrt(t)

    def beta_of_t(self, t):
        t = np.asarray(t, dtype=float)
        if np.any(t < 0):
            raise DomainError("time must be non-negative")
        return 2.0 * self.solution.beta0 * np.sqrt(t)

    def theta1(self, r, t):
        """Liquid temperature; defined for alpha(t) <= r <= beta(t)."""
        eta = _eta(r, t)
        return self.theta_m + self.delta_theta * self.solution.u1(eta)

    def theta2(self, r, t):
        """Solid temperature; defined for r >= beta(t)."""
        eta = _eta(r, t)
        return self.theta_m + self.delta_theta * self.solution.u2(eta)

    def phase(self, r, t):
        """'liquid', 'solid' or 'none' (inside the boiling front)."""
        eta = _eta(r, t)
        sol = self.solution
        return np.where(eta < sol.alpha0, "none", np.where(eta <= sol.beta0, "liquid", "solid"))

    def theta(self, r, t):
        """Temperature in whichever phase (r, t) falls; NaN inside the boiling front."""
        eta = np.asarray(_eta(r, t), dtype=float)
        sol = self.solution
        out = np.full(eta.shape, np.nan)
        liq = (eta >= sol.alpha0) & (eta <= sol.beta0)
        sld = eta > sol.beta0
        if np.any(liq):
            out[liq] = self.theta_m + self.delta_theta * sol.u1(eta[liq])
        if np.any(sld):
            out[sld] = self.theta_m + self.delta_theta * sol.u2(eta[sld])
        return float(out) if out.ndim == 0 else out


def reconstruct(sol, spec=None) -> FieldSolution:
    spec = spec or sol.spec
    return FieldSolution(sol, spec.theta_b, spec.theta_m)


def field_table(fs: FieldSolution, radii, times):
    """Rows (r, t, theta, phase) over the tensor grid of radii and times."""
    rows = []
    for t in times:
        for r in radii:
            ph = str(fs.phase(r, t))
            rows.append((float(r), float(t), float(fs.theta(r, t)), ph))
    return rows


# -- ODE residual -------------------------------------------------------------

def _fd(values, i, m, h):
    """First and second derivatives at index i from 4th-order central stencils of stride m."""
    um2, um1, u0, up1, up2 = (values[i - 2 * m], values[i - m], values[i],
                              values[i + m], values[i + 2 * m])
    d1 = (um2 - 8 * um1 + 8 * up1 - up2) / (12 * h)
    d2 = (-um2 + 16 * um1 - 30 * u0 + 16 * up1 - up2) / (12 * h * h)
    return d1, d2


def _dL(model, u, du=1e-6):
    return (model.L(u + du) - model.L(u - du)) / (2 * du)


def ode_residual(sol, model, phase, samples=None, stride=FD_STRIDE):
    """Max |[L eta^nu u']' + 2 eta^(nu+1) N u'| over interior nodes, over max |[L eta^nu u']'|.

    Derivatives come from 4th-order central differences of the node values
    with a stencil spacing of ``stride`` grid cells.  Solid grids are
    differentiated in their uniform map coordinate and transformed back.
    """
    nu = sol.spec.nu
    p = sol.u1 if phase == LIQUID else sol.u2
    nodes, values = p.nodes, p.values
    n = nodes.size
    m = stride
    idx = np.arange(2 * m, n - 2 * m)
    if idx.size == 0:
        raise DomainError(f"grid too coarse for stride {m}")
    if samples is not None and samples < idx.size:
        idx = idx[np.linspace(0, idx.size - 1, samples).round().astype(int)]

    if phase == LIQUID:
        h = (nodes[-1] - nodes[0]) / (n - 1) * m
        d1, d2 = _fd(values, idx, m, h)
    else:
        K = sol.options.solid_grading if sol.options else 1.0
        tau = np.linspace(0.0, K / (1.0 + K), n)
        S = (nodes[-1] - nodes[0]) / K
        ht = (tau[1] - tau[0]) * m
        t1, t2 = _fd(values, idx, m, ht)
        tt = tau[idx]
        e1 = S / (1 - tt) ** 2
        e2 = 2 * S / (1 - tt) ** 3
        d1 = t1 / e1
        d2 = (t2 - d1 * e2) / e1 ** 2

    eta = nodes[idx]
    u = values[idx]
    L = model.L(u)
    N = model.N(u)
    flux_deriv = _dL(model, u) * d1 ** 2 * eta ** nu + L * nu * eta ** (nu - 1) * d1 + L * eta ** nu * d2
    res = flux_deriv + 2 * eta ** (nu + 1) * N * d1
    scale = float(np.max(np.abs(flux_deriv)))
    if scale == 0:
        return 0.0
    return float(np.max(np.abs(res)) / scale)


# -- interface conditions -----------------------------------------------------

def interface_slopes(sol):
    """(u1'(alpha0), u1'(beta0), u2'(beta0)) from the integral representation."""
    nu = sol.spec.nu
    a0, b0 = sol.alpha0, sol.beta0
    lc, sc = sol.liquid_cache, sol.solid_cache
    L1a = float(lc.model.L(np.array(1.0)))
    L1b = float(lc.model.L(np.array(0.0)))
    phi1 = lc.phi_total
    du1_a = -1.0 / (a0 ** nu * L1a * phi1)
    du1_b = -float(eval_E(lc, b0)) / (b0 ** nu * L1b * phi1)
    if sc is None:
        du2_b = 0.0
    else:
        L2b = float(sc.model.L(np.array(0.0)))
        du2_b = sol.spec.u_c / (b0 ** nu * L2b * sc.phi_total)
    return du1_a, du1_b, du2_b


def stefan_residuals(sol, spec=None):
    """Signed residuals (r1, r2) of the flux conditions at the boiling and melting fronts.

    r1 = L1 u1'(alpha0) + 2 l_b gamma_b alpha0 / dtheta
    r2 = L1 u1'(beta0) - L2 u2'(beta0) + 2 l_m gamma_m beta0 / dtheta
    """
    spec = spec or sol.spec
    du1_a, du1_b, du2_b = interface_slopes(sol)
    lc, sc = sol.liquid_cache, sol.solid_cache
    L1a = float(lc.model.L(np.array(1.0)))
    L1b = float(lc.model.L(np.array(0.0)))
    L2b = float(sc.model.L(np.array(0.0))) if sc is not None else 1.0
    r1 = L1a * du1_a + spec.A_star * sol.alpha0
    r2 = L1b * du1_b - L2b * du2_b + spec.B_star * sol.beta0
    return float(r1), float(r2)


def balance_residuals(sol, spec=None):
    """Residuals of the two readings of the melting balance (see ``solver``)."""
    spec = spec or sol.spec
    nu = spec.nu
    phi1 = sol.liquid_cache.phi_total
    phi2 = sol.solid_cache.phi_total if sol.solid_cache is not None else math.inf
    E1 = float(eval_E(sol.liquid_cache, sol.beta0))
    solid = spec.u_c / phi2 - spec.B_star * sol.beta0 ** (nu + 1)
    return {"printed": 1.0 / phi1 + solid, "stefan": E1 / phi1 + solid}


def frozen_denominators(sol, spec=None):
    """Phi_1 and Phi_2 with coefficients frozen at the front values, next to the full ones.

    The frozen reading evaluates the liquid kernel at L1(0), N1(0) and the
    solid one at L2(u_c), N2(u_c).  ``balance`` is the melting balance
    (stefan form) recomputed with the frozen pair at the solved fronts.
    """
    spec = spec or sol.spec
    nu = spec.nu
    lc, sc = sol.liquid_cache, sol.solid_cache
    L1 = float(lc.model.L(np.array(0.0)))
    N1 = float(lc.model.N(np.array(0.0)))
    phi1 = frozen_phi(L1, N1, sol.alpha0, sol.beta0, nu)
    if sc is None:
        phi2, full2 = math.inf, math.inf
    else:
        L2 = float(sc.model.L(np.array(spec.u_c)))
        N2 = float(sc.model.N(np.array(spec.u_c)))
        phi2, full2 = frozen_phi(L2, N2, sol.beta0, math.inf, nu), sc.phi_total
    E1 = math.exp(-(N1 / L1) * (sol.beta0 ** 2 - sol.alpha0 ** 2))
    balance = E1 / phi1 + spec.u_c / phi2 - spec.B_star * sol.beta0 ** (nu + 1)
    return {"phi1_frozen": phi1, "phi1_full": lc.phi_total,
            "phi2_frozen": phi2, "phi2_full": full2, "balance_frozen": balance}
