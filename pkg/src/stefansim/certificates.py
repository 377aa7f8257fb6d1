"""
Bound objects of the existence theory, evaluated numerically.

Every formula here is transcribed as printed, loose constants included; the
solver never gates on them.  Where a printed display was ambiguous the reading
used is stated next to the function.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .exceptions import DomainError
from .special import (gamma_difference, lower_incomplete_gamma, scaled_upper_tail_gamma,
                      weighted_gamma_difference)
from .quad import integrate_to_infinity
from .thermal import EnvelopeParams


def _require_window(env):
    verdict = env.window()
    if not verdict.ok:
        raise DomainError(f"inadmissible (mu, delta) window: violates {verdict.violated}")


def _check_nu(nu):
    if not 0.0 < nu < 1.0:
        raise DomainError(f"nu must lie in (0, 1), got {nu}")


# -- liquid-phase bounds ------------------------------------------------------

def phi1_tilde(env: EnvelopeParams, alpha0, eta):
    """Lipschitz multiplier of Phi_1 on [alpha0, eta]."""
    nu = env.nu
    _check_nu(nu)
    c = env.Nt1 + env.N1M * env.Lt1 / env.L1m
    poly = (eta ** (3 - nu) / (3 - nu) - alpha0 ** 2 * eta ** (1 - nu) / (1 - nu)
            + 2 * alpha0 ** 2 / ((3 - nu) * (1 - nu)))
    return (c * poly + env.Lt1 * eta ** (1 - nu) / (1 - nu)) / env.L1m ** 2


def _liquid_rates(env):
    return env.N1M / env.L1m, env.N1m / env.L1M


def E_bounds_liquid(env, alpha0, eta):
    """(lower, upper) Gaussian envelopes of E_1(eta)."""
    K, k = _liquid_rates(env)
    d = np.asarray(eta, dtype=float) ** 2 - alpha0 ** 2
    return np.exp(-K * d), np.exp(-k * d)


def Phi_bounds_liquid(env, alpha0, eta):
    """(lower, upper) incomplete-gamma bounds of Phi_1(eta).

    The factor sqrt(N^(nu-1) / L^(nu-1)) is taken as (N/L)^((nu-1)/2).
    """
    nu = env.nu
    a = 0.5 * (1 - nu)
    K, k = _liquid_rates(env)

    def one(e):
        lo = K ** (-a) / (2 * env.L1M) * weighted_gamma_difference(a, K * alpha0 ** 2, K * e ** 2)
        hi = k ** (-a) / (2 * env.L1m) * weighted_gamma_difference(a, k * alpha0 ** 2, k * e ** 2)
        return lo, hi

    if np.ndim(eta) == 0:
        return one(float(eta))
    pairs = np.array([one(float(e)) for e in np.ravel(eta)])
    return pairs[:, 0].reshape(np.shape(eta)), pairs[:, 1].reshape(np.shape(eta))


def epsilon_certificate(env: EnvelopeParams, alpha0, beta0):
    """Contraction certificate of the liquid operator, +inf when the interval collapses."""
    nu = env.nu
    _check_nu(nu)
    if not 0.0 <= alpha0 <= beta0:
        raise DomainError(f"need 0 <= alpha0 <= beta0, got ({alpha0}, {beta0})")
    a = 0.5 * (1 - nu)
    K = env.N1M / env.L1m
    num = 2 * env.L1M ** ((5 - nu) / 2) * env.L1m ** (nu - 2) * phi1_tilde(env, alpha0, beta0)
    gdiff = gamma_difference(a, K * alpha0 ** 2, K * beta0 ** 2)
    den = env.N1m ** a * gdiff
    if den <= 1e-300:
        return math.inf
    return num / den


def A_value(env: EnvelopeParams, alpha0, beta0):
    """A(alpha0, beta0), the reciprocal squared lower bound of Phi_1(beta0)."""
    nu = env.nu
    a = 0.5 * (1 - nu)
    K = env.N1M / env.L1m
    g = weighted_gamma_difference(a, K * alpha0 ** 2, K * beta0 ** 2)
    if g <= 0:
        return math.inf
    return 4 * env.L1M ** 2 * env.L1m ** (nu - 1) / (env.N1M ** (nu - 1) * g ** 2)


def epsilon_proof_chain(env: EnvelopeParams, alpha0, beta0):
    """A(alpha0, beta0) times the upper Phi_1 bound times phi1_tilde (cross-check of epsilon)."""
    _, upper = Phi_bounds_liquid(env, alpha0, beta0)
    return A_value(env, alpha0, beta0) * upper * phi1_tilde(env, alpha0, beta0)


def des_margin(env: EnvelopeParams, beta0):
    """gamma((1-nu)/2, beta0^2 N1M/L1m) minus the left side of the beta-hat condition.

    Positive where the condition holds.
    """
    nu = env.nu
    a = 0.5 * (1 - nu)
    lhs = (2 * env.L1M ** ((5 - nu) / 2) * env.L1m ** (nu - 2) / env.N1m ** a
           * phi1_tilde(env, 0.0, beta0))
    return lower_incomplete_gamma(a, beta0 ** 2 * env.N1M / env.L1m) - lhs


def alpha_tilde(env: EnvelopeParams, beta0, grid=256, rtol=1e-12):
    """First alpha0 in (0, beta0) with epsilon(alpha0, beta0) = 1.

    None when epsilon(0, beta0) >= 1 already.  With zero liquid Lipschitz
    constants epsilon vanishes identically and beta0 itself is returned.
    """
    f = lambda a0: epsilon_certificate(env, a0, beta0) - 1.0
    if f(0.0) >= 0:
        return None
    pts = beta0 * (1.0 - np.geomspace(1.0, 1e-12, grid))
    pts[0] = 0.0
    prev = pts[0]
    for a0 in pts[1:]:
        if f(a0) >= 0:
            return brentq(f, prev, a0, rtol=rtol)
        prev = a0
    return float(beta0)


# -- solid-phase bounds -------------------------------------------------------

def _solid_exponents(env):
    nu, mu, delta = env.nu, env.mu, env.delta
    return dict(e1=3 - 2 * mu - nu, e2=delta - 3 * mu + 3 - nu, e3=1 - mu - nu,
                d1=2 - mu, d2=delta - 2 * mu + 2)


def phi2_tilde(env: EnvelopeParams, beta0, eta):
    """Lipschitz multiplier of Phi_2 on [beta0, eta]; eta may be inf.

    Finite eta uses the U_1 + U_2 grouping of the Lipschitz estimate (the
    closed-form display has an unbalanced bracket); eta = inf uses the
    separately printed closed form.
    """
    _require_window(env)
    x = _solid_exponents(env)
    e1, e2, e3, d1, d2 = x["e1"], x["e2"], x["e3"], x["d1"], x["d2"]
    Nt, Lt, L2m, N2M = env.Nt2, env.Lt2, env.L2m, env.N2M
    b = float(beta0)
    if np.ndim(eta) == 0 and math.isinf(eta):
        return 2 / L2m ** 2 * (Nt * b ** e1 / (e1 * e3)
                               + Lt * N2M / L2m * b ** e2 / (e2 * e3)
                               + Lt / L2m * b ** e3 / (-e3))
    eta = np.asarray(eta, dtype=float)
    term_N = Nt / L2m * ((eta ** e1 - b ** e1) / (d1 * e1)
                         - (b ** d1 * eta ** e3 - b ** e1) / (d1 * e3))
    term_L = Lt * N2M / L2m ** 2 * ((eta ** e2 - b ** e2) / (d2 * e2)
                                    - (b ** d2 * eta ** e3 - b ** e2) / (d2 * e3))
    out = 2 / L2m * (term_N + term_L) + Lt / L2m ** 2 * (eta ** e3 - b ** e3) / e3
    return float(out) if out.ndim == 0 else out


def E_bounds_solid(env, beta0, eta):
    """(lower, upper) envelopes of E_2(eta) with xi = 2 + delta - mu.

    The rate carries the factor 2 from integrating 2 s^(1+delta-mu); the
    statement drops it, which would make the lower envelope invalid.
    """
    xi = env.xi
    d = np.asarray(eta, dtype=float) ** xi - beta0 ** xi
    return (np.exp(-2 * env.N2M / (env.L2m * xi) * d),
            np.exp(-2 * env.N2m / (env.L2M * xi) * d))


def _solid_shape(env):
    xi = env.xi
    s = (3 - env.nu - env.mu) / xi
    p = (env.delta - 3 * env.mu + 5) / xi
    q = (1 - env.delta - env.nu) / xi
    return xi, s, p, q


def Phi_bounds_solid(env, beta0, eta):
    """(lower, upper) bounds of Phi_2(eta) as printed."""
    _require_window(env)
    xi, s, p, q = _solid_shape(env)
    e3 = 1 - env.mu - env.nu
    c = 2 * env.N2M / (env.L2m * xi)
    pref = (env.L2m / (2 * env.N2M)) ** p * xi ** q / env.L2M
    x0 = c * beta0 ** xi

    def one(e):
        lo = pref * weighted_gamma_difference(s, x0, c * e ** xi)
        hi = (e ** e3 - beta0 ** e3) / (e3 * env.L2m) if math.isfinite(e) else \
            -beta0 ** e3 / (e3 * env.L2m)
        return lo, hi

    if np.ndim(eta) == 0:
        return one(float(eta))
    pairs = np.array([one(float(e)) for e in np.ravel(eta)])
    return pairs[:, 0].reshape(np.shape(eta)), pairs[:, 1].reshape(np.shape(eta))


def M_value(env: EnvelopeParams, beta0):
    """Lower bound of Phi_2[beta0, inf) used by the J functions."""
    _require_window(env)
    xi, s, p, q = _solid_shape(env)
    x0 = 2 * env.N2M * beta0 ** xi / (env.L2m * xi)
    return (env.L2m / (2 * env.N2M)) ** p * xi ** q * scaled_upper_tail_gamma(s, x0) / env.L2M


def M_reconstructed(env: EnvelopeParams, beta0):
    """int_beta0^inf exp(-c (s^xi - beta0^xi)) s^(-nu-mu) ds / L2M with c = 2 N2M / (L2m xi).

    The integral the lower Phi_2 bound is built from, evaluated by quadrature
    (its incomplete-gamma shape (1-nu-mu)/xi is negative).
    """
    _require_window(env)
    xi = env.xi
    c = 2 * env.N2M / (env.L2m * xi)
    e = env.nu + env.mu
    b = float(beta0)

    def f(t):
        s = b + t
        return np.exp(-c * (s ** xi - b ** xi)) * s ** (-e)

    # s^xi - b^xi >= (s - b)^xi for xi >= 1, so f(t) <= b^-e exp(-c t^xi)
    value, _, _ = integrate_to_infinity(f, 0.0, (b ** (-e), c, xi))
    return value / env.L2M


def B_value(env: EnvelopeParams, u_c, beta0):
    """B(beta0) as printed.

    Not |u_c| / M^2: the printed display carries (2 N2M)^p once in the
    numerator while the squared bracket holds only L2m^p.
    """
    _require_window(env)
    if u_c == 0:
        return 0.0
    xi, s, p, q = _solid_shape(env)
    x0 = 2 * env.N2M * beta0 ** xi / (env.L2m * xi)
    bracket = env.L2m ** p * xi ** q * scaled_upper_tail_gamma(s, x0)
    if bracket <= 0 or not math.isfinite(bracket):
        return math.inf
    return abs(u_c) * env.L2M ** 2 * (2 * env.N2M) ** p / bracket ** 2


def sigma_certificate(env: EnvelopeParams, u_c, beta0):
    """Contraction certificate of the solid operator."""
    _require_window(env)
    if u_c > 0:
        raise DomainError(f"u_c must be <= 0, got {u_c}")
    if not beta0 > 0:
        raise DomainError("sigma needs beta0 > 0")
    if u_c == 0:
        return 0.0
    e3 = 1 - env.mu - env.nu
    B = B_value(env, u_c, beta0)
    if math.isinf(B):
        return math.inf
    return B * beta0 ** e3 * phi2_tilde(env, beta0, math.inf) / (env.L2m * (-e3))


@dataclass(frozen=True)
class Thresholds:
    beta_tilde: float | None
    beta_hat: float | None
    sigma_found: bool
    des_found: bool

    @property
    def ordered(self):
        """True when beta_tilde < beta_hat (the existence window is non-empty)."""
        return (self.beta_tilde is not None and self.beta_hat is not None
                and self.beta_tilde < self.beta_hat)

    def to_dict(self):
        return {"beta_tilde": self.beta_tilde, "beta_hat": self.beta_hat,
                "sigma_found": self.sigma_found, "des_found": self.des_found,
                "ordered": self.ordered}


def threshold_betas(env: EnvelopeParams, u_c, beta_range=(1e-3, 10.0), grid=64, rtol=1e-10):
    """beta_tilde (sigma = 1, first downward crossing) and beta_hat (largest beta0 with des).

    Either comes back as None when the scan finds no crossing in range.
    """
    betas = np.geomspace(beta_range[0], beta_range[1], grid)
    sig = np.array([sigma_certificate(env, u_c, b) for b in betas])
    beta_tilde = None
    for i in range(grid - 1):
        if sig[i] > 1.0 and sig[i + 1] < 1.0:
            f = lambda b: math.log(sigma_certificate(env, u_c, b))
            beta_tilde = brentq(f, betas[i], betas[i + 1], rtol=rtol, xtol=1e-300)
            break

    margins = np.array([des_margin(env, b) for b in betas])
    holds = margins > 0
    beta_hat = None
    if holds.any():
        last = int(np.nonzero(holds)[0][-1])
        if last == grid - 1:
            beta_hat = float(betas[-1])
        else:
            beta_hat = brentq(lambda b: des_margin(env, b), betas[last], betas[last + 1],
                              rtol=rtol)
    return Thresholds(beta_tilde, beta_hat, beta_tilde is not None, beta_hat is not None)


# -- Lipschitz right-hand sides -----------------------------------------------

def lipschitz_rhs_E(env: EnvelopeParams, phase, eta, lo):
    """Multiplier of ||u* - u|| bounding |E[u](eta) - E[u*](eta)|."""
    eta = np.asarray(eta, dtype=float)
    if phase == "liquid":
        return (env.Nt1 + env.N1M * env.Lt1 / env.L1m) * (eta ** 2 - lo ** 2) / env.L1m
    _require_window(env)
    mu = env.mu
    d2 = env.delta - 2 * mu + 2
    return 2 * (env.Nt2 / env.L2m * (eta ** (2 - mu) - lo ** (2 - mu)) / (2 - mu)
                + env.Lt2 * env.N2M / env.L2m ** 2 * (eta ** d2 - lo ** d2) / d2)


def lipschitz_rhs_Phi(env: EnvelopeParams, phase, eta, lo):
    """Multiplier of ||u* - u|| bounding |Phi[u](eta) - Phi[u*](eta)|."""
    if phase == "liquid":
        return phi1_tilde(env, lo, eta)
    return phi2_tilde(env, lo, eta)


# -- J functions --------------------------------------------------------------

@dataclass(frozen=True)
class JValues:
    J1: float
    J2: float
    i1: float
    i2: float
    M: float
    radicand: float

    @property
    def radicand_ok(self):
        return self.radicand > 0

    def to_dict(self):
        return {"J1": self.J1, "J2": self.J2, "i1": self.i1, "i2": self.i2, "M": self.M,
                "radicand": self.radicand, "radicand_ok": self.radicand_ok}


def J_functions(env: EnvelopeParams, A_star, B_star, u_c, beta0, alpha0_star,
                form="printed"):
    """J_1, J_2 bracketing the beta0 residual, with i_1, i_2 and M.

    ``form="printed"`` uses the stated formulas.  ``form="reconstructed"``
    drops the 1/(nu+1) power on the J_1 radicand and takes M from
    :func:`M_reconstructed`; that is the pair the residual provably lies
    between.  A_star is accepted for symmetry with the residual; neither form
    uses it.  J1 is NaN when its radicand is not positive.
    """
    nu = env.nu
    i1, i2 = Phi_bounds_liquid(env, alpha0_star, beta0)
    if form == "printed":
        M = M_value(env, beta0)
        power = 1 / (nu + 1)
    elif form == "reconstructed":
        M = M_reconstructed(env, beta0)
        power = 1.0
    else:
        raise DomainError(f"unknown J form {form!r}")
    radicand = B_star * beta0 ** (nu + 1) - u_c / M
    J1 = 1 / i2 - radicand ** power if radicand > 0 else math.nan
    J2 = 1 / i1 - B_star * beta0 ** (nu + 1)
    return JValues(J1, J2, i1, i2, M, radicand)


# -- report -------------------------------------------------------------------

@dataclass
class CertificateReport:
    epsilon: float | None
    sigma: float | None
    phi1_tilde: float | None
    phi2_tilde: float | None
    A_val: float | None
    B_val: float | None
    window_ok: bool
    window: dict = field(default_factory=dict)
    epsilon_chain: float | None = None
    empirical_ratio_liquid: float | None = None
    empirical_ratio_solid: float | None = None
    envelopes: dict = field(default_factory=dict)

    @property
    def contraction_ok(self):
        return (self.epsilon is not None and self.sigma is not None
                and self.epsilon < 1 and self.sigma < 1)

    def to_dict(self):
        return {
            "epsilon": self.epsilon, "sigma": self.sigma,
            "epsilon_proof_chain": self.epsilon_chain,
            "phi1_tilde": self.phi1_tilde, "phi2_tilde": self.phi2_tilde,
            "A": self.A_val, "B": self.B_val,
            "window_ok": self.window_ok, "window": self.window,
            "contraction_ok": self.contraction_ok,
            "status": "applicable" if self.window_ok else "not applicable",
            "empirical_ratio_liquid": self.empirical_ratio_liquid,
            "empirical_ratio_solid": self.empirical_ratio_solid,
            "envelopes": self.envelopes,
        }


def certificate_report(env: EnvelopeParams, alpha0, beta0, u_c,
                       ratio_liquid=None, ratio_solid=None):
    """Evaluate epsilon, sigma and their ingredients at (alpha0, beta0).

    With an inadmissible window the liquid quantities are still reported but
    the solid ones (and the verdict) are marked not applicable.
    """
    verdict = env.window()
    eps = epsilon_certificate(env, alpha0, beta0)
    report = CertificateReport(
        epsilon=eps, sigma=None,
        phi1_tilde=phi1_tilde(env, alpha0, beta0), phi2_tilde=None,
        A_val=A_value(env, alpha0, beta0), B_val=None,
        window_ok=verdict.ok, window=verdict.to_dict(),
        epsilon_chain=epsilon_proof_chain(env, alpha0, beta0),
        empirical_ratio_liquid=ratio_liquid, empirical_ratio_solid=ratio_solid,
        envelopes=env.to_dict())
    if verdict.ok:
        report.sigma = sigma_certificate(env, u_c, beta0)
        report.phi2_tilde = phi2_tilde(env, beta0, math.inf)
        report.B_val = B_value(env, u_c, beta0)
    return report
