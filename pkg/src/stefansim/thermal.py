"""
Physical inputs, dimensionless coefficient functions and their envelopes.

Coefficient functions of temperature come in four declarative families
(constant, affine, power, tabulated).  ``dimensionless_model`` turns a
``ProblemSpec`` into the conductivity/capacity pairs L(u), N(u) of each phase,
and ``estimate_envelopes`` measures the bounding constants along a profile.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .exceptions import ModelDomainError, SpecError


# -- coefficient families -----------------------------------------------------

@dataclass(frozen=True)
class Constant:
    value: float

    def __call__(self, theta):
        return np.full_like(np.asarray(theta, dtype=float), self.value)

    def to_dict(self):
        return {"family": "constant", "value": self.value}


@dataclass(frozen=True)
class Affine:
    """a + b * theta"""
    a: float
    b: float

    def __call__(self, theta):
        return self.a + self.b * np.asarray(theta, dtype=float)

    def to_dict(self):
        return {"family": "affine", "a": self.a, "b": self.b}


@dataclass(frozen=True)
class Power:
    """a * theta**p (theta must stay positive)"""
    a: float
    p: float

    def __call__(self, theta):
        return self.a * np.asarray(theta, dtype=float) ** self.p

    def to_dict(self):
        return {"family": "power", "a": self.a, "p": self.p}


@dataclass(frozen=True)
class Tabulated:
    """Piecewise-linear in theta, held constant outside the table."""
    theta: tuple
    values: tuple

    def __post_init__(self):
        if len(self.theta) != len(self.values) or len(self.theta) < 2:
            raise SpecError("tabulated coefficient needs >= 2 matching (theta, value) pairs")
        if np.any(np.diff(self.theta) <= 0):
            raise SpecError("tabulated theta must be strictly increasing")

    def __call__(self, theta):
        return np.interp(np.asarray(theta, dtype=float), self.theta, self.values)

    def to_dict(self):
        return {"family": "tabulated", "theta": list(self.theta), "values": list(self.values)}


def coefficient_from_dict(d):
    """Build a coefficient function from its config table."""
    if isinstance(d, (int, float)):
        return Constant(float(d))
    try:
        family = d["family"]
        if family == "constant":
            return Constant(float(d["value"]))
        if family == "affine":
            return Affine(float(d["a"]), float(d["b"]))
        if family == "power":
            return Power(float(d["a"]), float(d["p"]))
        if family == "tabulated":
            return Tabulated(tuple(float(t) for t in d["theta"]),
                             tuple(float(v) for v in d["values"]))
    except KeyError as exc:
        raise SpecError(f"coefficient table is missing key {exc}") from None
    raise SpecError(f"unknown coefficient family {d.get('family')!r}")


# -- problem data -------------------------------------------------------------

@dataclass(frozen=True)
class ProblemSpec:
    """Physical data of the two-phase problem.

    ``lambda1, c1, rho1`` belong to the liquid phase (between the boiling and
    melting fronts) and ``lambda2, c2, rho2`` to the solid phase.
    """
    nu: float
    theta_b: float
    theta_m: float
    l_b: float
    l_m: float
    gamma_b: float
    gamma_m: float
    lambda1: Callable
    lambda2: Callable
    c1: Callable
    c2: Callable
    rho1: Callable
    rho2: Callable

    def __post_init__(self):
        self.validate()

    def validate(self):
        if not (0.0 < self.nu < 1.0):
            raise SpecError(f"nu must satisfy 0 < nu < 1 (strict), got nu={self.nu}")
        if not self.theta_b > self.theta_m:
            raise SpecError(f"need theta_b > theta_m, got {self.theta_b} <= {self.theta_m}")
        for name in ("l_b", "l_m", "gamma_b", "gamma_m"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise SpecError(f"{name} must be positive and finite, got {v}")
        # each phase is checked on the temperatures it can reach
        liquid = np.linspace(self.theta_m, self.theta_b, 257)
        solid = np.linspace(min(0.0, self.theta_m), self.theta_m, 257)
        for name, theta in (("lambda1", liquid), ("c1", liquid), ("rho1", liquid),
                            ("lambda2", solid), ("c2", solid), ("rho2", solid)):
            with np.errstate(all="ignore"):
                vals = np.asarray(getattr(self, name)(theta), dtype=float)
            if not np.all(np.isfinite(vals) & (vals > 0)):
                raise SpecError(f"{name} must be strictly positive on "
                                f"[{theta[0]:g}, {theta[-1]:g}]")

    @property
    def delta_theta(self):
        return self.theta_b - self.theta_m

    @property
    def u_c(self):
        return -self.theta_m / (self.theta_b - self.theta_m)

    @property
    def A_star(self):
        """2 l_b gamma_b / (theta_b - theta_m)"""
        return 2.0 * self.l_b * self.gamma_b / self.delta_theta

    @property
    def B_star(self):
        """2 l_m gamma_m / (theta_b - theta_m)"""
        return 2.0 * self.l_m * self.gamma_m / self.delta_theta

    def replace(self, **changes):
        from dataclasses import replace
        return replace(self, **changes)


@dataclass(frozen=True)
class CoefficientModel:
    """Dimensionless L(u), N(u) for one phase, valid on ``u_range``."""
    L: Callable
    N: Callable
    phase: str
    u_range: tuple

    def ratio(self, u):
        return self.N(u) / self.L(u)

    def lipschitz(self, samples=4001):
        """Largest finite-difference slope of L and N over the phase u-range."""
        lo, hi = self.u_range
        if hi <= lo:
            return 0.0, 0.0
        u = np.linspace(lo, hi, samples)
        du = np.diff(u)
        Lt = float(np.max(np.abs(np.diff(self.L(u)) / du)))
        Nt = float(np.max(np.abs(np.diff(self.N(u)) / du)))
        return Lt, Nt

    def check_positive(self, u):
        Lu = np.asarray(self.L(u), dtype=float)
        Nu = np.asarray(self.N(u), dtype=float)
        if not (np.all(Lu > 0) and np.all(Nu > 0)):
            raise ModelDomainError(f"{self.phase} coefficients not positive along profile")
        return Lu, Nu


def dimensionless_model(spec: ProblemSpec):
    """Return ``(liquid, solid, u_c)`` for a problem.

    L_i(u) = lambda_i(theta) and N_i(u) = c_i(theta) rho_i(theta) with
    theta = theta_m + (theta_b - theta_m) u.
    """
    dth = spec.delta_theta
    tm = spec.theta_m

    def theta(u):
        return dth * np.asarray(u, dtype=float) + tm

    def make(lam, c, rho):
        return (lambda u: np.asarray(lam(theta(u)), dtype=float),
                lambda u: np.asarray(c(theta(u)), dtype=float) * np.asarray(rho(theta(u)), dtype=float))

    u_c = spec.u_c
    L1, N1 = make(spec.lambda1, spec.c1, spec.rho1)
    L2, N2 = make(spec.lambda2, spec.c2, spec.rho2)
    liquid = CoefficientModel(L1, N1, "liquid", (0.0, 1.0))
    solid = CoefficientModel(L2, N2, "solid", (min(u_c, 0.0), 0.0))
    return liquid, solid, u_c


# -- envelopes ----------------------------------------------------------------

@dataclass(frozen=True)
class WindowVerdict:
    nu: float
    mu: float
    delta: float
    checks: dict = field(default_factory=dict)

    @property
    def ok(self):
        return all(self.checks.values())

    @property
    def violated(self):
        return [k for k, v in self.checks.items() if not v]

    def to_dict(self):
        return {"ok": self.ok, "checks": dict(self.checks), "violated": self.violated}


def validate_window(nu, mu, delta):
    """Check the admissibility window for the solid-phase exponents."""
    checks = {
        "(3-nu)/2 < mu": (3.0 - nu) / 2.0 < mu,
        "mu < 2": mu < 2.0,
        "mu < delta": mu < delta,
        "delta < 3mu+nu-3": delta < 3.0 * mu + nu - 3.0,
        "xi > 0": 2.0 + delta - mu > 0.0,
        "mu+nu > 1": mu + nu > 1.0,
        "0 < nu < 1": 0.0 < nu < 1.0,
    }
    return WindowVerdict(nu, mu, delta, checks)


def default_exponents(nu):
    """Middle of the admissibility window for (mu, delta)."""
    mu = 0.5 * ((3.0 - nu) / 2.0 + 2.0)
    delta = 0.5 * (mu + 3.0 * mu + nu - 3.0)
    return mu, delta


@dataclass(frozen=True)
class EnvelopeParams:
    """Bounding constants of hypotheses on L_i, N_i along the solution."""
    nu: float
    L1m: float
    L1M: float
    N1m: float
    N1M: float
    L2m: float
    L2M: float
    N2m: float
    N2M: float
    mu: float
    delta: float
    Lt1: float = 0.0
    Lt2: float = 0.0
    Nt1: float = 0.0
    Nt2: float = 0.0
    solid_fit_range: tuple = (math.nan, math.nan)

    @property
    def xi(self):
        return 2.0 + self.delta - self.mu

    def window(self):
        return validate_window(self.nu, self.mu, self.delta)

    def to_dict(self):
        d = {k: getattr(self, k) for k in (
            "nu", "L1m", "L1M", "N1m", "N1M", "L2m", "L2M", "N2m", "N2M",
            "mu", "delta", "Lt1", "Lt2", "Nt1", "Nt2")}
        d["xi"] = self.xi
        d["solid_fit_range"] = list(self.solid_fit_range)
        return d

    def replace(self, **changes):
        from dataclasses import replace
        return replace(self, **changes)


def _dense_sample(profile, per_panel=4):
    x = profile.nodes
    t = np.linspace(0.0, 1.0, per_panel + 1)[:-1]
    eta = (x[:-1, None] + np.diff(x)[:, None] * t[None, :]).ravel()
    return np.append(eta, x[-1])


def _as_list(p):
    if isinstance(p, (list, tuple)):
        return list(p)
    return [p]


def estimate_envelopes(liquid: CoefficientModel, u1, solid: CoefficientModel, u2,
                       mu, delta, nu, per_panel=4):
    """Tightest envelope constants along the given profile(s).

    ``u1`` / ``u2`` may be a single Profile or a sequence of Profiles on the
    same support; the envelope then covers all of them.  The solid prefactors
    are min/max of L2(u2(eta)) / eta^mu and N2(u2(eta)) / eta^delta over the
    sampled (finite) part of the solid support.  Lipschitz constants come from
    the coefficient functions over each phase's u-range.
    """
    def extremes(model, profiles, weight_L=None, weight_N=None):
        lo_L = lo_N = math.inf
        hi_L = hi_N = -math.inf
        for p in profiles:
            eta = _dense_sample(p, per_panel)
            u = p(eta)
            Lu, Nu = model.check_positive(u)
            if weight_L is not None:
                Lu = Lu / eta ** weight_L
                Nu = Nu / eta ** weight_N
            lo_L, hi_L = min(lo_L, Lu.min()), max(hi_L, Lu.max())
            lo_N, hi_N = min(lo_N, Nu.min()), max(hi_N, Nu.max())
        return float(lo_L), float(hi_L), float(lo_N), float(hi_N)

    p1 = _as_list(u1)
    p2 = _as_list(u2)
    L1m, L1M, N1m, N1M = extremes(liquid, p1)
    L2m, L2M, N2m, N2M = extremes(solid, p2, mu, delta)
    Lt1, Nt1 = liquid.lipschitz()
    Lt2, Nt2 = solid.lipschitz()
    fit = (float(min(p.nodes[0] for p in p2)), float(max(p.nodes[-1] for p in p2)))
    return EnvelopeParams(nu=nu, L1m=L1m, L1M=L1M, N1m=N1m, N1M=N1M,
                          L2m=L2m, L2M=L2M, N2m=N2m, N2M=N2M, mu=mu, delta=delta,
                          Lt1=Lt1, Lt2=Lt2, Nt1=Nt1, Nt2=Nt2, solid_fit_range=fit)
