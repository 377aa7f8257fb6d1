"""
Fixed-point solution of the two profile equations and the outer root solve.

For given (alpha0, beta0) the liquid profile is the fixed point of

    V(u)(eta) = 1 - Phi_1[alpha0, eta, u] / Phi_1[alpha0, beta0, u]

and for given beta0 the solid profile is the fixed point of

    W(u)(eta) = u_c Phi_2[beta0, eta, u] / Phi_2[beta0, inf, u].

The flux condition at the boiling front pins alpha0 in terms of beta0; the
remaining flux condition is then a scalar equation in beta0.  Two readings of
the melting-front balance are offered:

``"stefan"``  E_1(beta0)/Phi_1 + u_c/Phi_2 = B* beta0^(nu+1), obtained by
              substituting the integral representation into the flux jump;
              alpha0 then solves A* alpha0^(nu+1) E_1(beta0) = B* beta0^(nu+1) - u_c/Phi_2.
``"printed"`` the same balance without the E_1(beta0) factor, which gives
              alpha0 explicitly.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import brentq

from . import certificates as cert
from .field import balance_residuals, frozen_denominators, stefan_residuals
from .exceptions import ConvergenceError, DomainError, NoRootError, StefanError
from .kernel import build_cache, eval_E
from .profile import (DEFAULT_N, SOLID_GRADING, Profile, make_liquid_grid,
                      make_solid_grid, remap, solid_nodes, sup_distance)
from .quad import DEFAULT_QUAD, QuadOptions
from .thermal import (CoefficientModel, ProblemSpec, default_exponents,
                      dimensionless_model, estimate_envelopes)

log = logging.getLogger(__name__)

INTERFACE_MODES = ("stefan", "printed")
_PHI_FLOOR = 1e-300
# E_2 at the last solid node stays below this
_TAIL_TARGET = 1e-13


@dataclass(frozen=True)
class SolveOptions:
    fp_tol: float = 1e-9
    fp_max_iters: int = 200
    damping: float = 1.0
    root_tol: float = 1e-8
    bracket_grid: int = 64
    beta_range: tuple = (1e-3, 10.0)
    n: int = DEFAULT_N
    interface: str = "stefan"
    quad: QuadOptions = DEFAULT_QUAD
    solid_grading: float = SOLID_GRADING

    def __post_init__(self):
        if not (self.fp_tol > 0 and self.root_tol > 0 and self.fp_max_iters > 0):
            raise DomainError("solver tolerances and iteration budget must be positive")
        if not 0 < self.damping <= 1:
            raise DomainError(f"damping must lie in (0, 1], got {self.damping}")
        if self.bracket_grid < 2:
            raise DomainError("bracket_grid needs at least 2 points")
        lo, hi = self.beta_range
        if not 0 < lo < hi:
            raise DomainError(f"beta_range must satisfy 0 < lo < hi, got {self.beta_range}")
        if self.n < 2:
            raise DomainError("grid needs at least 2 nodes")
        if self.interface not in INTERFACE_MODES:
            raise DomainError(f"interface must be one of {INTERFACE_MODES}")

    def replace(self, **changes):
        return replace(self, **changes)


# -- operators ----------------------------------------------------------------

def _V(model, nu, u1, opts):
    cache = build_cache(model, u1, nu, opts.quad if opts else DEFAULT_QUAD)
    if cache.phi_total < _PHI_FLOOR:
        raise DomainError("Phi_1[alpha0, beta0] underflows")
    values = 1.0 - cache.phi_cumulative / cache.phi_total
    values[0], values[-1] = 1.0, 0.0
    return u1.with_values(values), cache


def _W(model, nu, u_c, u2, opts):
    if u_c == 0:
        return u2.with_values(np.zeros(u2.n)), None
    cache = build_cache(model, u2, nu, opts.quad if opts else DEFAULT_QUAD)
    if cache.phi_total < _PHI_FLOOR:
        raise DomainError("Phi_2[beta0, inf] underflows")
    values = u_c * cache.phi_cumulative / cache.phi_total
    values[0] = 0.0
    return Profile(u2.kind, u2.nodes, values, float(u_c)), cache


def apply_V(model_liquid: CoefficientModel, alpha0, beta0, u1: Profile, nu, opts=None):
    """One application of the liquid operator on the nodes of ``u1``."""
    lo, hi = u1.support
    if not (math.isclose(lo, alpha0, rel_tol=1e-12) and math.isclose(hi, beta0, rel_tol=1e-12)):
        raise DomainError(f"liquid profile support {u1.support} != [{alpha0}, {beta0}]")
    return _V(model_liquid, nu, u1, opts)[0]


def apply_W(model_solid: CoefficientModel, beta0, u_c, u2: Profile, nu, opts=None):
    """One application of the solid operator on the nodes of ``u2``; tail set to u_c."""
    if not math.isclose(u2.nodes[0], beta0, rel_tol=1e-12):
        raise DomainError(f"solid profile starts at {u2.nodes[0]}, expected {beta0}")
    return _W(model_solid, nu, u_c, u2, opts)[0]


@dataclass
class FixedPointResult:
    profile: Profile
    iterations: int
    ratios: list
    damping: float
    cache: object = None

    @property
    def max_ratio(self):
        return max(self.ratios) if self.ratios else None


def fixed_point(op, init: Profile, opts: SolveOptions = SolveOptions()):
    """Iterate u <- (1 - d) u + d op(u) until successive iterates agree to fp_tol.

    ``op`` maps a Profile to ``(Profile, cache)`` (or just a Profile).  The
    damping d starts at ``opts.damping`` and halves, down to 1/16, whenever
    the step ratio exceeds 1 three iterations running.
    """
    u = init
    d = opts.damping
    ratios = []
    prev = None
    above = 0
    cache = None
    for it in range(1, opts.fp_max_iters + 1):
        out = op(u)
        v, cache = out if isinstance(out, tuple) else (out, None)
        if d < 1.0:
            v = u.with_values((1.0 - d) * u.values + d * v.values)
        step = sup_distance(v, u)
        if prev is not None and prev > 0:
            r = step / prev
            ratios.append(r)
            above = above + 1 if r > 1.0 else 0
            if above >= 3 and d > 1.0 / 16:
                d = max(d / 2.0, 1.0 / 16)
                above = 0
                log.debug("damping reduced to %g", d)
        u = v
        if step < opts.fp_tol:
            if d < 1.0:
                # the cache belongs to the undamped image; rebuild on the final iterate
                cache = None
            return FixedPointResult(u, it, ratios, d, cache)
        prev = step
    raise ConvergenceError(f"fixed point not reached in {opts.fp_max_iters} iterations "
                           f"(last step {step:.3e})", profile=u, ratios=ratios,
                           iterations=opts.fp_max_iters)


# -- per-beta evaluation ------------------------------------------------------

def solid_eta_max(model_solid: CoefficientModel, beta0, u_c):
    """Truncation point where the slowest Gaussian envelope of E_2 drops below 1e-13."""
    lo, hi = model_solid.u_range
    u = np.linspace(lo, hi, 257) if hi > lo else np.array([0.0])
    k = float(np.min(model_solid.ratio(u)))
    return math.sqrt(beta0 ** 2 - math.log(_TAIL_TARGET) / k)


def solve_solid(model_solid, nu, beta0, u_c, opts: SolveOptions, warm: Profile | None = None):
    eta_max = solid_eta_max(model_solid, beta0, u_c)
    if warm is not None:
        init = remap(warm, solid_nodes(beta0, eta_max, opts.n, opts.solid_grading))
        init = Profile(init.kind, init.nodes, init.values, float(u_c))
    else:
        init = make_solid_grid(beta0, u_c, opts.n, eta_max, opts.solid_grading)
    res = fixed_point(lambda p: _W(model_solid, nu, u_c, p, opts), init, opts)
    if res.cache is None and u_c != 0:
        res.cache = build_cache(model_solid, res.profile, nu, opts.quad)
    return res


def solve_liquid(model_liquid, nu, alpha0, beta0, opts: SolveOptions, warm: Profile | None = None):
    grid = make_liquid_grid(alpha0, beta0, opts.n)
    init = remap(warm, grid.nodes) if warm is not None else grid
    res = fixed_point(lambda p: _V(model_liquid, nu, p, opts), init, opts)
    if res.cache is None:
        res.cache = build_cache(model_liquid, res.profile, nu, opts.quad)
    return res


def alpha_star(A_star, B_star, u_c, beta0, phi2_total, nu):
    """Boiling-front coefficient from the explicit (printed) melting balance.

    Raises NoRootError when the radicand is not positive.
    """
    rad = (B_star * beta0 ** (nu + 1) - (u_c / phi2_total if u_c != 0 else 0.0)) / A_star
    if not rad > 0:
        raise NoRootError(f"alpha_star radicand {rad:.6g} <= 0 at beta0={beta0}")
    return rad ** (1.0 / (nu + 1))


@dataclass
class BetaEval:
    """Everything computed for one trial beta0."""
    beta0: float
    alpha0: float
    residual: float
    liquid: FixedPointResult
    solid: FixedPointResult
    phi1: float
    phi2: float
    E1_beta: float
    liquid_solves: int = 1


class _Problem:
    """A ProblemSpec with its dimensionless models and warm-start memory."""

    def __init__(self, spec: ProblemSpec, opts: SolveOptions):
        self.spec = spec
        self.opts = opts
        self.liquid, self.solid, self.u_c = dimensionless_model(spec)
        self.nu = spec.nu
        self.warm_u1 = None
        self.warm_u2 = None

    def _phi2(self, res):
        return res.cache.phi_total if res.cache is not None else math.inf

    def evaluate(self, beta0, interface=None) -> BetaEval:
        interface = interface or self.opts.interface
        spec, nu, u_c, opts = self.spec, self.nu, self.u_c, self.opts
        A, B = spec.A_star, spec.B_star
        sres = solve_solid(self.solid, nu, beta0, u_c, opts, self.warm_u2)
        self.warm_u2 = sres.profile
        phi2 = self._phi2(sres)
        rhs = B * beta0 ** (nu + 1) - (u_c / phi2 if u_c != 0 else 0.0)

        if interface == "printed":
            a0 = alpha_star(A, B, u_c, beta0, phi2, nu)
            if not a0 < beta0:
                raise NoRootError(f"alpha_star={a0:.6g} >= beta0={beta0:.6g}")
            lres = solve_liquid(self.liquid, nu, a0, beta0, opts, self.warm_u1)
            solves = 1
        else:
            if not rhs > 0:
                raise NoRootError(f"melting balance has no positive alpha0 at beta0={beta0}")
            memo = {}

            def g(a0):
                r = solve_liquid(self.liquid, nu, a0, beta0, opts, self.warm_u1)
                self.warm_u1 = r.profile
                memo[a0] = r
                return A * a0 ** (nu + 1) * float(eval_E(r.cache, beta0)) - rhs

            hi = beta0 * (1.0 - 1e-6)
            if g(hi) <= 0:
                raise NoRootError(f"no alpha0 < beta0 balances the melting front at beta0={beta0}")
            for frac in (1e-2, 1e-4, 1e-6):
                lo = beta0 * frac
                if g(lo) < 0:
                    break
            else:
                raise NoRootError(f"alpha0 below {lo:.3g} needed at beta0={beta0}")
            a0 = brentq(g, lo, hi, rtol=max(1e-14, opts.root_tol * 1e-3))
            lres = memo.get(a0) or solve_liquid(self.liquid, nu, a0, beta0, opts, self.warm_u1)
            solves = len(memo)
        self.warm_u1 = lres.profile
        phi1 = lres.cache.phi_total
        residual = 1.0 / phi1 - A * a0 ** (nu + 1)
        E1b = float(eval_E(lres.cache, beta0))
        return BetaEval(beta0, a0, residual, lres, sres, phi1, phi2, E1b, solves)


def beta_residual(spec: ProblemSpec, beta0, opts: SolveOptions = SolveOptions()):
    """1/Phi_1[alpha0*, beta0, u_1] - A* alpha0*^(nu+1) at one trial beta0."""
    return _Problem(spec, opts).evaluate(beta0).residual


# -- solution -----------------------------------------------------------------

@dataclass
class Solution:
    alpha0: float
    beta0: float
    u1: Profile
    u2: Profile
    certificate: cert.CertificateReport
    residuals: dict
    spec: ProblemSpec = None
    options: SolveOptions = None
    diagnostics: dict = field(default_factory=dict)
    liquid_cache: object = None
    solid_cache: object = None
    envelopes: object = None

    @property
    def u_c(self):
        return self.spec.u_c


def _j_curve(prob: _Problem, env, betas, alphas):
    spec = prob.spec
    out = []
    for b, a in zip(betas, alphas):
        if not (math.isfinite(a) and 0 < a < b):
            out.append((b, math.nan, math.nan))
            continue
        try:
            j = cert.J_functions(env, spec.A_star, spec.B_star, prob.u_c, b, a)
            out.append((b, j.J1, j.J2))
        except StefanError:
            out.append((b, math.nan, math.nan))
    return out


def scan_residuals(prob: _Problem, betas):
    """Residual at each beta in ``betas`` (NaN where alpha0 is undefined)."""
    trace = []
    for b in betas:
        try:
            ev = prob.evaluate(float(b))
            trace.append((float(b), ev.alpha0, ev.residual))
        except NoRootError as exc:
            log.debug("beta0=%g: %s", b, exc)
            trace.append((float(b), math.nan, math.nan))
    return trace


def _failure_envelope(prob):
    """Envelope on a nominal (alpha0, beta0) = (beta_lo, beta_hi) frame for J-curve reporting."""
    nu = prob.nu
    mu, delta = default_exponents(nu)
    lo, hi = prob.opts.beta_range
    coarse = prob.opts.replace(n=65)
    u1 = make_liquid_grid(lo * 0.5, hi, coarse.n)
    u2 = solve_solid(prob.solid, nu, lo, prob.u_c, coarse).profile
    return estimate_envelopes(prob.liquid, u1, prob.solid, u2, mu, delta, nu)


def solve(spec: ProblemSpec, opts: SolveOptions = SolveOptions(), exponents=None,
          envelopes=None) -> Solution:
    """Find (alpha0, beta0) and the converged profiles.

    Scans ``opts.beta_range`` on a log grid for sign changes of the beta0
    residual, refines the smallest bracket with Brent's method and reports any
    other brackets in ``diagnostics["other_brackets"]``.

    The certificates use ``envelopes`` when given, otherwise envelopes fitted
    to the converged profiles with exponents ``(mu, delta)`` (default: the
    middle of the admissible window).
    """
    prob = _Problem(spec, opts)
    betas = np.geomspace(*opts.beta_range, opts.bracket_grid)
    trace = scan_residuals(prob, betas)
    brackets = []
    for (b0, _, r0), (b1, _, r1) in zip(trace[:-1], trace[1:]):
        if math.isfinite(r0) and math.isfinite(r1) and (r0 == 0 or r0 * r1 < 0):
            brackets.append((b0, b1))
    if not brackets:
        info = {"residual_trace": trace}
        try:
            env = _failure_envelope(prob)
            info["J_curves"] = _j_curve(prob, env, [t[0] for t in trace], [t[1] for t in trace])
        except StefanError as exc:
            info["J_curves_error"] = str(exc)
        raise NoRootError("no sign change of the beta0 residual in "
                          f"[{opts.beta_range[0]:g}, {opts.beta_range[1]:g}]", trace=info)

    lo, hi = brackets[0]
    prob.warm_u1 = prob.warm_u2 = None
    cache = {}

    def f(b):
        ev = prob.evaluate(b)
        cache[b] = ev
        return ev.residual

    beta0 = brentq(f, lo, hi, xtol=1e-300, rtol=opts.root_tol, maxiter=200)
    ev = cache.get(beta0) or prob.evaluate(beta0)
    return _assemble(prob, ev, trace, brackets, exponents, envelopes)


def _assemble(prob: _Problem, ev: BetaEval, trace, brackets, exponents=None, envelopes=None):
    spec, opts, nu, u_c = prob.spec, prob.opts, prob.nu, prob.u_c
    u1, u2 = ev.liquid.profile, ev.solid.profile
    env = envelopes
    if env is None:
        mu, delta = exponents or default_exponents(nu)
        env = estimate_envelopes(prob.liquid, u1, prob.solid, u2, mu, delta, nu)
    report = cert.certificate_report(env, ev.alpha0, ev.beta0, u_c,
                                     ratio_liquid=ev.liquid.max_ratio,
                                     ratio_solid=ev.solid.max_ratio)
    try:
        thresholds = cert.threshold_betas(env, u_c, opts.beta_range).to_dict()
    except DomainError as exc:
        thresholds = {"status": "not applicable", "reason": str(exc)}
    diagnostics = {
        "interface": opts.interface,
        "residual_trace": trace,
        "brackets": brackets,
        "other_brackets": brackets[1:],
        "iterations_liquid": ev.liquid.iterations,
        "iterations_solid": ev.solid.iterations,
        "ratios_liquid": ev.liquid.ratios,
        "ratios_solid": ev.solid.ratios,
        "damping_liquid": ev.liquid.damping,
        "damping_solid": ev.solid.damping,
        "eta_max": float(u2.nodes[-1]),
        "thresholds": thresholds,
        "phi1": ev.phi1,
        "phi2": ev.phi2,
        "E1_beta0": ev.E1_beta,
        "uncertified": not report.contraction_ok,
    }
    sol = Solution(ev.alpha0, ev.beta0, u1, u2, report, {}, spec, opts, diagnostics,
                   ev.liquid.cache, ev.solid.cache, env)
    r1, r2 = stefan_residuals(sol, spec)
    balance = balance_residuals(sol, spec)
    # the frozen-coefficient reading of the profile denominators
    frozen = frozen_denominators(sol, spec)
    diagnostics.update(phi1_frozen=frozen["phi1_frozen"], phi2_frozen=frozen["phi2_frozen"],
                       balance_frozen=frozen["balance_frozen"])
    sol.residuals = {"stefan_boiling": r1, "stefan_melting": r2,
                     "balance_printed": balance["printed"],
                     "balance_stefan": balance["stefan"],
                     "boiling_balance": ev.residual}
    return sol
