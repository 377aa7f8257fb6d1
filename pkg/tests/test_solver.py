import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import NARROW
from oracles import U1_AT_07, U2_AT_15_UC_HALF
from stefansim.exceptions import ConvergenceError, DomainError, NoRootError
from stefansim.manufactured import manufactured_spec
from stefansim.profile import LIQUID, Profile, make_liquid_grid, make_solid_grid, sup_distance
from stefansim.solver import (SolveOptions, alpha_star, apply_V, apply_W, beta_residual,
                              fixed_point, solid_eta_max, solve, solve_liquid, solve_solid)
from stefansim.special import gamma_difference, lower_incomplete_gamma, upper_tail_gamma
from stefansim.thermal import CoefficientModel

NU = 0.5
A = 0.25   # (1 - nu) / 2


def const(phase):
    one = lambda u: np.ones_like(np.asarray(u, dtype=float))
    return CoefficientModel(one, one, phase, (0.0, 1.0) if phase == "liquid" else (-0.5, 0.0))


def affine(phase, slope=0.05):
    f = lambda u: 1.0 + slope * np.asarray(u, dtype=float)
    return CoefficientModel(f, f, phase, (0.0, 1.0) if phase == "liquid" else (-0.5, 0.0))


def u1_closed(eta, a0=0.4, b0=1.0):
    g = lambda x: lower_incomplete_gamma(A, x)
    return np.array([1 - (g(e * e) - g(a0 * a0)) / (g(b0 * b0) - g(a0 * a0)) for e in eta])


def u2_closed(eta, u_c, b0=1.0):
    return np.array([u_c * gamma_difference(A, b0 * b0, e * e) / upper_tail_gamma(A, b0 * b0)
                     for e in eta])


def random_liquid(rng, a0=0.4, b0=1.0, n=513):
    inc = rng.random(n - 1) + 0.05
    vals = 1 - np.concatenate([[0], np.cumsum(inc)]) / inc.sum()
    return Profile(LIQUID, np.linspace(a0, b0, n), vals)


# -- operators ----------------------------------------------------------------

def test_apply_V_closed_form():
    rng = np.random.default_rng(1)
    for init in (make_liquid_grid(0.4, 1.0, 513), random_liquid(rng)):
        v = apply_V(const("liquid"), 0.4, 1.0, init, NU)
        assert v.values[0] == 1.0 and v.values[-1] == 0.0
        assert np.max(np.abs(v.values - u1_closed(v.nodes))) <= 1e-8
        assert np.all(np.diff(v.values) < 0)
    assert v(0.7) == pytest.approx(U1_AT_07, abs=1e-6)
    assert u1_closed([0.7])[0] == pytest.approx(U1_AT_07, rel=1e-12)


def test_apply_W_closed_form():
    p = make_solid_grid(1.0, -0.5, 513, eta_max=solid_eta_max(const("solid"), 1.0, -0.5))
    w = apply_W(const("solid"), 1.0, -0.5, p, NU)
    assert w.values[0] == 0.0 and w.tail_value == -0.5
    assert np.max(np.abs(w.values - u2_closed(w.nodes, -0.5))) <= 1e-8
    assert np.all(np.diff(w.values) < 0)
    assert u2_closed([1.5], -0.5)[0] == pytest.approx(U2_AT_15_UC_HALF, rel=1e-12)
    zero = apply_W(const("solid"), 1.0, 0.0, make_solid_grid(1.0, 0.0, 33), NU)
    assert np.all(zero.values == 0.0)


def test_operator_support_checks():
    with pytest.raises(DomainError):
        apply_V(const("liquid"), 0.3, 1.0, make_liquid_grid(0.4, 1.0, 9), NU)
    with pytest.raises(DomainError):
        apply_W(const("solid"), 2.0, -0.5, make_solid_grid(1.0, -0.5, 9), NU)


@settings(max_examples=15)
@given(st.integers(0, 2 ** 32 - 1))
def test_V_boundary_and_monotone_for_any_input(seed):
    rng = np.random.default_rng(seed)
    p = random_liquid(rng, n=65)
    v = apply_V(affine("liquid", 0.3), 0.4, 1.0, p, NU)
    assert v.values[0] == 1.0 and v.values[-1] == 0.0
    assert np.all(np.diff(v.values) < 0)


# -- fixed point --------------------------------------------------------------

def test_fixed_point_constant_two_iterations():
    opts = SolveOptions()
    res = solve_liquid(const("liquid"), NU, 0.4, 1.0, opts)
    assert res.iterations <= 2
    assert np.max(np.abs(res.profile.values - u1_closed(res.profile.nodes))) <= 1e-8
    sres = solve_solid(const("solid"), NU, 1.0, -0.5, opts)
    assert sres.iterations <= 2
    assert np.max(np.abs(sres.profile.values - u2_closed(sres.profile.nodes, -0.5))) <= 1e-8


def test_fixed_point_converged_input_one_iteration():
    opts = SolveOptions()
    first = solve_liquid(affine("liquid"), NU, 0.4, 1.0, opts)
    again = fixed_point(lambda p: apply_V(affine("liquid"), 0.4, 1.0, p, NU), first.profile, opts)
    assert again.iterations == 1
    assert sup_distance(again.profile, first.profile) < opts.fp_tol


def test_fixed_point_small_slope_ratios():
    res = solve_liquid(affine("liquid", 0.05), NU, 0.4, 1.0, SolveOptions())
    # the history alternates between two levels (about 0.006 and 0.010 here)
    # rather than decreasing monotonically, also at much tighter quadrature
    assert res.ratios and max(res.ratios) < 0.05


def test_fixed_point_reapply_changes_little():
    opts = SolveOptions()
    res = solve_liquid(affine("liquid", 0.2), NU, 0.4, 1.0, opts)
    v = apply_V(affine("liquid", 0.2), 0.4, 1.0, res.profile, NU)
    assert sup_distance(v, res.profile) < 2 * opts.fp_tol
    sres = solve_solid(affine("solid", 0.2), NU, 1.0, -0.5, opts)
    w = apply_W(affine("solid", 0.2), 1.0, -0.5, sres.profile, NU)
    assert sup_distance(w, sres.profile) < 2 * opts.fp_tol


def test_fixed_point_nonconvergence_and_damping():
    p = make_liquid_grid(0.4, 1.0, 5)

    def flip(u):  # reflection about 0.5: undamped it oscillates forever
        return u.with_values(1.0 - u.values + 0.1 * np.sign(u.values - 0.5))

    with pytest.raises(ConvergenceError) as info:
        fixed_point(flip, p, SolveOptions(fp_max_iters=5))
    assert info.value.iterations == 5 and info.value.profile is not None

    def expand(u):  # u* = 0.5 is repelling with slope -1.5; damping makes it attracting
        return u.with_values(0.5 - 1.5 * (u.values - 0.5))

    res = fixed_point(expand, p, SolveOptions(fp_max_iters=200))
    assert res.damping < 1.0
    assert np.allclose(res.profile.values, 0.5, atol=1e-8)


# -- alpha_star ----------------------------------------------------------------

def test_alpha_star_examples():
    # u_c = 0: alpha0 = (l_m gamma_m / (l_b gamma_b))^(1/(nu+1)) beta0 (the Delta theta cancels)
    assert alpha_star(2.0, 0.5, 0.0, 1.3, math.inf, NU) == pytest.approx(0.25 ** (1 / 1.5) * 1.3)
    assert alpha_star(1.0, 1.0, 0.0, 1.3, math.inf, NU) == pytest.approx(1.3)
    assert alpha_star(1.0, 0.5, -0.2, 1.0, 0.4, NU) == pytest.approx(1.0 ** (1 / 1.5))
    with pytest.raises(NoRootError):
        alpha_star(1.0, 0.0, 0.0, 1.0, math.inf, NU)


def test_degenerate_alpha_equal_beta_is_no_root():
    s = manufactured_spec(theta_m=0.0, theta_b=5.0, interface="printed")
    s = s.replace(l_m=s.l_b)
    with pytest.raises(NoRootError):
        beta_residual(s, 1.0, NARROW.replace(interface="printed"))


# -- beta residual ------------------------------------------------------------

@pytest.mark.parametrize("interface", ["printed", "stefan"])
def test_beta_residual_at_planted_root(interface):
    spec = manufactured_spec(interface=interface)
    opts = NARROW.replace(interface=interface)
    assert abs(beta_residual(spec, 1.0, opts)) < 1e-7
    lo, hi = beta_residual(spec, 0.97, opts), beta_residual(spec, 1.03, opts)
    assert lo * hi < 0


# -- solve ----------------------------------------------------------------------

def test_manufactured_recovery(manufactured_solution):
    sol = manufactured_solution
    assert sol.alpha0 == pytest.approx(0.4, rel=1e-6)
    assert sol.beta0 == pytest.approx(1.0, rel=1e-6)
    assert 0 < sol.alpha0 < sol.beta0
    assert sol.u1(sol.alpha0) == 1.0 and sol.u1(sol.beta0) == 0.0 and sol.u2(sol.beta0) == 0.0
    r = sol.residuals
    assert abs(r["boiling_balance"]) < 1e-6 and abs(r["balance_stefan"]) < 1e-6
    assert abs(r["stefan_boiling"]) < 1e-6 and abs(r["stefan_melting"]) < 1e-6
    assert sol.certificate.epsilon == 0.0 and sol.certificate.sigma == 0.0
    d = sol.diagnostics
    assert d["iterations_liquid"] <= 2 and d["iterations_solid"] <= 2
    assert d["phi1"] == pytest.approx(d["phi1_frozen"], rel=1e-9)
    assert d["phi2"] == pytest.approx(d["phi2_frozen"], rel=1e-9)


def test_printed_mode_recovery():
    sol = solve(manufactured_spec(interface="printed"), NARROW.replace(interface="printed"))
    assert sol.alpha0 == pytest.approx(0.4, rel=1e-6)
    assert sol.beta0 == pytest.approx(1.0, rel=1e-6)
    assert abs(sol.residuals["balance_printed"]) < 1e-6
    # the printed balance leaves the melting-front flux condition unmet
    assert abs(sol.residuals["stefan_melting"]) > 0.1


def test_no_root_when_melting_heat_dominates():
    s = manufactured_spec(theta_m=0.0, theta_b=5.0)
    s = s.replace(l_m=2.0 * s.l_b)
    with pytest.raises(NoRootError) as info:
        solve(s, NARROW)
    trace = info.value.trace
    assert "residual_trace" in trace and len(trace["residual_trace"]) == NARROW.bracket_grid
    assert all(math.isnan(r) for _, _, r in trace["residual_trace"])


def test_multiple_roots_smallest_selected(manufactured_solution):
    d = manufactured_solution.diagnostics
    assert d["brackets"][0][0] <= manufactured_solution.beta0 <= d["brackets"][0][1]
    assert d["other_brackets"] == d["brackets"][1:]


@pytest.mark.parametrize("slope", [0.01, -0.01])
def test_root_moves_continuously(manufactured_solution, slope):
    sol = solve(manufactured_spec(slope=slope), NARROW)
    assert abs(sol.beta0 / manufactured_solution.beta0 - 1) < 0.05
    assert abs(sol.alpha0 / manufactured_solution.alpha0 - 1) < 0.05


def test_grid_refinement_stability(manufactured_solution):
    fine = solve(manufactured_spec(), NARROW.replace(n=1025))
    assert fine.alpha0 == pytest.approx(manufactured_solution.alpha0, rel=1e-5)
    assert fine.beta0 == pytest.approx(manufactured_solution.beta0, rel=1e-5)


def test_options_validation():
    for bad in ({"damping": 0.0}, {"damping": 1.5}, {"fp_tol": 0.0}, {"bracket_grid": 1},
                {"beta_range": (2.0, 1.0)}, {"interface": "other"}, {"n": 1}):
        with pytest.raises(DomainError):
            SolveOptions(**bad)
