import dataclasses
import math
from types import SimpleNamespace

import numpy as np
import pytest

from stefansim.exceptions import DomainError
from stefansim.field import (balance_residuals, field_table, frozen_denominators, interface_slopes,
                             ode_residual, reconstruct, stefan_residuals)
from stefansim.manufactured import manufactured_spec
from stefansim.profile import LIQUID, SOLID, make_liquid_grid
from stefansim.solver import SolveOptions, solve_liquid, solve_solid
from stefansim.thermal import dimensionless_model


def test_front_values(manufactured_solution):
    fs = reconstruct(manufactured_solution)
    for t in (0.01, 1.0, 37.0):
        a, b = fs.alpha_of_t(t), fs.beta_of_t(t)
        assert a < b
        assert fs.theta1(a, t) == pytest.approx(6.0, abs=1e-12)
        assert fs.theta1(b, t) == pytest.approx(1.0, abs=1e-12)
        assert fs.theta2(b, t) == pytest.approx(1.0, abs=1e-12)
        assert fs.theta(b, t) == pytest.approx(1.0, abs=1e-12)
    assert fs.alpha_of_t(0.0) == 0.0


def test_far_field_and_inside(manufactured_solution):
    fs = reconstruct(manufactured_solution)
    assert fs.theta2(1e6, 1.0) == pytest.approx(0.0, abs=1e-12)
    assert math.isnan(fs.theta(0.1, 1.0))
    assert str(fs.phase(0.1, 1.0)) == "none"
    assert str(fs.phase(1.5, 1.0)) == "liquid"
    assert str(fs.phase(3.0, 1.0)) == "solid"
    with pytest.raises(DomainError):
        fs.theta(1.0, 0.0)
    with pytest.raises(DomainError):
        fs.beta_of_t(-1.0)


def test_similarity_invariance(affine_solution):
    fs = reconstruct(affine_solution)
    rng = np.random.default_rng(7)
    t = rng.uniform(0.1, 4.0, 100)
    r = rng.uniform(0.5, 3.0, 100) * 2 * np.sqrt(t) * affine_solution.alpha0 * 1.01
    base = fs.theta(r, t)
    for k in (0.5, 2.0, 10.0):
        assert np.allclose(fs.theta(k * r, k * k * t), base, rtol=0, atol=1e-10, equal_nan=True)


def test_monotone_in_r(affine_solution):
    fs = reconstruct(affine_solution)
    t = 2.0
    r1 = np.linspace(fs.alpha_of_t(t), fs.beta_of_t(t), 200)
    assert np.all(np.diff(fs.theta1(r1, t)) <= 0)
    r2 = np.linspace(fs.beta_of_t(t), 20.0, 200)
    assert np.all(np.diff(fs.theta2(r2, t)) <= 0)


def test_field_table(manufactured_solution):
    fs = reconstruct(manufactured_solution)
    rows = field_table(fs, [0.0, 1.5, 3.0], [1.0, 4.0])
    assert len(rows) == 6
    assert rows[0][3] == "none" and math.isnan(rows[0][2])
    assert {r[3] for r in rows} <= {"none", "liquid", "solid"}


# -- ODE residual -------------------------------------------------------------

def test_ode_residual_manufactured(manufactured_solution):
    sol = manufactured_solution
    liquid, solid, _ = dimensionless_model(sol.spec)
    assert ode_residual(sol, liquid, LIQUID) < 1e-5
    assert ode_residual(sol, solid, SOLID) < 1e-5


def _converged(n, slope=0.05):
    spec = manufactured_spec(slope=slope)
    opts = SolveOptions(n=n)
    liquid, solid, u_c = dimensionless_model(spec)
    u1 = solve_liquid(liquid, spec.nu, 0.4, 1.0, opts).profile
    u2 = solve_solid(solid, spec.nu, 1.0, u_c, opts).profile
    return SimpleNamespace(spec=spec, options=opts, u1=u1, u2=u2), liquid, solid


def test_ode_residual_refinement_affine():
    coarse, liquid, solid = _converged(513)
    fine, _, _ = _converged(1025)
    for phase, model in ((LIQUID, liquid), (SOLID, solid)):
        assert ode_residual(coarse, model, phase) >= 4 * ode_residual(fine, model, phase)


def test_ode_residual_unconverged_is_larger(affine_solution):
    liquid, _, _ = dimensionless_model(affine_solution.spec)
    start = make_liquid_grid(affine_solution.alpha0, affine_solution.beta0, affine_solution.u1.n)
    raw = dataclasses.replace(affine_solution, u1=start)
    assert ode_residual(raw, liquid, LIQUID) > ode_residual(affine_solution, liquid, LIQUID)


def test_ode_residual_needs_room():
    coarse, liquid, _ = _converged(17)
    with pytest.raises(DomainError):
        ode_residual(coarse, liquid, LIQUID, stride=8)


# -- Stefan conditions --------------------------------------------------------

def test_stefan_residuals_manufactured(manufactured_solution):
    r1, r2 = stefan_residuals(manufactured_solution)
    assert abs(r1) < 1e-6 and abs(r2) < 1e-6


def test_doubled_latent_heat_shifts_r1(manufactured_solution):
    sol = manufactured_solution
    spec = sol.spec
    r1, r2 = stefan_residuals(sol, spec)
    d1, d2 = stefan_residuals(sol, spec.replace(l_b=2 * spec.l_b))
    added = 2 * spec.l_b * spec.gamma_b * sol.alpha0 / spec.delta_theta
    assert d1 - r1 == pytest.approx(added, rel=1e-12)
    assert d2 == r2


def test_r2_tracks_melting_balance(manufactured_solution):
    sol = manufactured_solution
    for factor in (0.9, 1.3):
        spec = sol.spec.replace(l_m=factor * sol.spec.l_m)
        _, r2 = stefan_residuals(sol, spec)
        bal = balance_residuals(sol, spec)["stefan"]
        assert r2 != 0 and 0.1 <= abs(r2) / abs(bal) <= 10
        assert r2 == pytest.approx(-bal * sol.beta0 ** -spec.nu, rel=1e-10)


def test_interface_slopes_signs(affine_solution):
    du1_a, du1_b, du2_b = interface_slopes(affine_solution)
    assert du1_a < 0 and du1_b < 0 and du2_b < 0
    # slope at beta0 from the profile nodes agrees with the exact representation
    u = affine_solution.u1
    fd = (u.values[-1] - u.values[-2]) / (u.nodes[-1] - u.nodes[-2])
    assert fd == pytest.approx(du1_b, rel=1e-2)


def test_frozen_denominators(manufactured_solution, affine_solution):
    d = frozen_denominators(manufactured_solution)
    assert d["phi1_frozen"] == pytest.approx(d["phi1_full"], rel=1e-9)
    assert d["phi2_frozen"] == pytest.approx(d["phi2_full"], rel=1e-9)
    assert abs(d["balance_frozen"]) < 1e-7
    # with temperature-dependent coefficients the two readings differ
    d = frozen_denominators(affine_solution)
    assert abs(d["phi1_frozen"] / d["phi1_full"] - 1) > 1e-4
