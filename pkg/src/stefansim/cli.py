"""
Command line entry point.

    stefansim solve   --config run.toml [--out DIR] [--format csv|json|both] [--grid-n N] [--quiet]
    stefansim certify --config run.toml --alpha0 A --beta0 B [...]
    stefansim sweep   --config run.toml --param l_m --start 0.1 --stop 0.5 --steps 5 [...]

Exit codes: 0 success, 1 configuration error, 2 no root, 3 no convergence.
Set STEFAN_LOG (DEBUG, INFO, ...) to change the log level.
"""
from __future__ import annotations

import argparse
import logging
import os
import sys
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import certificates as cert
from .config import RunConfig, load_config
from .exceptions import ConvergenceError, NoRootError, SpecError
from .field import field_table, reconstruct
from .kernel import eval_E, eval_Phi
from .output import (boundary_rows, profile_rows, solution_to_dict, spec_to_dict,
                     write_csv, write_json)
from .solver import solve, solve_liquid, solve_solid
from .thermal import default_exponents, dimensionless_model, estimate_envelopes

log = logging.getLogger("stefansim")

EXIT_OK, EXIT_CONFIG, EXIT_NO_ROOT, EXIT_NO_CONVERGENCE = 0, 1, 2, 3
SWEEP_PARAMS = ("nu", "theta_m", "l_b", "l_m")
SPOT_CHECKS = 32


def _setup_logging():
    level = os.environ.get("STEFAN_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s")


def _write_meta(out: Path, verb, args):
    from . import __version__
    write_json(out / "run_meta.json", {
        "verb": verb,
        "timestamp": datetime.now(timezone.utc).isoformat(),
        "version": __version__,
        "argv": sys.argv[1:],
        "config": str(args.config),
    })


def _configure(args) -> RunConfig:
    cfg = load_config(args.config)
    if args.grid_n is not None:
        if args.grid_n < 2:
            raise SpecError("--grid-n must be at least 2")
        cfg.solver = cfg.solver.replace(n=args.grid_n)
    if args.format is not None:
        cfg.output.format = args.format
    return cfg


def _out_dir(args, cfg):
    return Path(args.out if args.out is not None else cfg.output.dir)


# -- solve --------------------------------------------------------------------

def run_solve(cfg: RunConfig, out: Path, quiet=False):
    """Solve and write artifacts; returns the exit code."""
    try:
        sol = solve(cfg.problem, cfg.solver, cfg.exponents, cfg.envelopes)
    except NoRootError as exc:
        write_json(out / "no_root.json", {"verdict": "no root", "message": str(exc),
                                          "trace": exc.trace})
        log.error("%s", exc)
        return EXIT_NO_ROOT
    except ConvergenceError as exc:
        write_json(out / "no_convergence.json", {"verdict": "no convergence",
                                                 "message": str(exc), "ratios": exc.ratios,
                                                 "iterations": exc.iterations})
        log.error("%s", exc)
        return EXIT_NO_CONVERGENCE

    fs = reconstruct(sol, cfg.problem)
    times = cfg.output.times
    if cfg.output.json:
        write_json(out / "solution.json", solution_to_dict(sol))
    if cfg.output.csv:
        write_csv(out / "profiles.csv", ("eta", "u1", "u2"), profile_rows(sol))
        write_csv(out / "field.csv", ("r", "t", "theta", "phase"),
                  field_table(fs, cfg.output.radius_grid(), times))
        write_csv(out / "boundaries.csv", ("t", "alpha", "beta"), boundary_rows(fs, times))
    if not quiet:
        c = sol.certificate
        print(f"alpha0 = {sol.alpha0:.12g}  beta0 = {sol.beta0:.12g}")
        print(f"epsilon = {c.epsilon}  sigma = {c.sigma}  "
              f"({'certified' if c.contraction_ok else 'uncertified'} contraction)")
        print(f"wrote artifacts to {out}")
    return EXIT_OK


# -- certify ------------------------------------------------------------------

def _spot_checks(env, alpha0, beta0, lc, sc):
    checks = []
    eta1 = np.linspace(alpha0, beta0, SPOT_CHECKS)
    E1, P1 = eval_E(lc, eta1), eval_Phi(lc, eta1)
    lo1, hi1 = cert.E_bounds_liquid(env, alpha0, eta1)
    lo2, hi2 = cert.Phi_bounds_liquid(env, alpha0, eta1)
    for name, lo, val, hi, eta in (("E_liquid", lo1, E1, hi1, eta1), ("Phi_liquid", lo2, P1, hi2, eta1)):
        for e, a, v, b in zip(eta, lo, val, hi):
            checks.append({"bound": name, "eta": e, "lower": a, "value": v, "upper": b,
                           "ok": bool(a <= v + 1e-12 and v <= b + 1e-12)})
    if sc is None:
        return checks
    if not env.window().ok:
        checks.append({"bound": "solid", "status": "not applicable"})
        return checks
    eta2 = np.linspace(beta0, sc.nodes[-1], SPOT_CHECKS)
    E2, P2 = eval_E(sc, eta2), eval_Phi(sc, eta2)
    lo1, hi1 = cert.E_bounds_solid(env, beta0, eta2)
    lo2, hi2 = cert.Phi_bounds_solid(env, beta0, eta2)
    for name, lo, val, hi, eta in (("E_solid", lo1, E2, hi1, eta2), ("Phi_solid", lo2, P2, hi2, eta2)):
        for e, a, v, b in zip(eta, lo, val, hi):
            checks.append({"bound": name, "eta": e, "lower": a, "value": v, "upper": b,
                           "ok": bool(a <= v + 1e-12 and v <= b + 1e-12)})
    return checks


def certify(cfg: RunConfig, alpha0, beta0):
    """Certificate dictionary at a given (alpha0, beta0), using converged profiles there."""
    if not 0 < alpha0 < beta0:
        raise SpecError(f"certify needs 0 < alpha0 < beta0, got ({alpha0}, {beta0})")
    spec, opts = cfg.problem, cfg.solver
    liquid, solid, u_c = dimensionless_model(spec)
    lres = solve_liquid(liquid, spec.nu, alpha0, beta0, opts)
    sres = solve_solid(solid, spec.nu, beta0, u_c, opts)
    env = cfg.envelopes
    if env is None:
        mu, delta = cfg.exponents or default_exponents(spec.nu)
        env = estimate_envelopes(liquid, lres.profile, solid, sres.profile, mu, delta, spec.nu)
    report = cert.certificate_report(env, alpha0, beta0, u_c, lres.max_ratio, sres.max_ratio)
    out = {"alpha0": alpha0, "beta0": beta0, "problem": spec_to_dict(spec),
           "report": report.to_dict(),
           "alpha_tilde": cert.alpha_tilde(env, beta0)}
    if report.window_ok:
        out["thresholds"] = cert.threshold_betas(env, u_c, opts.beta_range).to_dict()
    else:
        out["thresholds"] = {"status": "not applicable"}
    checks = _spot_checks(env, alpha0, beta0, lres.cache, sres.cache)
    out["spot_checks"] = checks
    out["spot_checks_ok"] = all(c.get("ok", True) for c in checks)
    return out


# -- sweep --------------------------------------------------------------------

SWEEP_HEADER = ("param", "value", "status", "code", "alpha0", "beta0", "epsilon", "sigma",
                "stefan_boiling", "stefan_melting", "message")


def sweep_row(cfg: RunConfig, param, value):
    try:
        spec = cfg.problem.replace(**{param: value})
        sol = solve(spec, cfg.solver, cfg.exponents, cfg.envelopes)
    except SpecError as exc:
        return (param, value, "config error", str(EXIT_CONFIG)) + (None,) * 6 + (str(exc),)
    except NoRootError as exc:
        return (param, value, "no root", str(EXIT_NO_ROOT)) + (None,) * 6 + (str(exc),)
    except ConvergenceError as exc:
        return (param, value, "no convergence", str(EXIT_NO_CONVERGENCE)) + (None,) * 6 + (str(exc),)
    c = sol.certificate
    return (param, value, "ok", str(EXIT_OK), sol.alpha0, sol.beta0, c.epsilon, c.sigma,
            sol.residuals["stefan_boiling"], sol.residuals["stefan_melting"], "")


def run_sweep(cfg: RunConfig, param, start, stop, steps):
    if param not in SWEEP_PARAMS:
        raise SpecError(f"sweep parameter must be one of {SWEEP_PARAMS}, got {param!r}")
    if steps < 1:
        raise SpecError("--steps must be at least 1")
    values = [start] if steps == 1 else np.linspace(start, stop, steps).tolist()
    return [sweep_row(cfg, param, float(v)) for v in values]


# -- argument parsing ---------------------------------------------------------

def _parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True, type=Path, help="TOML run configuration")
    common.add_argument("--out", default=None, help="output directory (overrides [output] dir)")
    common.add_argument("--format", choices=("csv", "json", "both"), default=None,
                        help="artifact format (overrides [output] format)")
    common.add_argument("--grid-n", type=int, default=None, dest="grid_n",
                        help="nodes per phase grid (overrides [solver] n)")
    common.add_argument("--quiet", action="store_true", help="no summary on stdout")

    p = argparse.ArgumentParser(prog="stefansim",
                                description="Similarity solutions of a two-phase Stefan problem.")
    sub = p.add_subparsers(dest="verb", required=True)
    sub.add_parser("solve", parents=[common], help="solve for the fronts and profiles")
    c = sub.add_parser("certify", parents=[common], help="evaluate the contraction certificates")
    c.add_argument("--alpha0", type=float, required=True, help="boiling front coefficient")
    c.add_argument("--beta0", type=float, required=True, help="melting front coefficient")
    s = sub.add_parser("sweep", parents=[common], help="solve over a range of one parameter")
    s.add_argument("--param", required=True, choices=SWEEP_PARAMS)
    s.add_argument("--start", type=float, required=True)
    s.add_argument("--stop", type=float, required=True)
    s.add_argument("--steps", type=int, required=True, help="number of values, endpoints included")
    return p


def main(argv=None):
    _setup_logging()
    args = _parser().parse_args(argv)
    try:
        cfg = _configure(args)
        out = _out_dir(args, cfg)
        if args.verb == "solve":
            code = run_solve(cfg, out, args.quiet)
        elif args.verb == "certify":
            write_json(out / "certificate.json", certify(cfg, args.alpha0, args.beta0))
            if not args.quiet:
                print(f"wrote {out / 'certificate.json'}")
            code = EXIT_OK
        else:
            rows = run_sweep(cfg, args.param, args.start, args.stop, args.steps)
            write_csv(out / "sweep.csv", SWEEP_HEADER, rows)
            if not args.quiet:
                ok = sum(r[2] == "ok" for r in rows)
                print(f"{ok}/{len(rows)} sweep points solved; wrote {out / 'sweep.csv'}")
            code = EXIT_OK
    except SpecError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NoRootError as exc:
        print(f"no root: {exc}", file=sys.stderr)
        return EXIT_NO_ROOT
    except ConvergenceError as exc:
        print(f"no convergence: {exc}", file=sys.stderr)
        return EXIT_NO_CONVERGENCE
    _write_meta(out, args.verb, args)
    return code


if __name__ == "__main__":
    sys.exit(main())
