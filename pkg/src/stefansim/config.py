"""TOML run configuration: problem data, envelopes, solver options and outputs."""
from __future__ import annotations

import sys
from dataclasses import dataclass, field, fields
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .exceptions import DomainError, SpecError
from .quad import QuadOptions
from .solver import SolveOptions
from .thermal import EnvelopeParams, ProblemSpec, coefficient_from_dict

_SCALARS = ("nu", "theta_b", "theta_m", "l_b", "l_m", "gamma_b", "gamma_m")
_COEFFS = ("lambda1", "lambda2", "c1", "c2", "rho1", "rho2")
_FORMATS = ("csv", "json", "both")


@dataclass
class OutputConfig:
    dir: str = "out"
    format: str = "both"
    radii: tuple = (0.0, 4.0, 41)      # start, stop, count
    times: tuple = (0.25, 0.5, 1.0, 2.0, 4.0)

    def radius_grid(self):
        import numpy as np
        start, stop, count = self.radii
        return np.linspace(float(start), float(stop), int(count))

    @property
    def csv(self):
        return self.format in ("csv", "both")

    @property
    def json(self):
        return self.format in ("json", "both")


@dataclass
class RunConfig:
    problem: ProblemSpec
    solver: SolveOptions
    output: OutputConfig
    envelopes: EnvelopeParams | None = None    # None means fit to the solution
    exponents: tuple | None = None
    raw: dict = field(default_factory=dict)


def _number(table, key, where):
    try:
        v = table[key]
    except KeyError:
        raise SpecError(f"[{where}] missing required field '{key}'") from None
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise SpecError(f"[{where}] field '{key}' must be a number, got {v!r}")
    return float(v)


def _problem(d):
    if "problem" not in d:
        raise SpecError("config has no [problem] table")
    p = d["problem"]
    kw = {k: _number(p, k, "problem") for k in _SCALARS}
    for name in _COEFFS:
        if name not in p:
            raise SpecError(f"[problem] missing coefficient '{name}'")
        try:
            kw[name] = coefficient_from_dict(p[name])
        except SpecError as exc:
            raise SpecError(f"[problem] {name}: {exc}") from None
    unknown = set(p) - set(_SCALARS) - set(_COEFFS)
    if unknown:
        raise SpecError(f"[problem] unknown fields {sorted(unknown)}")
    return ProblemSpec(**kw)


def _solver(d):
    s = dict(d.get("solver", {}))
    names = {f.name for f in fields(SolveOptions)}
    unknown = set(s) - names - {"quad_abs_tol", "quad_rel_tol"}
    if unknown:
        raise SpecError(f"[solver] unknown fields {sorted(unknown)}")
    quad = QuadOptions(abs_tol=float(s.pop("quad_abs_tol", QuadOptions.abs_tol)),
                       rel_tol=float(s.pop("quad_rel_tol", QuadOptions.rel_tol)))
    if "beta_range" in s:
        s["beta_range"] = tuple(float(x) for x in s["beta_range"])
    try:
        return SolveOptions(quad=quad, **s)
    except (DomainError, TypeError) as exc:
        raise SpecError(f"[solver] {exc}") from None


def _envelopes(d, nu):
    e = dict(d.get("envelopes", {}))
    mode = e.pop("mode", "auto")
    exps = None
    if "mu" in e or "delta" in e:
        exps = (_number(e, "mu", "envelopes"), _number(e, "delta", "envelopes"))
    if mode == "auto":
        extra = set(e) - {"mu", "delta"}
        if extra:
            raise SpecError(f"[envelopes] mode 'auto' takes only mu/delta, got {sorted(extra)}")
        return None, exps
    if mode != "explicit":
        raise SpecError(f"[envelopes] mode must be 'auto' or 'explicit', got {mode!r}")
    names = [f.name for f in fields(EnvelopeParams) if f.name not in ("nu", "solid_fit_range")]
    kw = {k: _number(e, k, "envelopes") for k in names}
    return EnvelopeParams(nu=nu, solid_fit_range=(0.0, float("inf")), **kw), exps


def _output(d):
    o = dict(d.get("output", {}))
    out = OutputConfig()
    for k, v in o.items():
        if not hasattr(out, k):
            raise SpecError(f"[output] unknown field '{k}'")
        setattr(out, k, tuple(v) if isinstance(v, list) else v)
    if out.format not in _FORMATS:
        raise SpecError(f"[output] format must be one of {_FORMATS}")
    if len(out.radii) != 3:
        raise SpecError("[output] radii must be [start, stop, count]")
    if any(t <= 0 for t in out.times):
        raise SpecError("[output] times must be positive")
    return out


def config_from_dict(d) -> RunConfig:
    problem = _problem(d)
    env, exps = _envelopes(d, problem.nu)
    return RunConfig(problem, _solver(d), _output(d), env, exps, d)


def load_config(path) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise SpecError(f"cannot read config {path}: {exc}") from None
    try:
        d = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise SpecError(f"{path}: {exc}") from None
    try:
        return config_from_dict(d)
    except SpecError as exc:
        raise SpecError(f"{path}: {exc}") from None
