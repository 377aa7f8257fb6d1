"""Deterministic CSV/JSON writers and the dictionaries they serialize."""
from __future__ import annotations

import csv
import io
import json
import math
import os
from pathlib import Path

import numpy as np

from .field import ode_residual
from .profile import LIQUID, SOLID


def fmt(x):
    """Float as text with 17 significant digits (round-trips exactly); blanks for None."""
    if x is None:
        return ""
    if isinstance(x, str):
        return x
    return format(float(x), ".17g")


def jsonable(obj):
    """Plain JSON types; non-finite floats become the strings 'nan', 'inf', '-inf'."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isfinite(x):
            return x
        return "nan" if math.isnan(x) else ("inf" if x > 0 else "-inf")
    if obj is None or isinstance(obj, str):
        return obj
    if hasattr(obj, "to_dict"):
        return jsonable(obj.to_dict())
    return str(obj)


def _atomic_write(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "w", newline="") as fh:
        fh.write(text)
    os.replace(tmp, path)


def write_json(path, obj):
    _atomic_write(Path(path), json.dumps(jsonable(obj), indent=2, sort_keys=True) + "\n")


def write_csv(path, header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) if not isinstance(v, str) else v for v in row])
    _atomic_write(Path(path), buf.getvalue())


# -- table builders -----------------------------------------------------------

def profile_rows(sol):
    """Rows (eta, u1, u2); the shared node beta0 carries both values."""
    rows = [(e, u, None) for e, u in zip(sol.u1.nodes[:-1], sol.u1.values[:-1])]
    rows.append((sol.u1.nodes[-1], sol.u1.values[-1], sol.u2.values[0]))
    rows += [(e, None, u) for e, u in zip(sol.u2.nodes[1:], sol.u2.values[1:])]
    return rows


def boundary_rows(fs, times):
    return [(t, float(fs.alpha_of_t(t)), float(fs.beta_of_t(t))) for t in times]


def spec_to_dict(spec):
    out = {k: getattr(spec, k) for k in ("nu", "theta_b", "theta_m", "l_b", "l_m",
                                         "gamma_b", "gamma_m")}
    for k in ("lambda1", "lambda2", "c1", "c2", "rho1", "rho2"):
        f = getattr(spec, k)
        out[k] = f.to_dict() if hasattr(f, "to_dict") else repr(f)
    out["u_c"] = spec.u_c
    return out


def solution_to_dict(sol):
    """Everything a solve produced, including the profile grids for round-tripping."""
    from dataclasses import asdict

    liquid_model = sol.liquid_cache.model
    solid_model = sol.solid_cache.model if sol.solid_cache is not None else None
    ode = {"liquid": ode_residual(sol, liquid_model, LIQUID)}
    if solid_model is not None:
        ode["solid"] = ode_residual(sol, solid_model, SOLID)
    opts = asdict(sol.options)
    d = sol.diagnostics
    return {
        "alpha0": sol.alpha0,
        "beta0": sol.beta0,
        "problem": spec_to_dict(sol.spec),
        "options": opts,
        "certificate": sol.certificate.to_dict(),
        "residuals": dict(sol.residuals, ode_liquid=ode["liquid"], ode_solid=ode.get("solid")),
        "iterations": {
            "liquid": d["iterations_liquid"], "solid": d["iterations_solid"],
            "ratios_liquid": d["ratios_liquid"], "ratios_solid": d["ratios_solid"],
            "damping_liquid": d["damping_liquid"], "damping_solid": d["damping_solid"],
        },
        "roots": {"brackets": d["brackets"], "other_brackets": d["other_brackets"],
                  "residual_trace": [list(t) for t in d["residual_trace"]]},
        "thresholds": d["thresholds"],
        "interface": d["interface"],
        "kernels": {k: d[k] for k in ("phi1", "phi2", "E1_beta0", "phi1_frozen", "phi2_frozen",
                                      "balance_frozen", "eta_max")},
        "profiles": {
            "liquid": {"eta": sol.u1.nodes, "u": sol.u1.values},
            "solid": {"eta": sol.u2.nodes, "u": sol.u2.values, "tail": sol.u2.tail_value},
        },
    }
