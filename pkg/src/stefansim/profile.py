"""Discretized temperature profiles u(eta) with piecewise-linear interpolation."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import DomainError

LIQUID = "liquid"
SOLID = "solid"

#: default node count (power-of-two panels + 1)
DEFAULT_N = 513
#: grading constant of the solid grid map; node spacing grows by (1 + K)^2
SOLID_GRADING = 1.0


@dataclass(frozen=True, eq=False)
class Profile:
    """Immutable snapshot of u on a grid.

    For a solid profile the support is ``[nodes[0], inf)``; beyond the last
    node the profile equals ``tail_value``.
    """
    kind: str
    nodes: np.ndarray
    values: np.ndarray
    tail_value: float = math.nan

    def __post_init__(self):
        nodes = np.array(self.nodes, dtype=float)
        values = np.array(self.values, dtype=float)
        if nodes.ndim != 1 or nodes.shape != values.shape or nodes.size < 2:
            raise DomainError("profile needs matching 1-d nodes/values with >= 2 entries")
        if np.any(np.diff(nodes) <= 0):
            raise DomainError("profile nodes must be strictly increasing")
        if not np.all(np.isfinite(values)):
            raise DomainError("profile values must be finite")
        if self.kind not in (LIQUID, SOLID):
            raise DomainError(f"unknown profile kind {self.kind!r}")
        nodes.flags.writeable = False
        values.flags.writeable = False
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "values", values)

    @property
    def support(self):
        hi = math.inf if self.kind == SOLID else float(self.nodes[-1])
        return float(self.nodes[0]), hi

    @property
    def n(self):
        return self.nodes.size

    def with_values(self, values):
        return Profile(self.kind, self.nodes, values, self.tail_value)

    def __call__(self, eta):
        return eval_profile(self, eta)


def make_liquid_grid(alpha0, beta0, n=DEFAULT_N):
    """Uniform grid on [alpha0, beta0] with the affine profile 1 -> 0."""
    if not (0.0 < alpha0 and beta0 - alpha0 >= 1e-12):
        raise DomainError(f"need 0 < alpha0 < beta0 (got alpha0={alpha0}, beta0={beta0})")
    if n < 2:
        raise DomainError("liquid grid needs at least 2 nodes")
    nodes = np.linspace(alpha0, beta0, n)
    values = (beta0 - nodes) / (beta0 - alpha0)
    values[0], values[-1] = 1.0, 0.0
    return Profile(LIQUID, nodes, values)


def solid_nodes(beta0, eta_max, n=DEFAULT_N, grading=SOLID_GRADING):
    """Graded nodes on [beta0, eta_max].

    eta = beta0 + tau / (1 - tau) * (eta_max - beta0) / K for uniform tau in
    [0, K / (1 + K)]; spacing is finest at beta0.
    """
    tau = np.linspace(0.0, grading / (1.0 + grading), n)
    nodes = beta0 + tau / (1.0 - tau) * (eta_max - beta0) / grading
    nodes[0], nodes[-1] = beta0, eta_max
    return nodes


def make_solid_grid(beta0, u_c, n=DEFAULT_N, eta_max=None, grading=SOLID_GRADING):
    """Graded solid grid with initial values u_c (1 - exp(-(eta - beta0)))."""
    if not beta0 > 0:
        raise DomainError(f"need beta0 > 0, got {beta0}")
    if eta_max is None:
        eta_max = beta0 + 10.0
    if not eta_max - beta0 >= 1e-12:
        raise DomainError(f"need eta_max > beta0 (got {eta_max} <= {beta0})")
    if n < 2:
        raise DomainError("solid grid needs at least 2 nodes")
    nodes = solid_nodes(beta0, eta_max, n, grading)
    values = u_c * (1.0 - np.exp(-(nodes - beta0)))
    values = np.clip(values, min(u_c, 0.0), 0.0)
    values[0] = 0.0
    return Profile(SOLID, nodes, values, float(u_c))


def eval_profile(p: Profile, eta):
    """Piecewise-linear interpolation; solid profiles return tail_value past the last node."""
    eta_arr = np.asarray(eta, dtype=float)
    lo = p.nodes[0]
    hi = p.nodes[-1]
    slack = 1e-12 * max(1.0, abs(hi))
    if np.any(eta_arr < lo - slack):
        raise DomainError(f"eta below profile support [{lo}, ...)")
    if p.kind == LIQUID and np.any(eta_arr > hi + slack):
        raise DomainError(f"eta above liquid support [{lo}, {hi}]")
    out = np.interp(eta_arr, p.nodes, p.values)
    if p.kind == SOLID:
        out = np.where(eta_arr > hi, p.tail_value, out)
    if np.ndim(eta) == 0:
        return float(out)
    return out


def sup_distance(p: Profile, q: Profile):
    """Max over nodes of |p - q|; grids must match."""
    if p.nodes.shape != q.nodes.shape or not np.array_equal(p.nodes, q.nodes):
        raise DomainError("sup_distance needs profiles on identical grids")
    return float(np.max(np.abs(p.values - q.values)))


def remap(p: Profile, nodes):
    """Transfer p to new nodes by normalized position (warm starts between intervals)."""
    nodes = np.asarray(nodes, dtype=float)
    if p.kind == LIQUID:
        s_old = (p.nodes - p.nodes[0]) / (p.nodes[-1] - p.nodes[0])
        s_new = (nodes - nodes[0]) / (nodes[-1] - nodes[0])
        values = np.interp(s_new, s_old, p.values)
        values[0], values[-1] = 1.0, 0.0
        return Profile(LIQUID, nodes, values)
    # solid: keep eta - beta0 offsets, the far field is u_c anyway
    offs_old = p.nodes - p.nodes[0]
    offs_new = nodes - nodes[0]
    values = np.interp(offs_new, offs_old, p.values, right=p.tail_value)
    values[0] = 0.0
    return Profile(SOLID, nodes, values, p.tail_value)
