"""Exact discrete optimal transport for radial costs.

The transportation linear program is solved in-repo by the classical
transportation (network) simplex with Bland's smallest-index rule on both
the entering and the leaving variable, which rules out cycling.  Forbidden
arcs are priced with a big-M penalty and a positive flow on any of them at
optimality means the constrained instance is infeasible.  A permutation
brute-force oracle covers small equal-weight instances independently.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .costs import CostFunction, power_cost
from .errors import DimensionMismatch, Infeasible, TooLarge, UnequalWeights
from .measures import Coupling, DiscreteMeasure, make_coupling

_RC_TOL = 1e-11
_FORBIDDEN_FLOW_TOL = 1e-9


@dataclass(frozen=True)
class MKSolution:
    value: float
    plan: Coupling
    method: str  # "lp" | "brute_force"


def _cost_matrix(m0: DiscreteMeasure, m1: DiscreteMeasure,
                 cost: CostFunction) -> np.ndarray:
    diff = m0.points[:, None, :] - m1.points[None, :, :]
    return np.asarray(cost.eval(np.linalg.norm(diff, axis=2)), dtype=float)


def _northwest_corner(supply, demand):
    n, m = len(supply), len(demand)
    a = supply.copy()
    b = demand.copy()
    flow = np.zeros((n, m))
    basis = []
    i = j = 0
    while True:
        q = min(a[i], b[j])
        flow[i, j] = q
        basis.append((i, j))
        a[i] -= q
        b[j] -= q
        if i == n - 1 and j == m - 1:
            break
        if j == m - 1:
            i += 1
        elif i == n - 1:
            j += 1
        elif a[i] <= 0.0:
            i += 1
        else:
            j += 1
    return flow, basis


def _duals(basis, cost, n, m):
    u = np.full(n, np.nan)
    v = np.full(m, np.nan)
    rows = [[] for _ in range(n)]
    cols = [[] for _ in range(m)]
    for (i, j) in basis:
        rows[i].append(j)
        cols[j].append(i)
    u[0] = 0.0
    queue = deque([("r", 0)])
    while queue:
        kind, k = queue.popleft()
        if kind == "r":
            for j in rows[k]:
                if np.isnan(v[j]):
                    v[j] = cost[k, j] - u[k]
                    queue.append(("c", j))
        else:
            for i in cols[k]:
                if np.isnan(u[i]):
                    u[i] = cost[i, k] - v[k]
                    queue.append(("r", i))
    return u, v


def _tree_path(basis, i0, j0, n):
    """Unique alternating row/col path from row i0 to col j0 through the
    basis tree, returned as the sequence of cells along it."""
    adj: dict[tuple, list] = {}
    for (i, j) in basis:
        adj.setdefault(("r", i), []).append((("c", j), (i, j)))
        adj.setdefault(("c", j), []).append((("r", i), (i, j)))
    startnode = ("r", i0)
    target = ("c", j0)
    prev = {startnode: (None, None)}
    queue = deque([startnode])
    while queue:
        node = queue.popleft()
        if node == target:
            break
        for nxt, cell in adj.get(node, []):
            if nxt not in prev:
                prev[nxt] = (node, cell)
                queue.append(nxt)
    cells = []
    node = target
    while node != startnode:
        node, cell = prev[node]
        cells.append(cell)
    cells.reverse()
    return cells


def _transportation_simplex(supply, demand, cost):
    """Minimize sum(flow * cost) over the transportation polytope.

    Returns (flow, basis).  Deterministic: Bland smallest-index entering
    and leaving rules.
    """
    n, m = cost.shape
    flow, basis = _northwest_corner(np.asarray(supply, float),
                                    np.asarray(demand, float))
    scale = 1.0 + float(np.max(np.abs(cost)))
    max_iters = 20000 * (n + m)
    for _ in range(max_iters):
        u, v = _duals(basis, cost, n, m)
        reduced = cost - u[:, None] - v[None, :]
        basis_set = set(basis)
        entering = None
        # Bland: lexicographically smallest violating cell
        neg = np.argwhere(reduced < -_RC_TOL * scale)
        for i, j in neg:
            if (int(i), int(j)) not in basis_set:
                entering = (int(i), int(j))
                break
        if entering is None:
            return flow, basis
        path = _tree_path(basis, entering[0], entering[1], n)
        # cycle: entering (+), then alternating - / + along the tree path
        minus = path[0::2]
        plus = path[1::2]
        theta = min(flow[c] for c in minus)
        leaving = min(c for c in minus if flow[c] <= theta)
        flow[entering] += theta
        for c in plus:
            flow[c] += theta
        for c in minus:
            flow[c] -= theta
        flow[leaving] = 0.0
        basis[basis.index(leaving)] = entering
    raise RuntimeError("transportation simplex failed to terminate")


def solve_mk(m0: DiscreteMeasure, m1: DiscreteMeasure, cost: CostFunction,
             forbidden_arcs: Optional[Callable[[int, int], bool]] = None,
             ) -> MKSolution:
    """Exact optimum of the transportation LP with cost(|x_i - y_j|) arcs.

    ``forbidden_arcs(i, j)`` excludes arcs; Infeasible is raised when no
    plan avoids them.
    """
    if m0.dim != m1.dim:
        raise DimensionMismatch(f"dim {m0.dim} vs {m1.dim}")
    c = _cost_matrix(m0, m1, cost)
    if forbidden_arcs is None:
        work = c
        mask = None
    else:
        mask = np.array([[bool(forbidden_arcs(i, j)) for j in range(m1.n_atoms)]
                         for i in range(m0.n_atoms)])
        big_m = (m0.n_atoms + m1.n_atoms + 1) * (1.0 + float(np.max(c))) * 1e3
        work = np.where(mask, big_m, c)
    flow, _ = _transportation_simplex(m0.weights, m1.weights, work)
    flow = np.where(flow < 0, 0.0, flow)
    if mask is not None and float(flow[mask].sum()) > _FORBIDDEN_FLOW_TOL:
        raise Infeasible("no feasible plan avoids the forbidden arcs")
    value = float((flow * c).sum())
    return MKSolution(value=value, plan=make_coupling(m0, m1, flow),
                      method="lp")


def brute_force_mk(m0: DiscreteMeasure, m1: DiscreteMeasure,
                   cost: CostFunction) -> MKSolution:
    """Independent oracle: exact minimum over all permutation plans.

    Only equal-weight instances with matching atom counts n <= 8 are
    accepted; every permutation corresponds to a vertex of the Birkhoff
    polytope, which is where the optimum of the LP lies.
    """
    n = m0.n_atoms
    if n != m1.n_atoms:
        raise UnequalWeights("both measures need the same number of atoms")
    if n > 8:
        raise TooLarge(f"brute force is limited to n <= 8, got {n}")
    for w in (m0.weights, m1.weights):
        if np.max(np.abs(w - 1.0 / n)) > 1e-12:
            raise UnequalWeights("atoms must all carry weight 1/n")
    c = _cost_matrix(m0, m1, cost)
    best_value = np.inf
    best_perm = None
    for perm in itertools.permutations(range(n)):
        value = sum(c[i, perm[i]] for i in range(n))
        if value < best_value - 1e-15:
            best_value = value
            best_perm = perm
    plan = np.zeros((n, n))
    for i, j in enumerate(best_perm):
        plan[i, j] = 1.0 / n
    return MKSolution(value=float(best_value / n),
                      plan=make_coupling(m0, m1, plan),
                      method="brute_force")


def t_p(m0: DiscreteMeasure, m1: DiscreteMeasure, p: float) -> float:
    """Transport value under the power cost u**p; any p > 0 is allowed
    since the LP itself is cost-agnostic."""
    return solve_mk(m0, m1, power_cost(p)).value
