"""Exact crossing minimisation as a QUBO over the internal-node flip bits.

Variable ``x_u`` is 1 when the children of internal node ``u`` are swapped
relative to the input drawing.  For a pair of inter-tree edges ``ab`` and
``cd`` let ``v = lca(a, c)`` on the left and ``w = lca(b, d)`` on the right.
The pair crosses exactly when its input crossing state is toggled an even
number of times by ``x_v`` and ``x_w`` being both unflipped or both flipped
(input crossing) or toggled once (no input crossing).  Summing those 0/1
indicators gives an integral quadratic objective with no constraints.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .base import SolveResult, TanglegramSolver
from .core import Orientation, Tanglegram, count_crossings
from .recursive import _recursion_headroom


class InstanceTooLarge(ValueError):
    pass


@dataclass
class QuboModel:
    """``constant + sum(linear[i] x_i) + sum(q * x_i * x_j for (i, j), q in quadratic)``."""

    variables: list[tuple[str, int]]
    constant: int
    linear: list[int]
    quadratic: dict[tuple[int, int], int]

    @property
    def n_vars(self) -> int:
        return len(self.variables)

    def matrix(self) -> np.ndarray:
        """Symmetric coefficient matrix with zero diagonal."""
        Q = np.zeros((self.n_vars, self.n_vars))
        for (i, j), q in self.quadratic.items():
            Q[i, j] += q
            Q[j, i] += q
        return Q


def _lca_table(tree, leaf_order):
    """Left-to-right leaf positions and pairwise leaf LCAs of a tree."""
    pos = {a: i for i, a in enumerate(leaf_order)}
    table = {}
    for v in tree.internal_nodes:
        x, y = tree.children[v]
        for a in tree.leaf_sets[x]:
            for c in tree.leaf_sets[y]:
                table[a, c] = table[c, a] = v
    return pos, table


def build_qubo(t: Tanglegram) -> QuboModel:
    S, T = t.left, t.right
    variables = [("left", v) for v in S.internal_nodes] + [("right", w) for w in T.internal_nodes]
    index = {key: i for i, key in enumerate(variables)}
    pos_t, lca_t = _lca_table(T, T.leaves)
    # per (v, w): [input-crossing pairs, input-non-crossing pairs]
    groups: dict[tuple[int, int], list[int]] = {}
    for v in S.internal_nodes:
        x, y = S.children[v]
        vi = index["left", v]
        for a in S.leaf_sets[x]:
            b = t.matching[a]
            for c in S.leaf_sets[y]:
                d = t.matching[c]
                g = groups.setdefault((vi, index["right", lca_t[b, d]]), [0, 0])
                # a precedes c in the input drawing
                g[0 if pos_t[b] > pos_t[d] else 1] += 1
    constant = 0
    linear = [0] * len(variables)
    quadratic = {}
    for (i, j), (cross, keep) in groups.items():
        # cross * (1 - xi - xj + 2 xi xj) + keep * (xi + xj - 2 xi xj)
        constant += cross
        linear[i] += keep - cross
        linear[j] += keep - cross
        if cross != keep:
            quadratic[i, j] = 2 * (cross - keep)
    return QuboModel(variables, constant, linear, quadratic)


def assignment(model: QuboModel, t: Tanglegram, o: Orientation) -> list[int]:
    flips = {"left": o.left_flips, "right": o.right_flips}
    return [int(flips[side][v]) for side, v in model.variables]


def evaluate(model: QuboModel, x: Sequence[int]) -> int:
    if len(x) != model.n_vars:
        raise ValueError(f"assignment has {len(x)} values, model has {model.n_vars} variables")
    total = model.constant
    total += sum(c for c, xi in zip(model.linear, x) if xi)
    total += sum(q for (i, j), q in model.quadratic.items() if x[i] and x[j])
    return total


@dataclass
class ExactResult:
    optimum: int
    orientation: Orientation
    proved_optimal: bool
    nodes_explored: int
    time_s: float

    def to_solve_result(self, t: Tanglegram) -> SolveResult:
        stats = {
            "proved_optimal": self.proved_optimal,
            "nodes_explored": self.nodes_explored,
            "time_s": self.time_s,
        }
        return SolveResult(count_crossings(t, self.orientation), self.orientation, self.optimum, stats)


def _position_basis(tree):
    """Leaf positions as ``base + bits @ delta`` over the tree's flip bits."""
    nodes = tree.internal_nodes
    leaves = tree.leaves
    col = {a: i for i, a in enumerate(leaves)}
    size = [len(s) for s in tree.leaf_sets]
    base = np.zeros(len(leaves), dtype=np.int64)
    delta = np.zeros((len(nodes), len(leaves)), dtype=np.int64)
    for r, u in enumerate(nodes):
        first, second = tree.children[u]
        for a in tree.leaf_sets[first]:
            # unflipped: a comes before the sibling block; flipped: after it
            delta[r, col[a]] += size[second]
        for a in tree.leaf_sets[second]:
            base[col[a]] += size[first]
            delta[r, col[a]] -= size[first]
    return col, base, delta


def brute_force(t: Tanglegram, max_internal_nodes: int = 24, chunk: int = 1 << 14) -> ExactResult:
    """Enumerate every orientation, counting crossings from leaf positions."""
    start = time.perf_counter()
    kl, kr = len(t.left.internal_nodes), len(t.right.internal_nodes)
    k = kl + kr
    if k > max_internal_nodes:
        raise InstanceTooLarge(f"{k} internal nodes exceed the brute-force limit of {max_internal_nodes}")
    lcol, lbase, ldelta = _position_basis(t.left)
    rcol, rbase, rdelta = _position_basis(t.right)
    edges = list(t.matching.items())
    li = np.array([lcol[a] for a, _ in edges])
    ri = np.array([rcol[b] for _, b in edges])
    I, J = np.triu_indices(len(edges), 1)
    shifts = np.arange(k, dtype=np.int64)
    best_val, best_code = None, 0
    for lo in range(0, 1 << k, chunk):
        codes = np.arange(lo, min(lo + chunk, 1 << k), dtype=np.int64)
        bits = (codes[:, None] >> shifts) & 1
        lpos = (lbase + bits[:, :kl] @ ldelta)[:, li]
        rpos = (rbase + bits[:, kl:] @ rdelta)[:, ri]
        crossings = ((lpos[:, I] < lpos[:, J]) != (rpos[:, I] < rpos[:, J])).sum(axis=1)
        i = int(np.argmin(crossings))
        if best_val is None or crossings[i] < best_val:
            best_val, best_code = int(crossings[i]), int(codes[i])
    bits = [(best_code >> s) & 1 for s in range(k)]
    o = Orientation.from_vector(t, bits)
    return ExactResult(best_val, o, True, 1 << k, time.perf_counter() - start)


class _Timeout(Exception):
    pass


class _QuboSearch:
    """Depth-first branch-and-bound over a QUBO with a static variable order.

    Bounds (``x`` fixed on a prefix, free set ``F``, ``l'`` the linear
    coefficients with fixed quadratic partners folded in):

    ``termwise``: fixed value + sum_F min(0, l'_j) + sum_{j<k in F} min(0, q_jk)

    ``posiform``: each free-free term is rewritten as
    ``q/2 (x_j + x_k) - [q > 0] q/2 + |q|/2 * [x_j != x_k or x_j == x_k]``
    whose last part is non-negative, giving
    fixed value - sum_{q>0} q/2 + sum_F min(0, l'_j + h_j), h_j = sum_{k in F} q_jk / 2.

    Both bounds are exact once no free-free term remains, and the search
    completes such nodes greedily.
    """

    def __init__(self, model: QuboModel, bound: str, deadline: float, symmetric: bool):
        if bound not in ("posiform", "termwise"):
            raise ValueError(f"unknown bound {bound!r}")
        self.bound = bound
        self.deadline = deadline
        self.Q = model.matrix()
        self.k = model.n_vars
        lin = np.asarray(model.linear, dtype=float)
        mass = np.abs(lin) + np.abs(self.Q).sum(axis=1)
        self.order = [int(i) for i in np.argsort(-mass, kind="stable")]
        self.lin = lin
        self.constant = float(model.constant)
        self.symmetric = symmetric
        self.nodes = 0
        self.best_val = float("inf")
        self.best_x: np.ndarray | None = None

    def _bound(self, cval, leff, free, h, P, N):
        if self.bound == "posiform":
            return cval - P + np.minimum(0.0, (leff + h)[free]).sum()
        return cval + np.minimum(0.0, leff[free]).sum() + N

    def run(self, incumbent_val, incumbent_x):
        self.best_val = incumbent_val
        self.best_x = incumbent_x
        Q = self.Q
        free = np.ones(self.k, dtype=bool)
        h = Q.sum(axis=1) / 2
        upper = np.triu(Q, 1)
        P = upper[upper > 0].sum() / 2
        N = upper[upper < 0].sum()
        E = int((upper != 0).sum())
        x = np.zeros(self.k, dtype=np.int8)
        with _recursion_headroom(self.k):
            self._dfs(0, self.constant, self.lin.copy(), free, h, P, N, E, x)

    def _dfs(self, depth, cval, leff, free, h, P, N, E, x):
        self.nodes += 1
        if self.nodes & 255 == 0 and time.perf_counter() > self.deadline:
            raise _Timeout
        if E == 0:
            take = free & (leff < 0)
            val = cval + leff[take].sum()
            if val < self.best_val - 0.5:
                xs = x.copy()
                xs[take] = 1
                self.best_val, self.best_x = val, xs
            return
        if self._bound(cval, leff, free, h, P, N) > self.best_val - 1 + 1e-9:
            return
        i = self.order[depth]
        row = self.Q[i]
        free = free.copy()
        free[i] = False
        frow = row[free]
        h2 = h - row / 2
        P2 = P - frow[frow > 0].sum() / 2
        N2 = N - frow[frow < 0].sum()
        E2 = E - int(np.count_nonzero(frow))
        if depth == 0 and self.symmetric:
            values = (0,)
        else:
            values = (1, 0) if leff[i] + h[i] < 0 else (0, 1)
        for b in values:
            x[i] = b
            if b:
                self._dfs(depth + 1, cval + leff[i], leff + row, free, h2, P2, N2, E2, x)
            else:
                self._dfs(depth + 1, cval, leff, free, h2, P2, N2, E2, x)
        x[i] = 0


def solve_exact(
    t: Tanglegram,
    time_limit: float = 600.0,
    initial_upper_bound: int | Orientation | None = None,
    bound: str = "posiform",
) -> ExactResult:
    """Minimise the crossing QUBO by branch-and-bound.

    ``initial_upper_bound`` may be a crossing count or an orientation
    (typically a heuristic's layout).  Without it the input drawing seeds
    the incumbent.  When the time limit hits, the incumbent is returned
    with ``proved_optimal=False``.
    """
    start = time.perf_counter()
    model = build_qubo(t)
    search = _QuboSearch(model, bound, start + time_limit, symmetric=True)
    zero = np.zeros(model.n_vars, dtype=np.int8)
    inc_val, inc_x = float(model.constant), zero
    if isinstance(initial_upper_bound, Orientation):
        xs = np.array(assignment(model, t, initial_upper_bound), dtype=np.int8)
        val = evaluate(model, xs)
        if val < inc_val:
            inc_val, inc_x = float(val), xs
    elif initial_upper_bound is not None and initial_upper_bound + 1 < inc_val:
        inc_val, inc_x = float(initial_upper_bound + 1), None
    # the objective is invariant under flipping every bit, so the first
    # branching variable is pinned to 0; keep the incumbent on that side
    if inc_x is not None and model.n_vars and inc_x[search.order[0]]:
        inc_x = 1 - inc_x
    proved = True
    try:
        if model.n_vars:
            search.run(inc_val, inc_x)
    except _Timeout:
        proved = False
    if search.best_x is None:
        raise ValueError("no solution at or below the given upper bound; the bound is below the optimum")
    best_x = [int(v) for v in search.best_x]
    orientation = _orientation_from(model, t, best_x)
    return ExactResult(
        int(round(search.best_val)), orientation, proved, search.nodes, time.perf_counter() - start
    )


def _orientation_from(model: QuboModel, t: Tanglegram, x: Sequence[int]) -> Orientation:
    left = {v: False for v in t.left.internal_nodes}
    right = {v: False for v in t.right.internal_nodes}
    for (side, v), xi in zip(model.variables, x):
        (left if side == "left" else right)[v] = bool(xi)
    return Orientation(left, right)


class ExactSolver(TanglegramSolver):
    """Branch-and-bound on the crossing QUBO.

    Parameters
    ----------
    time_limit : float, default=600
        Seconds before the incumbent is returned unproved.
    bound : {"posiform", "termwise"}, default="posiform"
    warm_start : bool, default=True
        Seed the incumbent with the branch-and-bound recursive split layout.
    """

    def __init__(self, time_limit: float = 600.0, bound: str = "posiform", warm_start: bool = True):
        self.time_limit = time_limit
        self.bound = bound
        self.warm_start = warm_start

    def _solve(self, t):
        initial = None
        if self.warm_start:
            from .recursive import rec_split_bb

            initial = rec_split_bb(t).orientation
        return solve_exact(t, self.time_limit, initial, self.bound).to_solve_result(t)


class BruteForce(TanglegramSolver):
    def __init__(self, max_internal_nodes: int = 24):
        self.max_internal_nodes = max_internal_nodes

    def _solve(self, t):
        return brute_force(t, self.max_internal_nodes).to_solve_result(t)
