"""Recursive splitting heuristics.

A subinstance is a pair ``(u, w)`` of a left node and a right node; its
edges are the matching edges between ``leaves(u)`` and ``leaves(w)``.  At
each subinstance the four arrangements of the children (``S1``/``S2`` of
``u``, ``T1``/``T2`` of ``w``) are scored by their forced current-level
crossings plus the values of two recursive subinstances.

* :func:`rec_split` recurses on the upper and the lower child pair of each
  arrangement.
* :func:`rec_split_improved` fixes one split per subinstance, whichever of
  the straight ``{(S1,T1),(S2,T2)}`` and diagonal ``{(S1,T2),(S2,T1)}``
  pairings keeps more edges, and scores all four arrangements against it.
* :func:`rec_split_bb` computes the same thing as ``rec_split_improved`` by
  depth-first branch-and-bound with an incumbent.
"""

from __future__ import annotations

import sys
import time
from contextlib import contextmanager
from dataclasses import dataclass

import numpy as np

from .base import SolveResult, TanglegramSolver
from .core import BinaryTree, Orientation, StructureError, Tanglegram, count_crossings

# (flip left root, flip right root) in tie-break order: (S1,T1) on top first
ARRANGEMENTS = ((False, False), (False, True), (True, False), (True, True))


@dataclass(frozen=True)
class SubInstance:
    left_root: int
    right_root: int
    edges: frozenset[tuple[int, int]]

    @classmethod
    def of(cls, t: Tanglegram, u: int, w: int) -> "SubInstance":
        lu, rw = t.left.leaf_sets[u], t.right.leaf_sets[w]
        return cls(u, w, frozenset((a, b) for a, b in t.matching.items() if a in lu and b in rw))


@dataclass(frozen=True)
class EdgeClassCounts:
    e11: int
    e12: int
    e21: int
    e22: int

    @property
    def total(self) -> int:
        return self.e11 + self.e12 + self.e21 + self.e22


def edge_class_counts(t: Tanglegram, si: SubInstance) -> EdgeClassCounts:
    """Classify the subinstance's edges by child of ``left_root`` and of ``right_root``."""
    if t.left.is_leaf(si.left_root) or t.right.is_leaf(si.right_root):
        raise StructureError("edge classes need two internal roots")
    s1, s2 = (t.left.leaf_sets[c] for c in t.left.children[si.left_root])
    t1, t2 = (t.right.leaf_sets[c] for c in t.right.children[si.right_root])
    e = {(i, j): 0 for i in (1, 2) for j in (1, 2)}
    for a, b in si.edges:
        e[(1 if a in s1 else 2, 1 if b in t1 else 2)] += 1
    return EdgeClassCounts(e[1, 1], e[1, 2], e[2, 1], e[2, 2])


def current_level_crossings(c: EdgeClassCounts, arrangement: tuple[bool, bool]) -> int:
    """Edge pairs forced to cross by ``arrangement`` whatever happens below.

    With ``S1`` and ``T1`` on top the diagonal classes ``S1->T2`` and
    ``S2->T1`` cross pairwise; flipping exactly one root makes the straight
    classes cross instead.
    """
    flip_left, flip_right = arrangement
    if flip_left == flip_right:
        return c.e12 * c.e21
    return c.e11 * c.e22


def shared_leaf_counts(t: Tanglegram) -> np.ndarray:
    """``C[u, w]`` = number of matching edges from ``leaves(u)`` to ``leaves(w)``."""
    col = {a: i for i, a in enumerate(t.left.leaves)}
    a_ind = np.zeros((len(t.left), t.n), dtype=np.int64)
    b_ind = np.zeros((len(t.right), t.n), dtype=np.int64)
    for u in range(len(t.left)):
        for a in t.left.leaf_sets[u]:
            a_ind[u, col[a]] = 1
    inv = t.inverse_matching
    for w in range(len(t.right)):
        for b in t.right.leaf_sets[w]:
            b_ind[w, col[inv[b]]] = 1
    return a_ind @ b_ind.T


@contextmanager
def _recursion_headroom(depth: int):
    old = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old, 4 * depth + 200))
    try:
        yield
    finally:
        sys.setrecursionlimit(old)


@dataclass(frozen=True)
class _Context:
    """Where the edges leaving a subinstance go.

    ``up_right``/``down_right`` are the right-tree subtrees drawn above and
    below the subinstance's right block; ``up_left``/``down_left`` likewise
    on the left.  An edge from the left block to ``up_right`` is an upward
    stub, and so on.
    """

    up_left: tuple[int, ...] = ()
    down_left: tuple[int, ...] = ()
    up_right: tuple[int, ...] = ()
    down_right: tuple[int, ...] = ()


class _Splitter:
    """Shared state for one solve: the edge-count table and per-key choices."""

    def __init__(self, t: Tanglegram):
        self.t = t
        self.S: BinaryTree = t.left
        self.T: BinaryTree = t.right
        self.C = shared_leaf_counts(t).tolist()
        self.choice: dict[tuple, tuple[tuple[bool, bool], tuple]] = {}
        self.memo: dict[tuple, int] = {}
        self.visited = 0
        self.pruned = 0
        self.max_depth = 0

    def is_base(self, u: int, w: int) -> bool:
        return not self.S.children[u] or not self.T.children[w] or self.C[u][w] == 0

    def counts(self, u: int, w: int) -> EdgeClassCounts:
        (u1, u2), (w1, w2) = self.S.children[u], self.T.children[w]
        C = self.C
        return EdgeClassCounts(C[u1][w1], C[u1][w2], C[u2][w1], C[u2][w2])

    def key(self, u: int, w: int, ctx: _Context) -> tuple:
        # only outside subtrees that actually receive edges affect the value
        C = self.C
        return (
            u,
            w,
            tuple(z for z in ctx.up_right if C[u][z]),
            tuple(z for z in ctx.up_left if C[z][w]),
        )

    def improved_split(self, u: int, w: int, c: EdgeClassCounts):
        (u1, u2), (w1, w2) = self.S.children[u], self.T.children[w]
        if c.e11 + c.e22 >= c.e12 + c.e21:
            return ((u1, w1), (u2, w2))
        return ((u1, w2), (u2, w1))

    def level_cost(self, u: int, w: int, ctx: _Context, arr) -> int:
        """Crossings fixed once ``arr`` is chosen at ``(u, w)``.

        Besides the current-level pairs this counts stubs against the
        retained edges of the opposite child: a downward stub from the top
        child crosses every retained edge of the bottom child, an upward
        stub from the bottom child every retained edge of the top child,
        and symmetrically on the right.
        """
        C = self.C
        (u1, u2), (w1, w2) = self.S.children[u], self.T.children[w]
        s_top, s_bot = (u2, u1) if arr[0] else (u1, u2)
        t_top, t_bot = (w2, w1) if arr[1] else (w1, w2)
        cost = C[s_top][t_bot] * C[s_bot][t_top]
        cost += sum(C[s_top][z] for z in ctx.down_right) * C[s_bot][w]
        cost += sum(C[s_bot][z] for z in ctx.up_right) * C[s_top][w]
        cost += sum(C[z][t_top] for z in ctx.down_left) * C[u][t_bot]
        cost += sum(C[z][t_bot] for z in ctx.up_left) * C[u][t_top]
        return cost

    def children(self, u: int, w: int, ctx: _Context, arr, pairs):
        """Child subinstances with their contexts under arrangement ``arr``."""
        (u1, u2), (w1, w2) = self.S.children[u], self.T.children[w]
        s_top = u2 if arr[0] else u1
        t_top = w2 if arr[1] else w1
        out = []
        for x, y in pairs:
            x_sib = u1 if x == u2 else u2
            y_sib = w1 if y == w2 else w2
            up_l, down_l = ctx.up_left, ctx.down_left
            if x == s_top:
                down_l = down_l + (x_sib,)
            else:
                up_l = up_l + (x_sib,)
            up_r, down_r = ctx.up_right, ctx.down_right
            if y == t_top:
                down_r = down_r + (y_sib,)
            else:
                up_r = up_r + (y_sib,)
            out.append((x, y, _Context(up_l, down_l, up_r, down_r)))
        return out

    def pairs(self, method: str, u: int, w: int, arr):
        (u1, u2), (w1, w2) = self.S.children[u], self.T.children[w]
        if method == "original":
            s_top, s_bot = (u2, u1) if arr[0] else (u1, u2)
            t_top, t_bot = (w2, w1) if arr[1] else (w1, w2)
            return ((s_top, t_top), (s_bot, t_bot))
        return self.improved_split(u, w, self.counts(u, w))

    def exhaustive(self, method: str, u: int, w: int, ctx: _Context, depth: int = 0) -> int:
        """Minimum over all four arrangements, recursing into both children of each."""
        if self.is_base(u, w):
            return 0
        key = self.key(u, w, ctx)
        if key in self.memo:
            return self.memo[key]
        self.visited += 1
        self.max_depth = max(self.max_depth, depth)
        best = None
        for arr in ARRANGEMENTS:
            subs = self.children(u, w, ctx, arr, self.pairs(method, u, w, arr))
            total = self.level_cost(u, w, ctx, arr)
            total += sum(self.exhaustive(method, x, y, c, depth + 1) for x, y, c in subs)
            if best is None or total < best[0]:
                best = (total, arr, subs)
        self.choice[key] = (best[1], best[2])
        self.memo[key] = best[0]
        return best[0]

    def branch_and_bound(self, u: int, w: int, ctx: _Context, bound: float, depth: int = 0):
        """Best value below ``bound`` as ``(value, True)``, else ``(bound, False)``.

        A ``False`` result only certifies that the subinstance cannot beat
        ``bound``; exact results are memoised.
        """
        if self.is_base(u, w):
            return 0, True
        key = self.key(u, w, ctx)
        if key in self.memo:
            return self.memo[key], True
        self.visited += 1
        self.max_depth = max(self.max_depth, depth)
        pairs = self.improved_split(u, w, self.counts(u, w))
        costs = [self.level_cost(u, w, ctx, arr) for arr in ARRANGEMENTS]
        # cheapest arrangement first; its descent yields the first incumbent
        order = sorted(range(4), key=lambda i: (costs[i], i))
        incumbent = bound
        best = None
        for i in order:
            arr = ARRANGEMENTS[i]
            acc = costs[i]
            if acc >= incumbent:
                self.pruned += 1
                continue
            subs = self.children(u, w, ctx, arr, pairs)
            for x, y, c in subs:
                val, _ = self.branch_and_bound(x, y, c, incumbent - acc, depth + 1)
                acc += val
                if acc >= incumbent:
                    break
            if acc >= incumbent:
                self.pruned += 1
                continue
            incumbent, best = acc, (arr, subs)
        if best is None:
            return bound, False
        self.choice[key] = best
        self.memo[key] = incumbent
        return incumbent, True

    def orientation(self) -> Orientation:
        left = {v: False for v in self.S.internal_nodes}
        right = {v: False for v in self.T.internal_nodes}
        stack = [(self.S.root, self.T.root, _Context())]
        while stack:
            u, w, ctx = stack.pop()
            if self.is_base(u, w):
                continue
            (fl, fr), subs = self.choice[self.key(u, w, ctx)]
            left[u], right[w] = fl, fr
            stack.extend(subs)
        return Orientation(left, right)

    def run(self, method: str) -> SolveResult:
        root = (self.S.root, self.T.root)
        start = time.perf_counter()
        with _recursion_headroom(self.t.min_height):
            if method in ("original", "improved"):
                objective = self.exhaustive(method, *root, _Context())
            elif method == "bb":
                objective, exact = self.branch_and_bound(*root, _Context(), float("inf"))
                assert exact
            else:
                raise ValueError(f"unknown method {method!r}")
        o = self.orientation()
        elapsed = time.perf_counter() - start
        stats = {
            "objective": int(objective),
            "visited": self.visited,
            "pruned": self.pruned,
            "max_depth": self.max_depth,
            "time_s": elapsed,
        }
        return SolveResult(count_crossings(self.t, o), o, int(objective), stats)


def rec_split(t: Tanglegram) -> SolveResult:
    return _Splitter(t).run("original")


def rec_split_improved(t: Tanglegram) -> SolveResult:
    return _Splitter(t).run("improved")


def rec_split_bb(t: Tanglegram) -> SolveResult:
    return _Splitter(t).run("bb")


class RecSplit(TanglegramSolver):
    """Original recursive splitting heuristic (upper/lower subinstances)."""

    def _solve(self, t):
        return rec_split(t)


class RecSplitImproved(TanglegramSolver):
    """Recursive splitting that keeps the split retaining more edges.

    Parameters
    ----------
    branch_and_bound : bool, default=False
        Search arrangements depth-first with pruning against an incumbent.
        The objective is identical either way; among equally good
        arrangements the two searches may pick different ones.
    """

    def __init__(self, branch_and_bound: bool = False):
        self.branch_and_bound = branch_and_bound

    def _solve(self, t):
        return rec_split_bb(t) if self.branch_and_bound else rec_split_improved(t)
