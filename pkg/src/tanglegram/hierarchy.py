"""Hierarchy sort: level-wise barycentric crossing reduction.

Both trees are padded with unary dummy nodes so every leaf sits on the
same level ``H``.  A collapse-and-expand cycle then visits the working
levels ``H, H-1, ..., 1, 2, ..., H``; at each working level the level's
nodes act as units, and sibling units of the free tree are swapped when
their barycenters (mean positions of matched units in the fixed tree) are
out of order.  The fixed and free roles alternate until the crossing count
stops dropping.  Crossings are always counted at the true leaf level, and
the best layout seen is returned.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field

from .base import SolveResult, TanglegramSolver
from .core import BinaryTree, Orientation, Tanglegram, count_crossings

logger = logging.getLogger(__name__)


class StateError(RuntimeError):
    pass


@dataclass(frozen=True, eq=False)
class LeveledTree:
    """A binary tree padded with dummy chains to a common depth.

    Real nodes keep their ids; dummies get ids ``len(base)`` onwards.  A
    dummy chain is spliced in above each shallow leaf, so the leaf itself
    ends up on level ``depth``.
    """

    base: BinaryTree
    depth: int
    parent: tuple[int, ...]
    children: tuple[tuple[int, ...], ...]
    level: tuple[int, ...]

    @classmethod
    def pad(cls, tree: BinaryTree, depth: int) -> "LeveledTree":
        if depth < tree.height:
            raise ValueError("cannot pad a tree to less than its height")
        parent = list(tree.parent)
        children = [list(c) for c in tree.children]
        level = list(tree.depth)
        for leaf in tree.leaves:
            missing = depth - tree.depth[leaf]
            if not missing:
                continue
            top = parent[leaf]
            above = top
            for k in range(missing):
                d = len(parent)
                parent.append(above)
                children.append([])
                level.append(tree.depth[leaf] + k)
                if above == top:
                    children[top][children[top].index(leaf)] = d
                else:
                    children[above].append(d)
                above = d
            children[above].append(leaf)
            parent[leaf] = above
            level[leaf] = depth
        return cls(tree, depth, tuple(parent), tuple(tuple(c) for c in children), tuple(level))

    @property
    def n_dummies(self) -> int:
        return len(self.parent) - len(self.base)

    def is_dummy(self, v: int) -> bool:
        return v >= len(self.base)

    @property
    def leaf_levels(self) -> set[int]:
        return {self.level[v] for v in self.base.leaves}

    def units(self, level: int, flips) -> list[int]:
        """Nodes on ``level`` from top to bottom under ``flips``."""
        out = []
        stack = [self.base.root]
        while stack:
            v = stack.pop()
            if self.level[v] == level:
                out.append(v)
                continue
            kids = self.children[v]
            if len(kids) == 2 and flips[v]:
                kids = kids[::-1]
            stack.extend(reversed(kids))
        return out

    def ancestor_at(self, v: int, level: int) -> int:
        while self.level[v] > level:
            v = self.parent[v]
        return v

    def contract(self) -> BinaryTree:
        """Drop the dummy chains again; the result equals :attr:`base`."""
        m = len(self.base)
        parent = list(self.parent[:m])
        children = [list(c) for c in self.children[:m]]
        for v in range(m):
            p = parent[v]
            while p >= m:
                p = self.parent[p]
            parent[v] = p
            kids = []
            for c in children[v]:
                while c >= m:
                    (c,) = self.children[c]
                kids.append(c)
            children[v] = kids
        return BinaryTree(tuple(parent), tuple(tuple(c) for c in children), self.base.labels, self.base.root)


def equalize_depth(t: Tanglegram) -> tuple[LeveledTree, LeveledTree]:
    H = t.max_height
    return LeveledTree.pad(t.left, H), LeveledTree.pad(t.right, H)


@dataclass
class HsState:
    """Mutable state of one hierarchy-sort run."""

    t: Tanglegram
    left: LeveledTree
    right: LeveledTree
    flips: dict[str, dict[int, bool]]
    current_level: int
    best_crossings: int
    best_orientation: Orientation
    crossings: int
    cycles: int = 0
    max_passes: int = 0
    swaps: int = 0
    history: list[int] = field(default_factory=list)

    @classmethod
    def start(cls, t: Tanglegram) -> "HsState":
        left, right = equalize_depth(t)
        o = Orientation.identity(t)
        c = count_crossings(t, o)
        flips = {"left": dict(o.left_flips), "right": dict(o.right_flips)}
        return cls(t, left, right, flips, left.depth, c, o, c, history=[c])

    @property
    def H(self) -> int:
        return self.left.depth

    @property
    def orientation(self) -> Orientation:
        return Orientation(dict(self.flips["left"]), dict(self.flips["right"]))

    def tree(self, side: str) -> LeveledTree:
        return self.left if side == "left" else self.right

    def partner(self, side: str, leaf: int) -> int:
        return self.t.matching[leaf] if side == "left" else self.t.inverse_matching[leaf]

    def recount(self) -> int:
        o = self.orientation
        self.crossings = count_crossings(self.t, o)
        self.history.append(self.crossings)
        if self.crossings < self.best_crossings:
            self.best_crossings, self.best_orientation = self.crossings, o
        return self.crossings


def collapse(state: HsState) -> HsState:
    if state.current_level <= 1:
        raise StateError("already at the level below the roots")
    state.current_level -= 1
    return state


def expand(state: HsState) -> HsState:
    if state.current_level >= state.H:
        raise StateError("already at the leaf level")
    state.current_level += 1
    return state


def barycenters(state: HsState, level: int, fixed_side: str) -> dict[int, float]:
    """Barycenter of every free-tree node on ``level`` that has a real parent."""
    free_side = "right" if fixed_side == "left" else "left"
    fixed, free = state.tree(fixed_side), state.tree(free_side)
    pos = {u: i for i, u in enumerate(fixed.units(level, state.flips[fixed_side]), 1)}
    out = {}
    for p in free.base.internal_nodes:
        if free.level[p] != level - 1:
            continue
        for c in free.base.children[p]:
            leaves = free.base.leaf_sets[c]
            total = sum(pos[fixed.ancestor_at(state.partner(free_side, a), level)] for a in leaves)
            out[c] = total / len(leaves)
    return out


def barycentric_pass(state: HsState, level: int, fixed_side: str) -> int:
    """One sweep over the free tree's real parents of ``level``; returns swaps made.

    Barycenters are taken from the fixed tree's order at the start of the
    sweep; equal barycenters never swap.
    """
    free_side = "right" if fixed_side == "left" else "left"
    free = state.tree(free_side)
    flips = state.flips[free_side]
    bary = barycenters(state, level, fixed_side)
    swaps = 0
    for p in free.units(level - 1, flips):
        if free.is_dummy(p) or not free.base.children[p]:
            continue
        top, bottom = free.base.children[p]
        if flips[p]:
            top, bottom = bottom, top
        if bary[top] > bary[bottom]:
            flips[p] = not flips[p]
            swaps += 1
    state.swaps += swaps
    state.recount()
    return swaps


def reduce_level(state: HsState, level: int, max_passes: int = 4, first_free: str = "right") -> int:
    """Alternate fixed sides on ``level`` until two passes in a row give no gain."""
    sides = ("left", "right") if first_free == "right" else ("right", "left")
    counts = [state.crossings]
    swaps = passes = 0
    while passes < max_passes:
        swaps += barycentric_pass(state, level, sides[passes % 2])
        passes += 1
        counts.append(state.crossings)
        if passes >= 2 and counts[-1] >= counts[-3]:
            break
    state.max_passes = max(state.max_passes, passes)
    return swaps


def hierarchy_sort(
    t: Tanglegram, max_cycles: int = 8, max_passes: int = 4, first_free: str = "right"
) -> SolveResult:
    start = time.perf_counter()
    state = HsState.start(t)
    while state.cycles < max_cycles:
        before = state.crossings
        state.cycles += 1
        swaps = reduce_level(state, state.current_level, max_passes, first_free)
        while state.current_level > 1:
            collapse(state)
            swaps += reduce_level(state, state.current_level, max_passes, first_free)
        while state.current_level < state.H:
            expand(state)
            swaps += reduce_level(state, state.current_level, max_passes, first_free)
        if swaps == 0 or state.crossings >= before:
            break
    logger.debug("hierarchy sort: %d cycles, at most %d passes per level", state.cycles, state.max_passes)
    o = state.best_orientation
    stats = {
        "initial_crossings": state.history[0],
        "cycles": state.cycles,
        "max_passes": state.max_passes,
        "swaps": state.swaps,
        "dummies": state.left.n_dummies + state.right.n_dummies,
        "time_s": time.perf_counter() - start,
    }
    crossings = count_crossings(t, o)
    return SolveResult(crossings, o, crossings, stats)


class HierarchySort(TanglegramSolver):
    """Collapse-and-expand barycentric heuristic.

    Parameters
    ----------
    max_cycles : int, default=8
        Upper bound on collapse-and-expand cycles.
    max_passes : int, default=4
        Upper bound on alternating barycentric passes per level.
    first_free : {"right", "left"}, default="right"
        Which tree is reordered first at each level.
    """

    def __init__(self, max_cycles: int = 8, max_passes: int = 4, first_free: str = "right"):
        self.max_cycles = max_cycles
        self.max_passes = max_passes
        self.first_free = first_free

    def _solve(self, t):
        if self.first_free not in ("left", "right"):
            raise ValueError("first_free must be 'left' or 'right'")
        return hierarchy_sort(t, self.max_cycles, self.max_passes, self.first_free)
