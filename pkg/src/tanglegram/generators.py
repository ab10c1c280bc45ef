"""Seeded random tanglegram families.

* ``A``: two complete binary trees, uniformly random leaf matching.
* ``B``: two identical complete trees; the right tree's leaves are then
  swapped locally (:func:`mutate_leaf_swaps`).
* ``C``: two random trees built by repeatedly joining two random nodes,
  uniformly random matching.
* ``D``: a ``C``-style tree and a mutated copy (local leaf swaps plus
  subtree reattachments, :func:`mutate_general`).

All randomness comes from a :class:`numpy.random.Generator`; instance
files written by :func:`generate_set` are the reproducibility contract.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from .core import BinaryTree, Tanglegram
from .io import save_tanglegram

SETS = ("A", "B", "C", "D")
BENCHMARK_SIZES = {
    "A": (16, 32, 64, 128, 256),
    "B": (16, 32, 64, 128, 256),
    "C": tuple(range(20, 201, 20)),
    "D": tuple(range(20, 201, 20)),
}


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class GenConfig:
    set: str
    n: int
    count: int = 10
    seed: int = 0
    swap_fraction: float | None = None
    reattach_fraction: float = 0.25
    climb_probability: float = 0.75

    def __post_init__(self):
        if self.set not in SETS:
            raise ConfigError(f"unknown set {self.set!r}; choose from {SETS}")
        if self.n < 2:
            raise ConfigError("n must be at least 2")
        if self.set in "AB" and self.n & (self.n - 1):
            raise ConfigError(f"set {self.set} needs n to be a power of two, got {self.n}")
        if self.count < 1:
            raise ConfigError("count must be positive")

    @property
    def swaps(self) -> float:
        if self.swap_fraction is not None:
            return self.swap_fraction
        return 0.20 if self.set == "B" else 0.10


def _labels(n: int) -> list[str]:
    width = len(str(n))
    return [f"t{i:0{width}d}" for i in range(1, n + 1)]


# trees are built from mutable child lists, then frozen
def _freeze(children: list[list[int]], labels: list[str | None], root: int) -> BinaryTree:
    """Renumber reachable nodes in post-order (leaves first) and build a tree."""
    order = []
    stack = [(root, False)]
    while stack:
        v, done = stack.pop()
        if done or not children[v]:
            order.append(v)
            continue
        stack.append((v, True))
        stack.extend((c, False) for c in reversed(children[v]))
    leaves = [v for v in order if not children[v]]
    internal = [v for v in order if children[v]]
    new_id = {v: i for i, v in enumerate(leaves + internal)}
    m = len(new_id)
    parent = [-1] * m
    kids: list[tuple[int, ...]] = [()] * m
    labs: list[str | None] = [None] * m
    for v, i in new_id.items():
        kids[i] = tuple(new_id[c] for c in children[v])
        for c in kids[i]:
            parent[c] = i
        labs[i] = labels[v] if not children[v] else None
    return BinaryTree(tuple(parent), tuple(kids), tuple(labs), new_id[root])


def complete_tree(labels: list[str]) -> BinaryTree:
    n = len(labels)
    if n & (n - 1):
        raise ConfigError("complete trees need a power-of-two leaf count")
    children: list[list[int]] = [[] for _ in range(n)]
    names: list[str | None] = list(labels)
    level = list(range(n))
    while len(level) > 1:
        nxt = []
        for i in range(0, len(level), 2):
            children.append([level[i], level[i + 1]])
            names.append(None)
            nxt.append(len(children) - 1)
        level = nxt
    return _freeze(children, names, level[0])


def random_join_tree(labels: list[str], rng: np.random.Generator) -> BinaryTree:
    children: list[list[int]] = [[] for _ in labels]
    names: list[str | None] = list(labels)
    pool = list(range(len(labels)))
    while len(pool) > 1:
        i, j = rng.choice(len(pool), size=2, replace=False)
        a, b = pool[i], pool[j]
        children.append([a, b])
        names.append(None)
        for k in sorted((i, j), reverse=True):
            pool.pop(k)
        pool.append(len(children) - 1)
    return _freeze(children, names, pool[0])


def relabel(tree: BinaryTree, mapping: dict[str, str]) -> BinaryTree:
    labels = tuple(mapping.get(lab, lab) if lab is not None else None for lab in tree.labels)
    return BinaryTree(tree.parent, tree.children, labels, tree.root)


def _random_matching(left: BinaryTree, right: BinaryTree, rng) -> Tanglegram:
    names = [left.labels[a] for a in left.leaves]
    perm = rng.permutation(len(names))
    mapping = {right.labels[b]: names[perm[i]] for i, b in enumerate(right.leaves)}
    return Tanglegram.from_trees(left, relabel(right, mapping))


def gen_complete_random(n: int, rng: np.random.Generator) -> Tanglegram:
    labels = _labels(n)
    return _random_matching(complete_tree(labels), complete_tree(labels), rng)


def gen_general_random(n: int, rng: np.random.Generator) -> Tanglegram:
    if n < 2:
        raise ConfigError("n must be at least 2")
    labels = _labels(n)
    return _random_matching(random_join_tree(labels, rng), random_join_tree(labels, rng), rng)


def _swap_partner(tree: BinaryTree, leaf: int, rng, climb_probability: float) -> int:
    v = leaf
    while v != tree.root and rng.random() < climb_probability:
        v = tree.parent[v]
    while tree.children[v]:
        v = tree.children[v][int(rng.integers(2))]
    return v


def mutate_leaf_swaps(
    t: Tanglegram, fraction: float, rng: np.random.Generator, climb_probability: float = 0.75
) -> Tanglegram:
    """Swap ``floor(fraction * n)`` pairs of nearby right-tree leaves.

    Each swap picks a leaf uniformly, climbs towards the root while a
    ``climb_probability`` coin succeeds, then descends by fair coin flips
    to another leaf.  Self-swaps are allowed and change nothing.
    """
    tree = t.right
    labels = list(tree.labels)
    leaves = tree.leaves
    for _ in range(int(fraction * t.n)):
        a = leaves[int(rng.integers(len(leaves)))]
        b = _swap_partner(tree, a, rng, climb_probability)
        labels[a], labels[b] = labels[b], labels[a]
    right = BinaryTree(tree.parent, tree.children, tuple(labels), tree.root)
    return Tanglegram.from_trees(t.left, right, name=t.name)


def _reattach(children, parent, root, rng, climb_probability):
    """Move one random non-root subtree to an edge found by a random walk.

    The walk starts at the node that takes the subtree's old place (its
    former sibling).  While a ``climb_probability`` coin succeeds it steps
    to the left or right child by a fair coin, bouncing back to the parent
    from a leaf.  The subtree is then attached by subdividing the edge
    above the node reached (or above the root).
    """
    live = [v for v in range(len(parent)) if parent[v] >= 0]
    x = live[int(rng.integers(len(live)))]
    p = parent[x]
    (s,) = [c for c in children[p] if c != x]
    g = parent[p]
    # suppress p: s takes its place
    if g == -1:
        root = s
        parent[s] = -1
    else:
        children[g][children[g].index(p)] = s
        parent[s] = g
    children[p] = []
    parent[p] = -2

    y = s
    while rng.random() < climb_probability:
        if children[y]:
            y = children[y][int(rng.integers(2))]
        elif parent[y] >= 0:
            y = parent[y]
    # reuse p as the new binary node above y; x goes on a random side
    gy = parent[y]
    pair = [x, y] if rng.random() < 0.5 else [y, x]
    children[p] = pair
    parent[x] = parent[y] = p
    parent[p] = gy
    if gy == -1:
        root = p
    else:
        children[gy][children[gy].index(y)] = p
    return root


def mutate_general(
    t: Tanglegram,
    swap_fraction: float,
    reattach_fraction: float,
    rng: np.random.Generator,
    climb_probability: float = 0.75,
) -> Tanglegram:
    """Local leaf swaps followed by ``floor(reattach_fraction * (n - 1))`` subtree moves."""
    t = mutate_leaf_swaps(t, swap_fraction, rng, climb_probability)
    tree = t.right
    children = [list(c) for c in tree.children]
    parent = list(tree.parent)
    root = tree.root
    for _ in range(int(reattach_fraction * (t.n - 1))):
        root = _reattach(children, parent, root, rng, climb_probability)
    right = _freeze(children, list(tree.labels), root)
    return Tanglegram.from_trees(t.left, right, name=t.name)


def instance_seed(seed: int, set_name: str, n: int, index: int) -> int:
    ss = np.random.SeedSequence([seed, SETS.index(set_name), n, index])
    return int(ss.generate_state(1, np.uint64)[0])


def generate(set_name: str, n: int, seed: int, **knobs) -> Tanglegram:
    """One instance of ``set_name`` from a per-instance seed."""
    cfg = GenConfig(set_name, n, 1, seed, **knobs)
    rng = np.random.default_rng(seed)
    if cfg.set == "A":
        return gen_complete_random(n, rng)
    if cfg.set == "B":
        labels = _labels(n)
        base = Tanglegram.from_trees(complete_tree(labels), complete_tree(labels))
        return mutate_leaf_swaps(base, cfg.swaps, rng, cfg.climb_probability)
    tree = random_join_tree(_labels(n), rng)
    if cfg.set == "C":
        return _random_matching(tree, random_join_tree(_labels(n), rng), rng)
    base = Tanglegram.from_trees(tree, tree)
    return mutate_general(base, cfg.swaps, cfg.reattach_fraction, rng, cfg.climb_probability)


def generate_set(cfg: GenConfig) -> list[tuple[str, int, Tanglegram]]:
    """``(instance id, instance seed, tanglegram)`` for each of ``cfg.count`` instances."""
    knobs = dict(
        swap_fraction=cfg.swap_fraction,
        reattach_fraction=cfg.reattach_fraction,
        climb_probability=cfg.climb_probability,
    )
    out = []
    for i in range(cfg.count):
        s = instance_seed(cfg.seed, cfg.set, cfg.n, i)
        name = f"{cfg.set}_n{cfg.n}_{i:03d}"
        t = generate(cfg.set, cfg.n, s, **knobs)
        out.append((name, s, Tanglegram(t.left, t.right, t.matching, name=name)))
    return out


def write_set(cfg: GenConfig, out_dir) -> list[str]:
    os.makedirs(out_dir, exist_ok=True)
    paths = []
    for name, s, t in generate_set(cfg):
        path = os.path.join(out_dir, name + ".tgl")
        save_tanglegram(t, path, comments=[f"set={cfg.set} n={cfg.n} seed={s}"])
        paths.append(path)
    return paths
