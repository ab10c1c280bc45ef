"""Binary trees, tanglegrams, compatible leaf orders and crossing counts.

Trees are index-based: node ``i`` has ``parent[i]`` (``-1`` for the root),
``children[i]`` (empty for leaves, a pair otherwise) and ``labels[i]``
(``None`` for internal nodes).  Everything here is immutable once built.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Sequence


class StructureError(ValueError):
    """Raised when a tree, matching or orientation is malformed."""


@dataclass(frozen=True, eq=False)
class BinaryTree:
    """Rooted, strictly binary tree stored as parallel arrays."""

    parent: tuple[int, ...]
    children: tuple[tuple[int, ...], ...]
    labels: tuple[str | None, ...]
    root: int

    def __post_init__(self):
        m = len(self.parent)
        if m == 0:
            raise StructureError("tree is empty")
        if not (len(self.children) == len(self.labels) == m):
            raise StructureError("node arrays differ in length")
        if not 0 <= self.root < m or self.parent[self.root] != -1:
            raise StructureError("root must be a node without parent")
        seen_labels = set()
        for v in range(m):
            kids = self.children[v]
            if len(kids) not in (0, 2):
                raise StructureError(f"node {v} has {len(kids)} children; trees must be binary")
            for c in kids:
                if not 0 <= c < m or self.parent[c] != v:
                    raise StructureError(f"inconsistent parent/child link {v}->{c}")
            if v != self.root and not 0 <= self.parent[v] < m:
                raise StructureError(f"node {v} has no valid parent")
            if v != self.root and v not in self.children[self.parent[v]]:
                raise StructureError(f"node {v} is not a child of its parent")
            label = self.labels[v]
            if kids and label is not None:
                raise StructureError(f"internal node {v} carries a leaf label")
            if not kids:
                if label is None:
                    raise StructureError(f"leaf {v} has no label")
                if label in seen_labels:
                    raise StructureError(f"duplicate leaf label {label!r}")
                seen_labels.add(label)
        # reachability from the root rules out cycles and stray components
        if len(self.preorder) != m:
            raise StructureError("tree is not connected to its root")

    @classmethod
    def from_nested(cls, nested) -> "BinaryTree":
        """Build from nested 2-tuples of labels, e.g. ``(("a", "b"), "c")``.

        Leaves get ids first (left to right), then internal nodes in
        post-order, so ids are stable for a given nesting.
        """
        parent: list[int] = []
        children: list[tuple[int, ...]] = []
        labels: list[str | None] = []
        leaves: list = []

        def collect(node):
            if isinstance(node, (tuple, list)):
                if len(node) != 2:
                    raise StructureError(f"non-binary node with {len(node)} children")
                for c in node:
                    collect(c)
            else:
                leaves.append(node)

        collect(nested)
        for lab in leaves:
            parent.append(-1)
            children.append(())
            labels.append(str(lab))
        counter = iter(range(len(leaves)))

        def build(node) -> int:
            if not isinstance(node, (tuple, list)):
                return next(counter)
            a, b = build(node[0]), build(node[1])
            v = len(parent)
            parent.append(-1)
            children.append((a, b))
            labels.append(None)
            parent[a] = parent[b] = v
            return v

        root = build(nested)
        return cls(tuple(parent), tuple(children), tuple(labels), root)

    def __len__(self) -> int:
        return len(self.parent)

    def is_leaf(self, v: int) -> bool:
        return not self.children[v]

    @cached_property
    def preorder(self) -> tuple[int, ...]:
        out = []
        stack = [self.root]
        while stack:
            v = stack.pop()
            out.append(v)
            stack.extend(reversed(self.children[v]))
        return tuple(out)

    @cached_property
    def leaves(self) -> tuple[int, ...]:
        """Leaf ids in stored (all-unflipped) left-to-right order."""
        return tuple(v for v in self.preorder if not self.children[v])

    @cached_property
    def internal_nodes(self) -> tuple[int, ...]:
        """Internal node ids in preorder."""
        return tuple(v for v in self.preorder if self.children[v])

    @property
    def n_leaves(self) -> int:
        return len(self.leaves)

    @cached_property
    def depth(self) -> tuple[int, ...]:
        d = [0] * len(self)
        for v in self.preorder:
            for c in self.children[v]:
                d[c] = d[v] + 1
        return tuple(d)

    @cached_property
    def height(self) -> int:
        return max(self.depth)

    @cached_property
    def subtree_height(self) -> tuple[int, ...]:
        h = [0] * len(self)
        for v in reversed(self.preorder):
            if self.children[v]:
                h[v] = 1 + max(h[c] for c in self.children[v])
        return tuple(h)

    @cached_property
    def leaf_sets(self) -> tuple[frozenset[int], ...]:
        sets: list[frozenset[int]] = [frozenset()] * len(self)
        for v in reversed(self.preorder):
            kids = self.children[v]
            sets[v] = frozenset((v,)) if not kids else sets[kids[0]] | sets[kids[1]]
        return tuple(sets)

    @cached_property
    def label_index(self) -> dict[str, int]:
        return {self.labels[v]: v for v in self.leaves}

    def structure(self, v: int | None = None):
        """Nested-tuple view of the subtree at ``v`` (labels at leaves)."""
        v = self.root if v is None else v
        if not self.children[v]:
            return self.labels[v]
        a, b = self.children[v]
        return (self.structure(a), self.structure(b))

    def isomorphic(self, other: "BinaryTree") -> bool:
        """Structural equality with child order ignored."""

        def canon(tree, v):
            if tree.is_leaf(v):
                return repr(tree.labels[v])
            a, b = sorted(canon(tree, c) for c in tree.children[v])
            return f"({a},{b})"

        return canon(self, self.root) == canon(other, other.root)


def _check_node(tree: BinaryTree, v: int):
    if not isinstance(v, int) or not 0 <= v < len(tree):
        raise StructureError(f"node {v!r} is not in the tree")


def _check_flips(tree: BinaryTree, flips: Mapping[int, bool]):
    if set(flips) != set(tree.internal_nodes):
        missing = set(tree.internal_nodes) - set(flips)
        extra = set(flips) - set(tree.internal_nodes)
        raise StructureError(f"flip entries mismatch: missing {sorted(missing)}, extra {sorted(extra)}")


def leaf_order(tree: BinaryTree, flips: Mapping[int, bool]) -> list[int]:
    """Left-to-right (top-to-bottom) leaf ids with children of flipped nodes swapped."""
    _check_flips(tree, flips)
    out = []
    stack = [tree.root]
    while stack:
        v = stack.pop()
        kids = tree.children[v]
        if not kids:
            out.append(v)
            continue
        first, second = kids
        if flips[v]:
            first, second = second, first
        stack.append(second)
        stack.append(first)
    return out


def lca(tree: BinaryTree, u: int, v: int) -> int:
    """Lowest common ancestor of two nodes; ``lca(u, u) == u``."""
    _check_node(tree, u)
    _check_node(tree, v)
    depth = tree.depth
    while depth[u] > depth[v]:
        u = tree.parent[u]
    while depth[v] > depth[u]:
        v = tree.parent[v]
    while u != v:
        u, v = tree.parent[u], tree.parent[v]
    return u


def subtree_leaves(tree: BinaryTree, v: int) -> frozenset[int]:
    _check_node(tree, v)
    return tree.leaf_sets[v]


@dataclass(frozen=True, eq=False)
class Tanglegram:
    """Two binary trees plus a perfect matching between their leaves.

    ``matching`` maps each left leaf id to its right leaf id.
    """

    left: BinaryTree
    right: BinaryTree
    matching: Mapping[int, int]
    name: str = field(default="", compare=False)

    def __post_init__(self):
        if self.left.n_leaves != self.right.n_leaves:
            raise StructureError(
                f"leaf counts differ: {self.left.n_leaves} vs {self.right.n_leaves}"
            )
        if set(self.matching) != set(self.left.leaves):
            raise StructureError("matching does not cover every left leaf")
        targets = list(self.matching.values())
        if len(set(targets)) != len(targets) or set(targets) != set(self.right.leaves):
            raise StructureError("matching is not a bijection onto the right leaves")
        object.__setattr__(self, "matching", dict(self.matching))

    @classmethod
    def from_trees(
        cls,
        left: BinaryTree,
        right: BinaryTree,
        label_map: Mapping[str, str] | None = None,
        name: str = "",
    ) -> "Tanglegram":
        """Match leaves by label equality, or through ``label_map`` (left -> right)."""
        label_map = label_map or {}
        right_index = right.label_index
        matching = {}
        for a in left.leaves:
            lab = left.labels[a]
            target = label_map.get(lab, lab)
            if target not in right_index:
                raise StructureError(f"left label {lab!r} has no partner in the right tree")
            matching[a] = right_index[target]
        if len(set(matching.values())) != len(matching):
            raise StructureError("two left leaves map onto the same right leaf")
        return cls(left, right, matching, name=name)

    @classmethod
    def from_nested(cls, left, right, name: str = "") -> "Tanglegram":
        return cls.from_trees(BinaryTree.from_nested(left), BinaryTree.from_nested(right), name=name)

    @property
    def n(self) -> int:
        return self.left.n_leaves

    @property
    def min_height(self) -> int:
        return min(self.left.height, self.right.height)

    @property
    def max_height(self) -> int:
        return max(self.left.height, self.right.height)

    @cached_property
    def inverse_matching(self) -> dict[int, int]:
        return {b: a for a, b in self.matching.items()}


@dataclass(frozen=True)
class Orientation:
    """One flip bit per internal node of each tree (``True`` = children swapped)."""

    left_flips: Mapping[int, bool]
    right_flips: Mapping[int, bool]

    @classmethod
    def identity(cls, t: Tanglegram) -> "Orientation":
        return cls(
            {v: False for v in t.left.internal_nodes},
            {v: False for v in t.right.internal_nodes},
        )

    @classmethod
    def from_flipped(cls, t: Tanglegram, left: Iterable[int] = (), right: Iterable[int] = ()) -> "Orientation":
        left, right = set(left), set(right)
        return cls(
            {v: v in left for v in t.left.internal_nodes},
            {v: v in right for v in t.right.internal_nodes},
        )

    @classmethod
    def from_vector(cls, t: Tanglegram, bits: Sequence[int]) -> "Orientation":
        """Inverse of :meth:`to_vector`: left internal nodes first, then right."""
        k = len(t.left.internal_nodes)
        if len(bits) != k + len(t.right.internal_nodes):
            raise StructureError("assignment length does not match the number of internal nodes")
        return cls(
            {v: bool(bits[i]) for i, v in enumerate(t.left.internal_nodes)},
            {v: bool(bits[k + i]) for i, v in enumerate(t.right.internal_nodes)},
        )

    def to_vector(self, t: Tanglegram) -> list[int]:
        return [int(self.left_flips[v]) for v in t.left.internal_nodes] + [
            int(self.right_flips[v]) for v in t.right.internal_nodes
        ]

    def mirrored(self) -> "Orientation":
        return Orientation(
            {v: not f for v, f in self.left_flips.items()},
            {v: not f for v, f in self.right_flips.items()},
        )


def _permutation(t: Tanglegram, o: Orientation) -> list[int]:
    right_pos = {leaf: i for i, leaf in enumerate(leaf_order(t.right, o.right_flips))}
    return [right_pos[t.matching[a]] for a in leaf_order(t.left, o.left_flips)]


def count_inversions(seq: Sequence[int]) -> int:
    """Number of pairs i < j with seq[i] > seq[j], by bottom-up merge sort."""
    a = list(seq)
    n = len(a)
    buf = [0] * n
    inversions = 0
    width = 1
    while width < n:
        for lo in range(0, n, 2 * width):
            mid = min(lo + width, n)
            hi = min(lo + 2 * width, n)
            i, j, k = lo, mid, lo
            while i < mid and j < hi:
                if a[j] < a[i]:
                    buf[k] = a[j]
                    inversions += mid - i
                    j += 1
                else:
                    buf[k] = a[i]
                    i += 1
                k += 1
            buf[k:k + mid - i] = a[i:mid]
            k += mid - i
            buf[k:k + hi - j] = a[j:hi]
        a, buf = buf, a
        width *= 2
    return inversions


def count_crossings(t: Tanglegram, o: Orientation) -> int:
    """Inter-tree edge crossings of the layout given by ``o``, in O(n log n)."""
    return count_inversions(_permutation(t, o))


def count_crossings_naive(t: Tanglegram, o: Orientation) -> int:
    """Quadratic pairwise crossing check; kept as an oracle for the fast counter."""
    left_pos = {leaf: i for i, leaf in enumerate(leaf_order(t.left, o.left_flips))}
    right_pos = {leaf: i for i, leaf in enumerate(leaf_order(t.right, o.right_flips))}
    edges = [(left_pos[a], right_pos[b]) for a, b in t.matching.items()]
    total = 0
    for i in range(len(edges)):
        a, b = edges[i]
        for j in range(i + 1, len(edges)):
            c, d = edges[j]
            if (a < c) != (b < d):
                total += 1
    return total


def leaf_labels(tree: BinaryTree, order: Iterable[int]) -> list[str]:
    return [tree.labels[v] for v in order]
