import numpy as np
import pytest

from tanglegram import BinaryTree, Orientation, Tanglegram, generate
from tanglegram.generators import instance_seed, random_join_tree

# Reconstruction of the unbalanced example where the upper/lower split does
# badly: leaf 7 hangs off the left root, leaf 8 off the right root.  Found
# by searching caterpillar-like shapes for a 14 vs 1 separation.
UNBALANCED_LEFT = ("7", ("3", ((((("4", "6"), "2"), "5"), "1"), "8")))
UNBALANCED_RIGHT = ((("7", ("1", ((("2", "5"), "6"), "4"))), "3"), "8")


def unbalanced_instance() -> Tanglegram:
    return Tanglegram.from_nested(UNBALANCED_LEFT, UNBALANCED_RIGHT, name="unbalanced")


def _cat(labels):
    node = labels[-1]
    for lab in reversed(labels[:-1]):
        node = (lab, node)
    return node


def caterpillar_instance(n: int) -> Tanglegram:
    """Crossing-free family on which aligning the root leaves is a trap.

    ``x`` hangs off the left root, ``y`` off the right root, and the inner
    leaves run in opposite directions along the two spines.
    """
    inner = [str(i) for i in range(1, n - 1)]
    left = ("x", _cat(inner + ["y"]))
    right = ("y", _cat(["x"] + inner[::-1]))
    return Tanglegram.from_nested(left, right, name=f"cat{n}")


def identity_instance(tree: BinaryTree) -> Tanglegram:
    return Tanglegram.from_trees(tree, tree)


def random_instances(count, sets="ABCD", sizes=(8, 16), seed=0):
    out = []
    for k in range(count):
        s = sets[k % len(sets)]
        n = sizes[(k // len(sets)) % len(sizes)]
        if s in "AB":
            n = 1 << (n.bit_length() - 1)
        out.append(generate(s, n, instance_seed(seed, s, n, k)))
    return out


def random_orientation(t: Tanglegram, rng) -> Orientation:
    bits = rng.integers(0, 2, len(t.left.internal_nodes) + len(t.right.internal_nodes))
    return Orientation.from_vector(t, bits)


def random_general_tree(n, seed):
    labels = [f"l{i}" for i in range(n)]
    return random_join_tree(labels, np.random.default_rng(seed))


@pytest.fixture
def unbalanced():
    return unbalanced_instance()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE: list[str] = []


def report(number: int, name: str, ok: bool | None, detail: str) -> None:
    """Record one acceptance line; ``ok=None`` marks a soft, warning-only check."""
    status = "WARN" if ok is None else ("PASS" if ok else "FAIL")
    line = f"criterion {number:>2} {status}: {name} [{detail}]"
    print(line)
    ACCEPTANCE.append(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
