"""Newick trees and the two-line ``.tgl`` tanglegram file format.

A ``.tgl`` file holds the left tree's Newick string on the first
non-comment line and the right tree's on the second.  Lines starting with
``#`` are comments; ``# map a=b`` pairs left label ``a`` with right label
``b`` when the two trees use different names.
"""

from __future__ import annotations

import os
import re

from .core import BinaryTree, StructureError, Tanglegram

_SPECIAL = set("(),:;[]'")


class NewickError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self.parent: list[int] = []
        self.children: list[tuple[int, ...]] = []
        self.labels: list[str | None] = []

    def error(self, message):
        raise NewickError(message, self.pos)

    def skip_ws(self):
        text = self.text
        while self.pos < len(text):
            ch = text[self.pos]
            if ch.isspace():
                self.pos += 1
            elif ch == "[":
                end = text.find("]", self.pos)
                if end < 0:
                    self.error("unterminated comment")
                self.pos = end + 1
            else:
                break

    def peek(self) -> str:
        self.skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def name(self) -> str:
        self.skip_ws()
        text = self.text
        if self.pos < len(text) and text[self.pos] == "'":
            out = []
            self.pos += 1
            while True:
                if self.pos >= len(text):
                    self.error("unterminated quoted label")
                ch = text[self.pos]
                if ch == "'":
                    if text[self.pos + 1:self.pos + 2] == "'":
                        out.append("'")
                        self.pos += 2
                        continue
                    self.pos += 1
                    return "".join(out)
                out.append(ch)
                self.pos += 1
        start = self.pos
        while self.pos < len(text) and text[self.pos] not in _SPECIAL and not text[self.pos].isspace():
            self.pos += 1
        return text[start:self.pos]

    def branch_length(self):
        if self.peek() == ":":
            self.pos += 1
            self.skip_ws()
            m = re.compile(r"[-+0-9.eE]+").match(self.text, self.pos)
            if not m:
                self.error("malformed branch length")
            self.pos = m.end()

    def new_node(self, kids, label) -> int:
        v = len(self.parent)
        self.parent.append(-1)
        self.children.append(tuple(kids))
        self.labels.append(label)
        for c in kids:
            self.parent[c] = v
        return v

    def subtree(self) -> int:
        if self.peek() == "(":
            open_pos = self.pos
            self.pos += 1
            kids = [self.subtree()]
            while self.peek() == ",":
                self.pos += 1
                kids.append(self.subtree())
            if self.peek() != ")":
                self.error("expected ',' or ')'")
            self.pos += 1
            if len(kids) != 2:
                raise NewickError(f"node has {len(kids)} children; only binary trees are supported", open_pos)
            self.name()  # internal labels (support values etc.) are dropped
            self.branch_length()
            return self.new_node(kids, None)
        label = self.name()
        if not label:
            self.error("expected a leaf label")
        self.branch_length()
        return self.new_node((), label)

    def parse(self) -> BinaryTree:
        root = self.subtree()
        if self.peek() != ";":
            self.error("expected ';'")
        self.pos += 1
        if self.peek():
            self.error("trailing characters after ';'")
        seen = {}
        for v, lab in enumerate(self.labels):
            if lab is not None and not self.children[v]:
                if lab in seen:
                    self.error(f"duplicate leaf label {lab!r}")
                seen[lab] = v
        return BinaryTree(tuple(self.parent), tuple(self.children), tuple(self.labels), root)


def parse_newick(text: str) -> BinaryTree:
    """Parse a strictly binary Newick string ending in ``;``.

    Branch lengths, internal labels and ``[...]`` comments are accepted
    and discarded.
    """
    return _Parser(text.strip()).parse()


def _quote(label: str) -> str:
    if label and not any(ch in _SPECIAL or ch.isspace() for ch in label):
        return label
    return "'" + label.replace("'", "''") + "'"


def write_newick(tree: BinaryTree, v: int | None = None) -> str:
    def rec(u):
        if tree.is_leaf(u):
            return _quote(tree.labels[u])
        a, b = tree.children[u]
        return f"({rec(a)},{rec(b)})"

    return rec(tree.root if v is None else v) + ";"


def tanglegram_from_newick(left: str, right: str, label_map=None, name: str = "") -> Tanglegram:
    return Tanglegram.from_trees(parse_newick(left), parse_newick(right), label_map, name=name)


def read_tanglegram(text: str, name: str = "") -> Tanglegram:
    trees = []
    label_map = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            m = re.fullmatch(r"#\s*map\s+(.+?)\s*=\s*(.+?)\s*", line)
            if m:
                label_map[m.group(1)] = m.group(2)
            continue
        try:
            trees.append(parse_newick(line))
        except NewickError as exc:
            raise NewickError(f"line {lineno}: {exc}", exc.position) from None
    if len(trees) != 2:
        raise StructureError(f"expected exactly two trees, found {len(trees)}")
    left, right = trees
    if not label_map:
        lset = {left.labels[v] for v in left.leaves}
        rset = {right.labels[v] for v in right.leaves}
        if lset != rset:
            diff = sorted(lset ^ rset)[:5]
            raise StructureError(f"leaf label sets differ (e.g. {diff})")
    return Tanglegram.from_trees(left, right, label_map, name=name)


def load_tanglegram(path) -> Tanglegram:
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    return read_tanglegram(text, name=os.path.splitext(os.path.basename(str(path)))[0])


def format_tanglegram(t: Tanglegram, comments=()) -> str:
    lines = [f"# {c}" for c in comments]
    right = t.right
    renamed = {t.left.labels[a]: right.labels[b] for a, b in t.matching.items() if t.left.labels[a] != right.labels[b]}
    for a, b in sorted(renamed.items()):
        lines.append(f"# map {a}={b}")
    lines.append(write_newick(t.left))
    lines.append(write_newick(right))
    return "\n".join(lines) + "\n"


def save_tanglegram(t: Tanglegram, path, comments=()) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(format_tanglegram(t, comments))
