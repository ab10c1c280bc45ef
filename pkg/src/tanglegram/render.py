"""Static SVG drawings of tanglegram layouts.

Coordinates are in abstract units set by the ``viewBox``: left leaves sit
on ``x = 0``, right leaves on ``x = 1``, and the leaf in position ``i``
(from the top, 0-based) has ``y = i``.  Each inter-tree edge is a single
``<line class="inter">``; tree edges are elbow ``<path>`` elements.
"""

from __future__ import annotations

from xml.sax.saxutils import escape

from .core import BinaryTree, Orientation, Tanglegram, leaf_order

LEVEL_GAP = 0.5
PX_PER_UNIT = 40


def _node_coords(tree: BinaryTree, order: list[int], x0: float, direction: int) -> dict[int, tuple[float, float]]:
    coords = {leaf: (x0, float(i)) for i, leaf in enumerate(order)}
    for v in reversed(tree.preorder):
        kids = tree.children[v]
        if kids:
            y = sum(coords[c][1] for c in kids) / 2
            coords[v] = (x0 + direction * LEVEL_GAP * tree.subtree_height[v], y)
    return coords


def _tree_paths(tree: BinaryTree, coords, side: str) -> list[str]:
    out = []
    for v in tree.internal_nodes:
        x, _ = coords[v]
        for c in tree.children[v]:
            cx, cy = coords[c]
            out.append(f'<path class="tree {side}" d="M{x:g},{coords[v][1]:g} V{cy:g} H{cx:g}"/>')
    return out


def svg_markup(t: Tanglegram, o: Orientation | None = None, title: str | None = None) -> str:
    o = o or Orientation.identity(t)
    left_order = leaf_order(t.left, o.left_flips)
    right_order = leaf_order(t.right, o.right_flips)
    lc = _node_coords(t.left, left_order, 0.0, -1)
    rc = _node_coords(t.right, right_order, 1.0, 1)
    x_min = -LEVEL_GAP * t.left.height - 1.5
    x_max = 1 + LEVEL_GAP * t.right.height + 1.5
    y_min, y_max = -1.0, float(t.n)
    w, h = x_max - x_min, y_max - y_min
    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w * PX_PER_UNIT:g}" '
        f'height="{h * PX_PER_UNIT:g}" viewBox="{x_min:g} {y_min:g} {w:g} {h:g}">',
        "<style>path{fill:none;stroke:#222;stroke-width:0.04}"
        "line.inter{stroke:#2a6fdb;stroke-width:0.03}"
        "text{font-family:sans-serif;font-size:0.4px;dominant-baseline:middle}</style>",
    ]
    if title:
        parts.append(f"<title>{escape(title)}</title>")
    parts += _tree_paths(t.left, lc, "left")
    parts += _tree_paths(t.right, rc, "right")
    for a in left_order:
        b = t.matching[a]
        parts.append(f'<line class="inter" x1="0" y1="{lc[a][1]:g}" x2="1" y2="{rc[b][1]:g}"/>')
    for side, tree, order, coords, x, anchor in (
        ("left", t.left, left_order, lc, -0.1, "end"),
        ("right", t.right, right_order, rc, 1.1, "start"),
    ):
        for leaf in order:
            parts.append(
                f'<text class="leaf {side}" data-node="{leaf}" x="{x:g}" y="{coords[leaf][1]:g}" '
                f'text-anchor="{anchor}">{escape(tree.labels[leaf])}</text>'
            )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def render_svg(t: Tanglegram, o: Orientation | None, path) -> str:
    """Write the drawing of ``t`` under ``o`` to ``path`` and return the markup."""
    markup = svg_markup(t, o, title=t.name or None)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(markup)
    return markup

