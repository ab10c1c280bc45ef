"""Estimator plumbing shared by every solver.

Solvers follow the scikit-learn estimator conventions: hyper-parameters go
to ``__init__`` (so ``get_params``/``set_params``/``clone`` work), ``fit``
takes one tanglegram and stores trailing-underscore attributes, and
``transform`` returns the leaf-label orders of the fitted layout.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Any

from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .core import Orientation, StructureError, Tanglegram, count_crossings, leaf_labels, leaf_order


@dataclass
class SolveResult:
    """Outcome of one solver run.

    ``crossings`` is always recomputed from ``orientation``; the solver's
    own objective value (which may ignore some crossings) is ``objective``.
    """

    crossings: int
    orientation: Orientation
    objective: int | None = None
    stats: dict[str, Any] = field(default_factory=dict)


def check_tanglegram(X) -> Tanglegram:
    """Coerce ``X`` into a :class:`Tanglegram`.

    Accepts a Tanglegram, a path to a ``.tgl`` file, or a pair of Newick
    strings (left, right).
    """
    if isinstance(X, Tanglegram):
        return X
    if isinstance(X, (str, os.PathLike)) and os.path.exists(X):
        from .io import load_tanglegram

        return load_tanglegram(X)
    if isinstance(X, (tuple, list)) and len(X) == 2 and all(isinstance(s, str) for s in X):
        from .io import tanglegram_from_newick

        return tanglegram_from_newick(*X)
    raise TypeError(
        f"expected a Tanglegram, a .tgl path or a (newick, newick) pair, got {type(X).__name__}"
    )


def check_orientation(t: Tanglegram, o: Orientation) -> Orientation:
    if set(o.left_flips) != set(t.left.internal_nodes) or set(o.right_flips) != set(t.right.internal_nodes):
        raise StructureError("orientation does not match the tanglegram's internal nodes")
    return o


class TanglegramSolverMixin:
    """``fit``/``transform`` on top of a ``_solve(t) -> SolveResult`` hook."""

    def _solve(self, t: Tanglegram) -> SolveResult:
        raise NotImplementedError

    def fit(self, X, y=None):
        t = check_tanglegram(X)
        result = self._solve(t)
        self.result_ = result
        self.orientation_ = result.orientation
        self.crossings_ = result.crossings
        self.objective_ = result.objective
        self.stats_ = result.stats
        self.n_leaves_ = t.n
        return self

    def transform(self, X) -> tuple[list[str], list[str]]:
        """Leaf labels of both trees, top to bottom, in the fitted layout."""
        check_is_fitted(self, "orientation_")
        t = check_tanglegram(X)
        o = check_orientation(t, self.orientation_)
        return (
            leaf_labels(t.left, leaf_order(t.left, o.left_flips)),
            leaf_labels(t.right, leaf_order(t.right, o.right_flips)),
        )

    def fit_transform(self, X, y=None):
        t = check_tanglegram(X)
        return self.fit(t).transform(t)

    def score(self, X, y=None) -> float:
        """Negated crossing count of the fitted layout on ``X`` (higher is better)."""
        check_is_fitted(self, "orientation_")
        t = check_tanglegram(X)
        return -float(count_crossings(t, check_orientation(t, self.orientation_)))


class TanglegramSolver(TanglegramSolverMixin, BaseEstimator):
    pass
