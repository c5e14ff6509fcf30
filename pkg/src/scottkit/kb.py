"""Finite trees of sequences and the Kleene-Brouwer ordering.

``s <_KB t`` when ``s`` properly extends ``t``, or when ``s`` is smaller at
the first coordinate where the two differ.  On a finite tree this is the
post-order traversal with children taken in increasing label order; the
root comes last.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cmp_to_key
from typing import Iterable, Sequence

import numpy as np

from .normal import NormalForm, normalize
from .structures import ORDER, Structure
from .terms import Fin, Omega, Prod

__all__ = [
    "TreeError",
    "FiniteTree",
    "kb_compare",
    "kb_order",
    "kb_as_structure",
    "classify_pipeline",
    "parse_tree",
    "serialize_tree",
    "load_tree",
    "random_tree",
]


class TreeError(ValueError):
    pass


def _seq(s) -> tuple:
    s = tuple(s)
    for x in s:
        if not isinstance(x, (int, np.integer)) or isinstance(x, bool) or x < 0:
            raise TreeError(f"sequence entries must be natural numbers: {list(s)}")
    return tuple(int(x) for x in s)


@dataclass(frozen=True)
class FiniteTree:
    """A finite prefix-closed set of sequences of naturals."""

    nodes: frozenset

    def __post_init__(self):
        nodes = frozenset(_seq(s) for s in self.nodes)
        for s in nodes:
            if s and s[:-1] not in nodes:
                raise TreeError(f"not prefix-closed: {list(s)} present but {list(s[:-1])} missing")
        object.__setattr__(self, "nodes", nodes)

    @classmethod
    def closure(cls, seqs: Iterable[Sequence[int]]) -> "FiniteTree":
        """Smallest tree containing ``seqs``."""
        nodes = set()
        for s in seqs:
            s = _seq(s)
            nodes.update(s[:i] for i in range(len(s) + 1))
        return cls(frozenset(nodes))

    def __len__(self):
        return len(self.nodes)

    def __contains__(self, s):
        return tuple(s) in self.nodes

    def without(self, leaf) -> "FiniteTree":
        leaf = tuple(leaf)
        if any(len(s) == len(leaf) + 1 and s[:-1] == leaf for s in self.nodes):
            raise TreeError(f"{list(leaf)} is not a leaf")
        return FiniteTree(self.nodes - {leaf})

    def leaves(self) -> list:
        parents = {s[:-1] for s in self.nodes if s}
        return sorted(s for s in self.nodes if s not in parents)


def kb_compare(s: Sequence[int], t: Sequence[int]) -> str:
    """``"lt"``, ``"gt"`` or ``"eq"`` under the Kleene-Brouwer ordering."""
    s, t = tuple(s), tuple(t)
    for x, y in zip(s, t):
        if x != y:
            return "lt" if x < y else "gt"
    if len(s) == len(t):
        return "eq"
    return "lt" if len(s) > len(t) else "gt"


_SIGN = {"lt": -1, "eq": 0, "gt": 1}
_KEY = cmp_to_key(lambda s, t: _SIGN[kb_compare(s, t)])


def kb_order(T: FiniteTree | Iterable[Sequence[int]]) -> list:
    """Nodes of ``T`` in ascending Kleene-Brouwer order."""
    if not isinstance(T, FiniteTree):
        T = FiniteTree(frozenset(tuple(s) for s in T))
    return sorted(T.nodes, key=_KEY)


def kb_as_structure(T: FiniteTree) -> Structure:
    """The linear order ``(T, <_KB)`` on universe ``range(|T|)``; element
    ``i`` is the ``i``-th node of :func:`kb_order`."""
    if not len(T):
        raise TreeError("the empty tree has no structure (universes are non-empty)")
    order = kb_order(T)
    pos = {s: i for i, s in enumerate(order)}
    rel = frozenset((pos[s], pos[t]) for s in order for t in order if kb_compare(s, t) == "lt")
    M = Structure(ORDER, len(order), (rel,))
    _check_linear(M)
    return M


def _check_linear(M: Structure) -> None:
    rel = M.relation("<")
    n = M.size
    for i in range(n):
        if (i, i) in rel:
            raise TreeError("order is not irreflexive")
        for j in range(i + 1, n):
            if ((i, j) in rel) == ((j, i) in rel):
                raise TreeError("order is not total and antisymmetric")


def classify_pipeline(T: FiniteTree) -> NormalForm:
    """Normal form of ``(T, <_KB) * w``; every nonempty finite tree gives ``w``."""
    return normalize(Prod(Fin(len(T)), Omega()))


def parse_tree(text: str, close: bool = False) -> FiniteTree:
    """Parse ``{"nodes": [[], [0], ...]}``.  With ``close`` the node set is
    completed to its prefix closure instead of being rejected."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise TreeError(f"{exc.msg} (line {exc.lineno}, column {exc.colno})") from None
    if not isinstance(doc, dict) or not isinstance(doc.get("nodes"), list):
        raise TreeError('tree document must be an object with a "nodes" list')
    seqs = []
    for s in doc["nodes"]:
        if not isinstance(s, list):
            raise TreeError(f"node {s!r} must be a list")
        seqs.append(_seq(s))
    if close:
        return FiniteTree.closure(seqs)
    return FiniteTree(frozenset(seqs))


def serialize_tree(T: FiniteTree) -> str:
    return json.dumps({"nodes": [list(s) for s in sorted(T.nodes, key=lambda s: (len(s), s))]})


def load_tree(path, close: bool = False) -> FiniteTree:
    with open(path, encoding="utf-8") as fh:
        return parse_tree(fh.read(), close=close)


def random_tree(seed: int, size: int, max_label: int = 4) -> FiniteTree:
    """Reproducible random tree with exactly ``size`` nodes (``size >= 1``)
    and child labels below ``max_label``; grown by adding random children."""
    if size < 1:
        raise TreeError("size must be at least 1")
    rng = np.random.default_rng(seed)
    nodes = [()]
    present = {()}
    while len(nodes) < size:
        parent = nodes[int(rng.integers(len(nodes)))]
        child = parent + (int(rng.integers(max_label)),)
        if child not in present:
            present.add(child)
            nodes.append(child)
    return FiniteTree(frozenset(nodes))
