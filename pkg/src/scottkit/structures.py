"""Finite relational structures.

A structure has universe ``range(size)``, one table of tuples per relation
symbol and an element for every constant symbol.  Structures are immutable
and hashable, so they can be used as cache keys by the analysis modules.
"""
from __future__ import annotations

import itertools
import json
import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

__all__ = [
    "Signature",
    "Structure",
    "StructureError",
    "StructureSyntaxError",
    "parse_structure",
    "serialize_structure",
    "load_structure",
    "atomic_type",
    "atoms",
    "brute_force_iso",
    "random_structure",
    "relabel",
    "linear_order",
    "cycle",
    "edgeless",
    "all_digraphs",
    "digraph",
    "injective_tuples",
]

_NAME = re.compile(r"^[^\s()\"@#]+$")


class StructureError(ValueError):
    """A structure document or constructor call is semantically invalid."""


class StructureSyntaxError(StructureError):
    """A structure document is not well-formed JSON."""

    def __init__(self, msg, line=None, column=None):
        self.line = line
        self.column = column
        where = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(msg + where)


@dataclass(frozen=True)
class Signature:
    relations: tuple[tuple[str, int], ...] = ()
    constants: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "relations", tuple((str(r), int(a)) for r, a in self.relations))
        object.__setattr__(self, "constants", tuple(str(c) for c in self.constants))
        names = [r for r, _ in self.relations] + list(self.constants)
        if len(set(names)) != len(names):
            raise StructureError(f"duplicate symbol names in signature: {names}")
        for name in names:
            if not _NAME.match(name) or name == "=" or name.lstrip("-").isdigit():
                raise StructureError(f"invalid symbol name {name!r}")
        for r, a in self.relations:
            if a < 1:
                raise StructureError(f"relation {r!r} has arity {a}; arities must be >= 1")

    def arity(self, name: str) -> int:
        for r, a in self.relations:
            if r == name:
                return a
        raise KeyError(name)


@dataclass(frozen=True)
class Structure:
    signature: Signature
    size: int
    tables: tuple[frozenset, ...]
    constant_values: tuple[int, ...] = ()
    _arrays: dict = field(default=None, init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        sig = self.signature
        if not isinstance(self.size, (int, np.integer)) or self.size < 1:
            raise StructureError(f"size must be a positive integer, got {self.size!r}")
        object.__setattr__(self, "size", int(self.size))
        if len(self.tables) != len(sig.relations):
            raise StructureError("one table per relation symbol is required")
        tables = []
        for (name, arity), table in zip(sig.relations, self.tables):
            rows = set()
            for row in table:
                row = tuple(int(x) for x in row)
                if len(row) != arity:
                    raise StructureError(f"relation {name!r} has arity {arity}, got tuple {list(row)}")
                for x in row:
                    if not 0 <= x < self.size:
                        raise StructureError(
                            f"element {x} in relation {name!r} out of range for size {self.size}")
                rows.add(row)
            tables.append(frozenset(rows))
        object.__setattr__(self, "tables", tuple(tables))
        if len(self.constant_values) != len(sig.constants):
            raise StructureError("one value per constant symbol is required")
        values = tuple(int(v) for v in self.constant_values)
        for c, v in zip(sig.constants, values):
            if not 0 <= v < self.size:
                raise StructureError(f"constant {c!r} = {v} out of range for size {self.size}")
        object.__setattr__(self, "constant_values", values)
        object.__setattr__(self, "_arrays", {})

    @classmethod
    def build(cls, size, relations=None, constants=None):
        """Convenience constructor from ``{name: tuples}`` and ``{name: element}``.

        Arities are read off the tuples; an empty table needs an explicit
        ``(arity, tuples)`` pair.
        """
        relations = relations or {}
        constants = constants or {}
        sig_rel, tables = [], []
        for name, spec in relations.items():
            if isinstance(spec, tuple) and len(spec) == 2 and isinstance(spec[0], int):
                arity, rows = spec
            else:
                rows = list(spec)
                if not rows:
                    raise StructureError(f"cannot infer arity of empty relation {name!r}")
                arity = len(rows[0])
            sig_rel.append((name, arity))
            tables.append(frozenset(tuple(r) for r in rows))
        sig = Signature(tuple(sig_rel), tuple(constants))
        return cls(sig, size, tuple(tables), tuple(constants.values()))

    @property
    def universe(self) -> range:
        return range(self.size)

    def relation(self, name: str) -> frozenset:
        for (r, _), table in zip(self.signature.relations, self.tables):
            if r == name:
                return table
        raise KeyError(name)

    def constant(self, name: str) -> int:
        return self.constant_values[self.signature.constants.index(name)]

    def holds(self, name: str, args: Sequence[int]) -> bool:
        return tuple(args) in self.relation(name)

    def array(self, name: str) -> np.ndarray:
        """Boolean ndarray of shape ``(size,) * arity`` for a relation."""
        arr = self._arrays.get(name)
        if arr is None:
            arity = self.signature.arity(name)
            arr = np.zeros((self.size,) * arity, dtype=bool)
            for row in self.relation(name):
                arr[row] = True
            arr.setflags(write=False)
            self._arrays[name] = arr
        return arr

    def __repr__(self):
        rels = ", ".join(f"{r}={sorted(t)}" for (r, _), t in zip(self.signature.relations, self.tables))
        consts = ", ".join(f"{c}={v}" for c, v in zip(self.signature.constants, self.constant_values))
        inner = ", ".join(x for x in (rels, consts) if x)
        return f"Structure(size={self.size}{', ' if inner else ''}{inner})"


# --- documents ---------------------------------------------------------------

def parse_structure(text: str) -> Structure:
    """Parse a JSON structure document.

    ``{"size": n, "relations": {"R": {"arity": 2, "tuples": [[0, 1]]}}, "constants": {"c": 0}}``
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise StructureSyntaxError(exc.msg, exc.lineno, exc.colno) from None
    if not isinstance(doc, dict):
        raise StructureError("structure document must be a JSON object")
    unknown = set(doc) - {"size", "relations", "constants"}
    if unknown:
        raise StructureError(f"unknown keys in structure document: {sorted(unknown)}")
    size = doc.get("size")
    if not isinstance(size, int) or isinstance(size, bool):
        raise StructureError(f"'size' must be an integer, got {size!r}")
    relations = doc.get("relations", {})
    constants = doc.get("constants", {})
    if not isinstance(relations, dict) or not isinstance(constants, dict):
        raise StructureError("'relations' and 'constants' must be objects")
    sig_rel, tables = [], []
    for name, body in relations.items():
        if not isinstance(body, dict) or set(body) != {"arity", "tuples"}:
            raise StructureError(f"relation {name!r} must have exactly 'arity' and 'tuples'")
        arity, rows = body["arity"], body["tuples"]
        if not isinstance(arity, int) or isinstance(arity, bool):
            raise StructureError(f"arity of {name!r} must be an integer")
        if not isinstance(rows, list):
            raise StructureError(f"tuples of {name!r} must be a list")
        checked = []
        for row in rows:
            if not isinstance(row, list) or not all(isinstance(x, int) and not isinstance(x, bool) for x in row):
                raise StructureError(f"tuple {row!r} of {name!r} must be a list of integers")
            checked.append(tuple(row))
        sig_rel.append((name, arity))
        tables.append(frozenset(checked))
    for name, value in constants.items():
        if not isinstance(value, int) or isinstance(value, bool):
            raise StructureError(f"constant {name!r} must be an integer")
    sig = Signature(tuple(sig_rel), tuple(constants))
    return Structure(sig, size, tuple(tables), tuple(constants.values()))


def serialize_structure(M: Structure) -> str:
    """Canonical single-line JSON; tuples are sorted lexicographically."""
    doc = {
        "size": M.size,
        "relations": {
            name: {"arity": arity, "tuples": [list(t) for t in sorted(table)]}
            for (name, arity), table in zip(M.signature.relations, M.tables)
        },
        "constants": dict(zip(M.signature.constants, M.constant_values)),
    }
    return json.dumps(doc, separators=(", ", ": "))


def load_structure(path) -> Structure:
    with open(path, encoding="utf-8") as fh:
        return parse_structure(fh.read())


# --- atomic types ---------------------------------------------------------

def _terms(k: int, constants: Sequence[str]) -> list:
    return [("v", i) for i in range(k)] + [("c", c) for c in constants]


def atoms(sig: Signature, k: int) -> list:
    """All atomic formulas over variables ``v0..v{k-1}`` and the constants.

    Equalities come first (each unordered pair of terms once, including
    ``t = t``), then relation atoms in signature order with argument tuples
    in lexicographic order.  Terms are ``("v", i)`` or ``("c", name)``.
    """
    terms = _terms(k, sig.constants)
    out = [("=", s, t) for i, s in enumerate(terms) for t in terms[i:]]
    for name, arity in sig.relations:
        out.extend((name,) + args for args in itertools.product(terms, repeat=arity))
    return out


def _term_value(M: Structure, a: Sequence[int], term) -> int:
    kind, x = term
    return a[x] if kind == "v" else M.constant(x)


def atomic_type(M: Structure, a: Sequence[int]) -> tuple:
    """Canonical encoding of the atomic type of ``a`` in ``M``.

    The encoding is ``(len(a), sorted satisfied atoms)``; two tuples get the
    same encoding exactly when they satisfy the same atomic formulas.
    """
    a = tuple(a)
    for x in a:
        if not 0 <= x < M.size:
            raise StructureError(f"element {x} out of range for size {M.size}")
    sat = []
    for atom in atoms(M.signature, len(a)):
        vals = [_term_value(M, a, t) for t in atom[1:]]
        if atom[0] == "=":
            if vals[0] == vals[1]:
                sat.append(atom)
        elif tuple(vals) in M.relation(atom[0]):
            sat.append(atom)
    return (len(a), tuple(sorted(sat)))


# --- isomorphism oracle ---------------------------------------------------

def _profile(M: Structure, x: int) -> tuple:
    """Isomorphism-invariant fingerprint of an element, used for pruning."""
    prof = []
    for table in M.tables:
        counts = {}
        for row in table:
            pattern = tuple(i for i, y in enumerate(row) if y == x)
            if pattern:
                counts[pattern] = counts.get(pattern, 0) + 1
        prof.append(tuple(sorted(counts.items())))
    prof.append(tuple(i for i, v in enumerate(M.constant_values) if v == x))
    return tuple(prof)


def brute_force_iso(M: Structure, N: Structure):
    """Lexicographically least isomorphism ``M -> N`` as a tuple, or ``None``.

    Plain backtracking over partial maps in domain order, trying images in
    increasing order, so the first complete map found is the least one.
    Worst case factorial; meant for structures of size <= 6 or so.
    """
    if M.signature != N.signature or M.size != N.size:
        return None
    if any(len(s) != len(t) for s, t in zip(M.tables, N.tables)):
        return None
    n = M.size
    prof_m = [_profile(M, x) for x in range(n)]
    prof_n = [_profile(N, y) for y in range(n)]
    if sorted(prof_m) != sorted(prof_n):
        return None
    fixed = {}
    for cm, cn in zip(M.constant_values, N.constant_values):
        if fixed.get(cm, cn) != cn:
            return None
        fixed[cm] = cn
    arities = [a for _, a in M.signature.relations]
    # tuples of M grouped by the largest element they mention
    by_max = [[[] for _ in range(n)] for _ in M.tables]
    for r, (table, arity) in enumerate(zip(M.tables, arities)):
        for row in itertools.product(range(n), repeat=arity):
            by_max[r][max(row)].append((row, row in table))

    perm = [-1] * n
    used = [False] * n

    def consistent(x):
        for r, table in enumerate(N.tables):
            for row, present in by_max[r][x]:
                if (tuple(perm[y] for y in row) in table) != present:
                    return False
        return True

    def extend(x):
        if x == n:
            return True
        candidates = [fixed[x]] if x in fixed else range(n)
        for y in candidates:
            if used[y] or prof_m[x] != prof_n[y]:
                continue
            perm[x] = y
            used[y] = True
            if consistent(x) and extend(x + 1):
                return True
            used[y] = False
            perm[x] = -1
        return False

    return tuple(perm) if extend(0) else None


# --- generators and standard structures ----------------------------------

BINARY = Signature((("R", 2),))
ORDER = Signature((("<", 2),))


def digraph(size: int, edges: Iterable = ()) -> Structure:
    return Structure(BINARY, size, (frozenset(tuple(e) for e in edges),))


def linear_order(n: int) -> Structure:
    """The finite linear order ``L_n`` on ``0 < 1 < ... < n-1``."""
    return Structure(ORDER, n, (frozenset((i, j) for i in range(n) for j in range(i + 1, n)),))


def cycle(n: int) -> Structure:
    return digraph(n, [(i, (i + 1) % n) for i in range(n)])


def edgeless(n: int) -> Structure:
    return digraph(n)


def all_digraphs(n: int) -> Iterator[Structure]:
    """Every binary relation on ``range(n)``, loops allowed, in bitmask order."""
    cells = list(itertools.product(range(n), repeat=2))
    for mask in range(1 << len(cells)):
        yield digraph(n, [c for i, c in enumerate(cells) if mask >> i & 1])


def relabel(M: Structure, perm: Sequence[int]) -> Structure:
    """The image of ``M`` under the bijection ``x -> perm[x]``."""
    perm = tuple(perm)
    if sorted(perm) != list(range(M.size)):
        raise StructureError(f"{perm} is not a permutation of range({M.size})")
    tables = tuple(frozenset(tuple(perm[x] for x in row) for row in t) for t in M.tables)
    return Structure(M.signature, M.size, tables, tuple(perm[v] for v in M.constant_values))


def random_structure(seed: int, size: int, sig: Signature = BINARY, density: float = 0.5) -> Structure:
    """Reproducible random structure; every candidate tuple is kept with
    probability ``density``."""
    if not 0 <= density <= 1:
        raise StructureError(f"density must lie in [0, 1], got {density}")
    rng = np.random.default_rng(seed)
    tables = []
    for _, arity in sig.relations:
        cells = list(itertools.product(range(size), repeat=arity))
        keep = rng.random(len(cells)) < density
        tables.append(frozenset(c for c, k in zip(cells, keep) if k))
    consts = tuple(int(v) for v in rng.integers(0, size, len(sig.constants)))
    return Structure(sig, size, tuple(tables), consts)


def injective_tuples(n: int, max_len: int) -> list:
    """Injective tuples over ``range(n)`` of length ``0..max_len``, ordered
    by length and then lexicographically."""
    out = []
    for k in range(min(max_len, n) + 1):
        out.extend(itertools.permutations(range(n), k))
    return out
