"""Back-and-forth equivalence between finite structures, and Scott ranks.

The relations ``~_alpha`` are computed for all injective tuples of length
at most ``K`` of one or more structures at once, by refining the partition
into atomic types until it repeats.  A tuple's level-``alpha + 1`` block is
determined by its level-``alpha`` block together with the *set* of
level-``alpha`` blocks reached by adjoining a new element.  Adjoining an
element already in the tuple only ever matches the same repeat on the other
side, so non-injective tuples carry no extra information and are reduced to
their injective support.

Tuples of the maximal length ``K`` get no new extensions, so with the
default ``K = max(|M|, |N|)`` the computed relations are exact.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from .structures import Structure, atoms, injective_tuples

__all__ = [
    "MAX_TUPLES",
    "BFTable",
    "RankReport",
    "bf_table",
    "bf_equiv",
    "rho",
    "scott_rank",
    "support",
]

# resource guard: the number of injective tuples grows like n!
MAX_TUPLES = 2_500_000


def _count_tuples(n: int, max_len: int) -> int:
    total, term = 0, 1
    for k in range(min(n, max_len) + 1):
        total += term
        term *= n - k
    return total


def support(a: Sequence[int]) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Split a tuple into its injective support and a position map.

    >>> support((3, 1, 3))
    ((3, 1), (0, 1, 0))
    """
    seen: dict[int, int] = {}
    positions = []
    for x in a:
        positions.append(seen.setdefault(x, len(seen)))
    return tuple(seen), tuple(positions)


class _NewAtoms:
    """Atoms mentioning the newest variable, per tuple length, as index
    patterns that can be checked against a concrete tuple."""

    def __init__(self, sig):
        self.sig = sig
        self._cache = {}

    def root(self, M):
        sat = []
        for atom in atoms(self.sig, 0):
            vals = [M.constant(t[1]) for t in atom[1:]]
            if atom[0] == "=" and vals[0] == vals[1]:
                sat.append(atom)
            elif atom[0] != "=" and tuple(vals) in M.relation(atom[0]):
                sat.append(atom)
        return tuple(sat)

    def patterns(self, k):
        # atoms over k variables in which variable k-1 occurs
        if k not in self._cache:
            pats = []
            for atom in atoms(self.sig, k):
                if ("v", k - 1) not in atom[1:]:
                    continue
                if atom[0] == "=" and atom[1] == atom[2]:
                    continue  # v = v holds for every tuple
                pats.append(atom)
            self._cache[k] = pats
        return self._cache[k]

    def bits(self, M, t):
        out = []
        for i, atom in enumerate(self.patterns(len(t))):
            vals = [t[x] if kind == "v" else M.constant(x) for kind, x in atom[1:]]
            if atom[0] == "=":
                hit = vals[0] == vals[1]
            else:
                hit = tuple(vals) in M.relation(atom[0])
            if hit:
                out.append(i)
        return tuple(out)


def _canonical(keys: np.ndarray) -> np.ndarray:
    """Relabel block ids by order of first occurrence."""
    _, first, inverse = np.unique(keys, axis=0, return_index=True, return_inverse=True)
    inverse = inverse.reshape(-1)
    rank = np.empty(len(first), dtype=np.int64)
    rank[np.argsort(first, kind="stable")] = np.arange(len(first))
    return rank[inverse]


class _Refinement:
    """Partition refinement over the injective tuples of several structures."""

    def __init__(self, structures: Sequence[Structure], max_len: int):
        sig = structures[0].signature
        for S in structures:
            if S.signature != sig:
                raise ValueError("structures must share a signature")
        count = sum(_count_tuples(S.size, max_len) for S in structures)
        if count > MAX_TUPLES:
            raise ValueError(f"{count} injective tuples exceed the resource guard of {MAX_TUPLES}; "
                             "use smaller structures or a smaller K")
        self.structures = tuple(structures)
        self.max_len = max_len
        self.tuples: list[tuple[int, tuple]] = []
        self.index: list[dict] = [dict() for _ in structures]
        per_side = [injective_tuples(S.size, max_len) for S in structures]
        for k in range(max_len + 1):
            for s, tups in enumerate(per_side):
                for t in tups:
                    if len(t) == k:
                        self.index[s][t] = len(self.tuples)
                        self.tuples.append((s, t))
        self.lengths = np.array([len(t) for _, t in self.tuples], dtype=np.int64)

        # level 0: atomic types, built one coordinate at a time
        new_atoms = _NewAtoms(sig)
        keys: dict = {}
        level0 = np.empty(len(self.tuples), dtype=np.int64)
        for i, (s, t) in enumerate(self.tuples):
            M = structures[s]
            if not t:
                key = ("root", new_atoms.root(M))
            else:
                key = (level0[self.index[s][t[:-1]]], new_atoms.bits(M, t))
            level0[i] = keys.setdefault(key, len(keys))

        width = max(S.size for S in structures)
        ext = np.full((len(self.tuples), width), -1, dtype=np.int64)
        for i, (s, t) in enumerate(self.tuples):
            if len(t) == max_len:
                continue
            idx = self.index[s]
            for c in range(structures[s].size):
                if c not in t:
                    ext[i, c] = idx[t + (c,)]
        self.ext = ext

        self.levels = [_canonical(level0[:, None])]
        while True:
            nxt = self._step(self.levels[-1])
            if nxt.max(initial=-1) == self.levels[-1].max(initial=-1):
                break
            self.levels.append(nxt)
        self.stable_at = len(self.levels) - 1

    def _step(self, blocks: np.ndarray) -> np.ndarray:
        ext = self.ext
        succ = np.where(ext >= 0, blocks[np.maximum(ext, 0)], -1)
        succ.sort(axis=1)
        # keep each successor block once: the extension condition is about sets
        dup = np.zeros_like(succ, dtype=bool)
        dup[:, 1:] = succ[:, 1:] == succ[:, :-1]
        succ[dup] = -1
        succ.sort(axis=1)
        return _canonical(np.hstack([blocks[:, None], succ]))

    def level(self, alpha: int) -> np.ndarray:
        if alpha < 0:
            raise ValueError("levels are indexed by natural numbers")
        return self.levels[min(alpha, self.stable_at)]

    def position(self, side: int, t: tuple) -> int:
        try:
            return self.index[side][t]
        except KeyError:
            raise ValueError(f"{t} is not an injective tuple of length <= {self.max_len} "
                             f"over structure {side}") from None


@dataclass(frozen=True, eq=False)
class BFTable:
    """The stabilized ``~_alpha`` hierarchy between two structures.

    ``levels[alpha][i]`` is the block of the ``i``-th tuple of ``tuples``;
    block ids are numbered by their least member in (length, side, lex)
    order, so tables are reproducible byte for byte.
    """

    left: Structure
    right: Structure
    max_len: int
    _ref: _Refinement

    @property
    def stable_at(self) -> int:
        return self._ref.stable_at

    @property
    def levels(self) -> list[np.ndarray]:
        return self._ref.levels

    @property
    def tuples(self) -> list[tuple[int, tuple]]:
        """All ``(side, tuple)`` pairs; side 0 is ``left``, side 1 ``right``."""
        return self._ref.tuples

    def block(self, side: int, t: Sequence[int], alpha: int) -> int:
        return int(self._ref.level(alpha)[self._ref.position(side, tuple(t))])

    def partition(self, alpha: int) -> list[list[tuple[int, tuple]]]:
        """Blocks at level ``alpha``, each listed in canonical order."""
        lev = self._ref.level(alpha)
        out: list[list] = [[] for _ in range(int(lev.max(initial=-1)) + 1)]
        for i, item in enumerate(self._ref.tuples):
            out[lev[i]].append(item)
        return out

    def equiv(self, a: Sequence[int], b: Sequence[int], alpha: int) -> bool:
        sa, pa = support(a)
        sb, pb = support(b)
        if pa != pb:
            return False
        return self.block(0, sa, alpha) == self.block(1, sb, alpha)


@lru_cache(maxsize=4096)
def _table(M: Structure, N: Structure, K: int) -> BFTable:
    return BFTable(M, N, K, _Refinement((M, N), K))


def bf_table(M: Structure, N: Structure, K: int | None = None) -> BFTable:
    """Back-and-forth table for injective tuples of length <= ``K``.

    ``K`` defaults to ``max(|M|, |N|)``, which makes every level exact.
    Smaller ``K`` truncates: tuples of length ``K`` are compared on atomic
    type only.
    """
    if K is None:
        K = max(M.size, N.size)
    if K < 1 or K > M.size + N.size:
        raise ValueError(f"K must lie in [1, {M.size + N.size}], got {K}")
    return _table(M, N, K)


def bf_equiv(M: Structure, a: Sequence[int], N: Structure, b: Sequence[int], alpha: int) -> bool:
    """Whether ``(M, a) ~_alpha (N, b)``."""
    if len(a) != len(b):
        raise ValueError(f"tuple lengths differ: {len(a)} != {len(b)}")
    for x in a:
        if not 0 <= x < M.size:
            raise ValueError(f"{x} is not an element of the left structure")
    for y in b:
        if not 0 <= y < N.size:
            raise ValueError(f"{y} is not an element of the right structure")
    return bf_table(M, N).equiv(a, b, alpha)


@lru_cache(maxsize=1024)
def _self_refinement(M: Structure) -> _Refinement:
    return _Refinement((M,), M.size)


@lru_cache(maxsize=1024)
def _rho_array(M: Structure) -> np.ndarray:
    ref = _self_refinement(M)
    stable = ref.level(ref.stable_at)
    stable_size = np.bincount(stable)[stable]
    out = np.full(len(ref.tuples), -1, dtype=np.int64)
    for alpha in range(ref.stable_at + 1):
        lev = ref.level(alpha)
        settled = (np.bincount(lev)[lev] == stable_size) & (out < 0)
        out[settled] = alpha
    return out


def rho(M: Structure, a: Sequence[int]) -> int:
    """Least level from which the ``~``-class of ``a`` among same-length
    tuples of ``M`` no longer shrinks."""
    sa, _ = support(a)
    ref = _self_refinement(M)
    return int(_rho_array(M)[ref.position(0, sa)])


@dataclass(frozen=True)
class RankReport:
    rho_values: dict
    scott_rank: int
    r_rank: int

    def to_dict(self) -> dict:
        return {
            "scott_rank": self.scott_rank,
            "r_rank": self.r_rank,
            "rho": [{"tuple": list(t), "rho": v} for t, v in sorted(self.rho_values.items())],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), separators=(", ", ": "))


def scott_rank(M: Structure) -> RankReport:
    """Rank report of ``M``: every injective tuple's rho, ``R(M) = max rho``
    and ``SR(M) = max rho + 1``."""
    ref = _self_refinement(M)
    values = _rho_array(M)
    rhos = {t: int(v) for (_, t), v in zip(ref.tuples, values)}
    r = int(values.max())
    return RankReport(rhos, r + 1, r)
