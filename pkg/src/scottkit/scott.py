"""Back-and-forth formulas, canonical Scott sentences and model classes.

``phi_formula(M, a, alpha)`` holds of a tuple ``b`` in ``N`` exactly when
``(M, a) ~_alpha (N, b)``.  At level 0 it is the conjunction of the atomic
and negated atomic formulas true of ``a``; at level ``beta + 1`` it says
that every one-point extension of ``a`` is matched by one of the tuple in
question, and vice versa.

An extension of ``a`` by an element ``a[i]`` it already contains is written
``v_i = w  and  phi(a, beta)`` instead of unfolding ``phi(a + (a[i],), beta)``;
the two are equivalent and the shorter form keeps the formula DAG over
injective tuples only.  Pass ``literal=True`` to unfold it anyway.
"""
from __future__ import annotations

from functools import lru_cache
from typing import Iterable, Sequence

from .backforth import scott_rank
from .formulas import (DEFAULT_POOL, Atom, Conj, Disj, Equal, Evaluator, Exists,
                       Forall, Formula, FormulaError, FormulaPool, Not)
from .structures import Structure, atoms

__all__ = ["phi_formula", "css", "mod_check", "atom_literals"]


def _as_formula(atom, pool):
    head, *terms = atom
    args = [x for _, x in terms]
    if head == "=":
        return Equal(*args, pool=pool)
    return Atom(head, *args, pool=pool)


def atom_literals(M: Structure, a: Sequence[int], pool: FormulaPool = None) -> list[Formula]:
    """Every atomic formula over ``v0..v{k-1}`` if ``a`` satisfies it, else
    its negation, in the fixed atom enumeration order."""
    pool = DEFAULT_POOL if pool is None else pool
    out = []
    for atom in atoms(M.signature, len(a)):
        vals = [a[x] if kind == "v" else M.constant(x) for kind, x in atom[1:]]
        if atom[0] == "=":
            true = vals[0] == vals[1]
        else:
            true = tuple(vals) in M.relation(atom[0])
        f = _as_formula(atom, pool)
        out.append(f if true else Not(f))
    return out


class _PhiBuilder:
    def __init__(self, M, pool, literal):
        self.M = M
        self.pool = pool
        self.literal = literal
        self.memo = {}

    def phi(self, a, alpha):
        key = (a, alpha)
        f = self.memo.get(key)
        if f is None:
            f = self._build(a, alpha)
            self.memo[key] = f
        return f

    def _build(self, a, alpha):
        if alpha == 0:
            return Conj(atom_literals(self.M, a, self.pool), pool=self.pool)
        k = len(a)
        ext = [self._extension(a, b, alpha - 1) for b in range(self.M.size)]
        forth = [Exists(k, g) for g in ext]
        back = Forall(k, Disj(ext, pool=self.pool))
        return Conj(forth + [back], pool=self.pool)

    def _extension(self, a, b, beta):
        if b in a and not self.literal:
            return Conj([Equal(a.index(b), len(a), pool=self.pool), self.phi(a, beta)], pool=self.pool)
        return self.phi(a + (b,), beta)


@lru_cache(maxsize=256)
def _builder(M: Structure, pool: FormulaPool, literal: bool) -> _PhiBuilder:
    return _PhiBuilder(M, pool, literal)


def phi_formula(M: Structure, a: Sequence[int], alpha: int, *, literal: bool = False,
                pool: FormulaPool = None) -> Formula:
    """The formula ``Phi^M_{a,alpha}(v0..v{k-1})`` for ``k = len(a)``."""
    if alpha < 0:
        raise ValueError("alpha must be a natural number")
    a = tuple(int(x) for x in a)
    for x in a:
        if not 0 <= x < M.size:
            raise ValueError(f"{x} is not an element of the structure")
    return _builder(M, DEFAULT_POOL if pool is None else pool, literal).phi(a, alpha)


def css(M: Structure, pool: FormulaPool = None) -> Formula:
    """Canonical Scott sentence of ``M``.

    With ``alpha = R(M)``: ``Phi_{(),alpha}`` conjoined with
    ``forall v (Phi_{a,alpha}(v) -> Phi_{a,alpha+1}(v))`` for every
    injective tuple ``a`` of ``M``.
    """
    report = scott_rank(M)
    alpha = report.r_rank
    parts = [phi_formula(M, (), alpha, pool=pool)]
    for a in report.rho_values:
        body = Disj([Not(phi_formula(M, a, alpha, pool=pool)), phi_formula(M, a, alpha + 1, pool=pool)])
        for v in reversed(range(len(a))):
            body = Forall(v, body)
        parts.append(body)
    return Conj(parts, pool=pool)


def mod_check(f: Formula, corpus: Iterable[Structure]) -> list[bool]:
    """Which structures of ``corpus`` are models of the sentence ``f``."""
    if f.free:
        raise FormulaError(f"not a sentence: free variables {sorted(f.free)}")
    return [Evaluator(N).holds(f) for N in corpus]
