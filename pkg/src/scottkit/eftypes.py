"""n-round Ehrenfeucht-Fraisse types of linear orders.

Choosing a point ``c`` of a linear order ``L`` splits it into the open
intervals ``L<c`` and ``L>c``, and a pebbled position only depends on the
intervals between pebbles.  Hence the ``n``-round type of ``L`` is the set
of pairs ``(type_{n-1}(L<c), type_{n-1}(L>c))`` over all points ``c``, and
two orders are ``n``-round equivalent iff these sets coincide.  The 0-round
type is the same for every order.

Types are interned per round, so type equality is id equality.  Sum,
``x * w`` and ``x * eta`` act on types directly:

* splits of ``x + y``: ``(p, s + y)`` for splits of ``x``, ``(x + p, s)``
  for splits of ``y``;
* ``x * w``: a point in copy ``i`` splits as ``(x*i + p, s + x*w)``, and
  the powers ``x*i`` form a finite set because each round has finitely
  many types;
* ``x * eta``: every copy has ``x*eta`` on both sides, so the splits are
  ``(x*eta + p, s + x*eta)``.
"""
from __future__ import annotations

import threading
from functools import lru_cache

from .terms import ONE_PLUS_ETA, Eta, Fin, Omega, OrderTerm, Prod, Sum

__all__ = [
    "EFType",
    "EFError",
    "TypeSpace",
    "ef_type",
    "ef_equiv",
    "game_solver",
    "N_MAX",
]

N_MAX = 6
ITERATION_CAP = 10**5


class EFError(ValueError):
    pass


class TypeSpace:
    """Interned types, one table per round, with memoized arithmetic."""

    def __init__(self):
        self._lock = threading.RLock()
        self._sets: list[list[frozenset]] = [[frozenset()]]
        self._ids: list[dict] = [{frozenset(): 0}]
        self._memo: dict = {}

    def _table(self, m):
        while len(self._sets) <= m:
            self._sets.append([])
            self._ids.append({})
        return self._sets[m], self._ids[m]

    def intern(self, m: int, splits) -> int:
        if m == 0:
            return 0
        splits = frozenset(splits)
        with self._lock:
            sets, ids = self._table(m)
            i = ids.get(splits)
            if i is None:
                i = len(sets)
                sets.append(splits)
                ids[splits] = i
            return i

    def splits(self, m: int, x: int) -> frozenset:
        if m == 0:
            return frozenset()
        return self._table(m)[0][x]

    def count(self, m: int) -> int:
        return len(self._table(m)[0])

    def _cached(self, key, compute):
        hit = self._memo.get(key)
        if hit is None:
            hit = compute()
            self._memo[key] = hit
        return hit

    def project(self, m: int, x: int) -> int:
        """Type at round ``m-1`` of an order of round-``m`` type ``x``."""
        if m <= 1:
            return 0
        return self._cached(("proj", m, x), lambda: self.intern(
            m - 1, {(self.project(m - 1, p), self.project(m - 1, s)) for p, s in self.splits(m, x)}))

    def empty(self, m: int) -> int:
        return self.intern(m, ())

    def fin(self, m: int, k: int) -> int:
        if m == 0:
            return 0
        key = ("fin", m, k)
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        # build upwards so long chains do not recurse deeply
        for j in range(k + 1):
            if ("fin", m, j) not in self._memo:
                self._memo[("fin", m, j)] = self.intern(
                    m, {(self.fin(m - 1, i), self.fin(m - 1, j - 1 - i)) for i in range(j)})
        return self._memo[key]

    def add(self, m: int, x: int, y: int) -> int:
        if m == 0:
            return 0

        def compute():
            px, py = self.project(m, x), self.project(m, y)
            out = {(p, self.add(m - 1, s, py)) for p, s in self.splits(m, x)}
            out |= {(self.add(m - 1, px, p), s) for p, s in self.splits(m, y)}
            return self.intern(m, out)

        return self._cached(("add", m, x, y), compute)

    def times(self, m: int, x: int, k: int) -> int:
        acc = self.empty(m)
        for _ in range(k):
            acc = self.add(m, acc, x)
        return acc

    def powers(self, m: int, x: int) -> frozenset:
        """``{x*i : i >= 0}`` at round ``m``."""

        def compute():
            seen, cur = [], self.empty(m)
            while cur not in seen:
                seen.append(cur)
                if len(seen) > ITERATION_CAP:
                    raise EFError("power iteration did not stabilise")
                cur = self.add(m, cur, x)
            return frozenset(seen)

        return self._cached(("pow", m, x), compute)

    def times_omega(self, m: int, x: int) -> int:
        if m == 0:
            return 0

        def compute():
            px = self.project(m, x)
            tail = self.times_omega(m - 1, px)
            pows = self.powers(m - 1, px)
            out = set()
            for p, s in self.splits(m, x):
                right = self.add(m - 1, s, tail)
                for q in pows:
                    out.add((self.add(m - 1, q, p), right))
            return self.intern(m, out)

        return self._cached(("omega", m, x), compute)

    def times_eta(self, m: int, x: int) -> int:
        if m == 0:
            return 0

        def compute():
            e = self.times_eta(m - 1, self.project(m, x))
            return self.intern(m, {(self.add(m - 1, e, p), self.add(m - 1, s, e))
                                   for p, s in self.splits(m, x)})

        return self._cached(("eta", m, x), compute)

    def of_term(self, t: OrderTerm, m: int) -> int:
        return self._cached(("term", m, t), lambda: self._of_term(t, m))

    def _of_term(self, t, m):
        if isinstance(t, Fin):
            return self.fin(m, t.n)
        if isinstance(t, Omega):
            return self.times_omega(m, self.fin(m, 1))
        if isinstance(t, Eta):
            return self.times_eta(m, self.fin(m, 1))
        if isinstance(t, Sum):
            acc = self.empty(m)
            for p in t.parts:
                acc = self.add(m, acc, self.of_term(p, m))
            return acc
        x = self.of_term(t.left, m)
        r = t.right
        if isinstance(r, Fin):
            return self.times(m, x, r.n)
        if isinstance(r, Omega):
            return self.times_omega(m, x)
        if isinstance(r, Eta):
            return self.times_eta(m, x)
        if r == ONE_PLUS_ETA:
            return self.add(m, x, self.times_eta(m, x))
        raise EFError(f"unsupported right factor {r!r}")


_SPACE = TypeSpace()


class EFType:
    """Handle on an interned type: ``rounds`` and an id within that round."""

    __slots__ = ("rounds", "id", "space")

    def __init__(self, rounds: int, id: int, space: TypeSpace = _SPACE):
        self.rounds = rounds
        self.id = id
        self.space = space

    def __eq__(self, other):
        return (isinstance(other, EFType) and self.space is other.space
                and (self.rounds, self.id) == (other.rounds, other.id))

    def __hash__(self):
        return hash((self.rounds, self.id))

    def __repr__(self):
        return f"EFType(rounds={self.rounds}, id={self.id})"

    @property
    def is_empty(self) -> bool:
        """Whether the order is empty; only visible from round 1 on."""
        if self.rounds == 0:
            raise EFError("a 0-round type does not record emptiness")
        return not self.space.splits(self.rounds, self.id)

    @property
    def splits(self) -> frozenset:
        if self.rounds == 0:
            return frozenset()
        m = self.rounds - 1
        return frozenset((EFType(m, p, self.space), EFType(m, s, self.space))
                         for p, s in self.space.splits(self.rounds, self.id))

    def project(self) -> "EFType":
        if self.rounds == 0:
            raise EFError("cannot project a 0-round type")
        return EFType(self.rounds - 1, self.space.project(self.rounds, self.id), self.space)

    def dump(self, indent: int = 0) -> str:
        """Indented split tree, one line per split pair."""
        pad = "  " * indent
        if self.rounds == 0:
            return f"{pad}*\n"
        if self.is_empty:
            return f"{pad}[{self.rounds}] empty\n"
        lines = [f"{pad}[{self.rounds}] #{self.id}\n"]
        for p, s in sorted(self.splits, key=lambda ps: (ps[0].id, ps[1].id)):
            lines.append(f"{pad}  split\n")
            lines.append(p.dump(indent + 2))
            lines.append(s.dump(indent + 2))
        return "".join(lines)


def _guard(n, n_max):
    if not isinstance(n, int) or n < 0:
        raise EFError(f"round count must be a natural number, got {n!r}")
    if n > n_max:
        raise EFError(f"{n} rounds exceeds the resource guard of {n_max}")


def ef_type(t: OrderTerm, n: int, n_max: int = N_MAX) -> EFType:
    """The ``n``-round type of the order denoted by ``t``."""
    _guard(n, n_max)
    return EFType(n, _SPACE.of_term(t, n))


def ef_equiv(t1: OrderTerm, t2: OrderTerm, n: int, n_max: int = N_MAX) -> bool:
    """Whether Duplicator wins the ``n``-round game on the two orders."""
    return ef_type(t1, n, n_max) == ef_type(t2, n, n_max)


def game_solver(p: int, q: int, n: int) -> bool:
    """Exhaustive ``n``-round game on the finite orders of sizes ``p`` and
    ``q``; true iff Duplicator has a winning strategy."""
    if not (0 <= p <= 10 and 0 <= q <= 10 and 0 <= n <= 4):
        raise EFError("game_solver needs p, q <= 10 and n <= 4")
    return _duplicator_wins(p, q, n, ())


def _partial_iso(pairs):
    for a, b in pairs:
        for c, d in pairs:
            if (a < c) != (b < d) or (a == c) != (b == d):
                return False
    return True


@lru_cache(maxsize=None)
def _duplicator_wins(p, q, n, pairs):
    if n == 0:
        return True
    for side, size, other in ((0, p, q), (1, q, p)):
        for x in range(size):
            answered = False
            for y in range(other):
                move = (x, y) if side == 0 else (y, x)
                nxt = tuple(sorted(set(pairs) | {move}))
                if _partial_iso(nxt) and _duplicator_wins(p, q, n - 1, nxt):
                    answered = True
                    break
            if not answered:
                return False
    return True
