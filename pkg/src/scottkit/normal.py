"""Rewrite-based normal forms for order terms.

A normal form is a sum of segments:

* ``Mono(e, c)``: the ordinal monomial ``w^e * c`` (``c >= 1``);
* ``Dense(D)``: ``D * eta`` for a non-empty normal form ``D``;
* ``Inert(L)``: ``L * w`` where no rule below applies to ``L``.

Sums are built left to right.  A monomial absorbs the monomials of smaller
exponent directly before it and merges with one of equal exponent.  A
dense block ``D*eta`` absorbs a following ``D*eta`` when at most one copy
of ``D`` sits between them (``eta + 1 + eta = eta``; with two points in
between they would be adjacent, so the rule stops there).  Products:

* ``L * k``: ``k``-fold sum;
* ``L * w``: for an ordinal ``w^e*c + ...`` this is ``w^(e+1)``;
  ``(A + A*eta + R) * w = A + A*eta`` whenever ``R + A = A``;
  ``(D*eta) * w`` and ``(D*eta + D) * w`` are ``D*eta``; anything else
  stays an inert segment;
* ``L * eta``: a dense block, with ``(D*eta)*eta = D*eta``;
* ``L * (1+eta)``: ``L + L*eta``.

Equal normal forms denote isomorphic orders.  Distinct normal forms need
not denote distinct orders outside the ordinal fragment, which is why
:func:`term_equal` falls back on Ehrenfeucht-Fraisse types for refutations
and answers ``unknown`` otherwise.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from .eftypes import N_MAX, ef_type
from .terms import (ONE_PLUS_ETA, Eta, Fin, Omega, OrderTerm, Prod, Sum, TermError,
                    is_ordinal_term, omega_power, parse_term)

__all__ = [
    "Mono",
    "Dense",
    "Inert",
    "NormalForm",
    "normalize",
    "term_equal",
    "Verdict",
    "harrison",
]


@dataclass(frozen=True)
class Mono:
    exp: int
    coef: int


@dataclass(frozen=True)
class Dense:
    base: tuple


@dataclass(frozen=True)
class Inert:
    base: tuple


Segment = Union[Mono, Dense, Inert]


def _append(segs: list, seg) -> None:
    if isinstance(seg, Mono):
        while segs and isinstance(segs[-1], Mono) and segs[-1].exp < seg.exp:
            segs.pop()
        if segs and isinstance(segs[-1], Mono) and segs[-1].exp == seg.exp:
            seg = Mono(seg.exp, segs.pop().coef + seg.coef)
        segs.append(seg)
    elif isinstance(seg, Dense):
        if segs and segs[-1] == seg:
            return
        m = len(seg.base)
        if len(segs) > m and segs[-m - 1] == seg and tuple(segs[-m:]) == seg.base:
            del segs[-m:]
            return
        segs.append(seg)
    else:
        segs.append(seg)


def _sum(*parts: tuple) -> tuple:
    segs: list = []
    for part in parts:
        for seg in part:
            _append(segs, seg)
    return tuple(segs)


def _is_ordinal(segs) -> bool:
    return all(isinstance(s, Mono) for s in segs)


def _dense(base: tuple) -> tuple:
    if not base:
        return ()
    if len(base) == 1 and isinstance(base[0], Dense):
        return base
    return (Dense(base),)


def _times_fin(segs: tuple, k: int) -> tuple:
    return _sum(*([segs] * k))


def _times_omega(segs: tuple) -> tuple:
    if not segs:
        return ()
    if _is_ordinal(segs):
        return (Mono(segs[0].exp + 1, 1),)
    for i, seg in enumerate(segs):
        if isinstance(seg, Dense) and i > 0 and segs[:i] == seg.base:
            rest = segs[i + 1:]
            if _sum(rest, seg.base) == seg.base:
                return segs[:i + 1]
    first = segs[0]
    if isinstance(first, Dense) and segs[1:] in ((), first.base):
        return (first,)
    return (Inert(segs),)


def _nf(t: OrderTerm) -> tuple:
    if isinstance(t, Fin):
        return (Mono(0, t.n),) if t.n else ()
    if isinstance(t, Omega):
        return (Mono(1, 1),)
    if isinstance(t, Eta):
        return (Dense((Mono(0, 1),)),)
    if isinstance(t, Sum):
        return _sum(*(_nf(p) for p in t.parts))
    left = _nf(t.left)
    r = t.right
    if isinstance(r, Fin):
        return _times_fin(left, r.n)
    if isinstance(r, Omega):
        return _times_omega(left)
    if isinstance(r, Eta):
        return _dense(left)
    if r == ONE_PLUS_ETA:
        return _sum(left, _dense(left))
    raise TermError(f"unsupported right factor {r!r}")


# --- rendering ------------------------------------------------------------

def _mono_text(m: Mono) -> str:
    if m.exp == 0:
        return str(m.coef)
    head = "w" if m.exp == 1 else f"w^{m.exp}"
    return head if m.coef == 1 else f"{head}*{m.coef}"


def _factor(segs: tuple) -> str:
    """Text of ``segs`` usable as the left operand of ``*``."""
    text = _text(segs)
    if len(segs) == 1 and isinstance(segs[0], Mono):
        return text
    return f"({text})"


def _text(segs: tuple) -> str:
    if not segs:
        return "0"
    out = []
    i = 0
    while i < len(segs):
        seg = segs[i]
        nxt = i + 1
        if isinstance(seg, Mono):
            # A followed by A*eta prints as A*(1+eta)
            j = i + 1
            while j < len(segs) and isinstance(segs[j], Mono):
                j += 1
            if j < len(segs) and isinstance(segs[j], Dense) and segs[j].base == segs[i:j]:
                base = segs[i:j]
                out.append("1+eta" if base == (Mono(0, 1),) else f"{_factor(base)}*(1+eta)")
                nxt = j + 1
            else:
                out.append(_mono_text(seg))
        elif isinstance(seg, Dense):
            out.append("eta" if seg.base == (Mono(0, 1),) else f"{_factor(seg.base)}*eta")
        else:
            out.append(f"({_text(seg.base)})*w")
        i = nxt
    return "+".join(out)


def _seg_term(seg) -> OrderTerm:
    if isinstance(seg, Mono):
        if seg.exp == 0:
            return Fin(seg.coef)
        base = omega_power(seg.exp)
        return base if seg.coef == 1 else Prod(base, Fin(seg.coef))
    if isinstance(seg, Dense):
        return Prod(_segs_term(seg.base), Eta())
    return Prod(_segs_term(seg.base), Omega())


def _segs_term(segs: tuple) -> OrderTerm:
    if not segs:
        return Fin(0)
    if len(segs) == 1:
        return _seg_term(segs[0])
    return Sum(tuple(_seg_term(s) for s in segs))


@dataclass(frozen=True)
class NormalForm:
    segments: tuple

    def __str__(self):
        return _text(self.segments)

    @property
    def text(self) -> str:
        return _text(self.segments)

    def to_term(self) -> OrderTerm:
        return _segs_term(self.segments)

    @property
    def is_ordinal(self) -> bool:
        return _is_ordinal(self.segments)

    @property
    def is_empty(self) -> bool:
        return not self.segments


def normalize(t: OrderTerm | str) -> NormalForm:
    """Normal form of a term (or of term text)."""
    if isinstance(t, str):
        t = parse_term(t)
    return NormalForm(_nf(t))


@dataclass(frozen=True)
class Verdict:
    """Outcome of :func:`term_equal`: ``equal``, ``distinct`` (with the
    round count ``witness`` at which the types split) or ``unknown``."""

    kind: str
    witness: int | None = None

    def __str__(self):
        return f"distinct({self.witness})" if self.kind == "distinct" else self.kind


def term_equal(t1: OrderTerm, t2: OrderTerm, n_max: int = N_MAX) -> Verdict:
    """Equal when the normal forms coincide, distinct when some game of at
    most ``n_max`` rounds tells the orders apart, unknown otherwise."""
    if normalize(t1) == normalize(t2):
        return Verdict("equal")
    for n in range(1, n_max + 1):
        if ef_type(t1, n, n_max) != ef_type(t2, n, n_max):
            return Verdict("distinct", n)
    return Verdict("unknown")


def harrison(A: OrderTerm) -> OrderTerm:
    """The Harrison shape ``A * (1+eta)`` for an ordinal term ``A``."""
    if not is_ordinal_term(A):
        raise TermError("harrison() needs an ordinal term (no eta)")
    return Prod(A, ONE_PLUS_ETA)
