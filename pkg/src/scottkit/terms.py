"""Terms denoting countable linear orders.

Built from finite orders, ``w`` (omega) and ``eta`` (the rationals) with
sum (concatenation) and product.  ``a * b`` is ``b`` copies of ``a``, the
ordinal convention.  Right factors are restricted to a finite order,
``w``, ``eta`` or ``1+eta``; these are the only products the Harrison-order
identities need, and unrestricted products would leave the decidable
fragment.

Grammar::

    term := prod ('+' prod)*
    prod := atom ('*' atom)*
    atom := nat | 'w' ['^' nat] | 'eta' | '(' term ')'

``w^e`` abbreviates the left-associated product of ``e`` copies of ``w``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Union

__all__ = [
    "Fin",
    "Omega",
    "Eta",
    "Sum",
    "Prod",
    "OrderTerm",
    "ONE_PLUS_ETA",
    "TermError",
    "TermSyntaxError",
    "UnsupportedFactor",
    "parse_term",
    "term_text",
    "omega_power",
    "is_ordinal_term",
]


class TermError(ValueError):
    pass


class TermSyntaxError(TermError):
    pass


class UnsupportedFactor(TermError):
    pass


@dataclass(frozen=True)
class Fin:
    n: int

    def __post_init__(self):
        if not isinstance(self.n, int) or isinstance(self.n, bool) or self.n < 0:
            raise TermError(f"Fin needs a natural number, got {self.n!r}")


@dataclass(frozen=True)
class Omega:
    pass


@dataclass(frozen=True)
class Eta:
    pass


@dataclass(frozen=True)
class Sum:
    parts: tuple

    def __post_init__(self):
        object.__setattr__(self, "parts", tuple(self.parts))
        for p in self.parts:
            if not isinstance(p, (Fin, Omega, Eta, Sum, Prod)):
                raise TermError(f"not an order term: {p!r}")


@dataclass(frozen=True)
class Prod:
    left: "OrderTerm"
    right: "OrderTerm"

    def __post_init__(self):
        if not isinstance(self.left, (Fin, Omega, Eta, Sum, Prod)):
            raise TermError(f"not an order term: {self.left!r}")
        if not isinstance(self.right, (Fin, Omega, Eta)) and self.right != ONE_PLUS_ETA:
            raise UnsupportedFactor(
                f"unsupported right factor {term_text(self.right)!r}: use a natural number, w, eta or 1+eta")


OrderTerm = Union[Fin, Omega, Eta, Sum, Prod]
ONE_PLUS_ETA = Sum((Fin(1), Eta()))


def omega_power(e: int) -> OrderTerm:
    """``w^e`` as a left-associated product; ``w^0`` is ``1``."""
    if e == 0:
        return Fin(1)
    t: OrderTerm = Omega()
    for _ in range(e - 1):
        t = Prod(t, Omega())
    return t


def is_ordinal_term(t: OrderTerm) -> bool:
    """True when ``t`` contains no ``eta`` (so it denotes an ordinal)."""
    if isinstance(t, Eta):
        return False
    if isinstance(t, Sum):
        return all(is_ordinal_term(p) for p in t.parts)
    if isinstance(t, Prod):
        return is_ordinal_term(t.left) and is_ordinal_term(t.right)
    return True


# --- parsing --------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+)|(eta|w)|([+*^()]))")


def _tokens(text):
    pos, out = 0, []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise TermSyntaxError(f"unexpected character {text[pos:].lstrip()[:1]!r} at offset {pos}")
        out.append((m.group(m.lastindex), m.start(m.lastindex)))
        pos = m.end()
    out.append(("", len(text)))
    return out


class _Parser:
    def __init__(self, text):
        self.toks = _tokens(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i][0]

    def take(self, expected=None):
        tok, pos = self.toks[self.i]
        if expected is not None and tok != expected:
            shown = repr(tok) if tok else "end of input"
            raise TermSyntaxError(f"expected {expected!r} at offset {pos}, found {shown}")
        self.i += 1
        return tok

    def term(self):
        parts = [self.prod()]
        while self.peek() == "+":
            self.take()
            parts.append(self.prod())
        return parts[0] if len(parts) == 1 else Sum(tuple(parts))

    def prod(self):
        t = self.atom()
        while self.peek() == "*":
            self.take()
            t = Prod(t, self.atom())
        return t

    def atom(self):
        tok, pos = self.toks[self.i]
        if tok.isdigit():
            self.take()
            return Fin(int(tok))
        if tok == "eta":
            self.take()
            return Eta()
        if tok == "w":
            self.take()
            if self.peek() != "^":
                return Omega()
            self.take()
            e = self.atom()
            if not isinstance(e, Fin):
                raise UnsupportedFactor(f"exponent at offset {pos} must be a natural number")
            return omega_power(e.n)
        if tok == "(":
            self.take()
            t = self.term()
            self.take(")")
            return t
        shown = repr(tok) if tok else "end of input"
        raise TermSyntaxError(f"expected a term at offset {pos}, found {shown}")


def parse_term(text: str) -> OrderTerm:
    """Parse the term grammar; products associate to the left."""
    p = _Parser(text)
    t = p.term()
    if p.peek() != "":
        tok, pos = p.toks[p.i]
        raise TermSyntaxError(f"unexpected {tok!r} at offset {pos}")
    return t


def term_text(t: OrderTerm) -> str:
    """Render a term in the input grammar (round-trips through parse_term)."""
    if isinstance(t, Fin):
        return str(t.n)
    if isinstance(t, Omega):
        return "w"
    if isinstance(t, Eta):
        return "eta"
    if isinstance(t, Sum):
        if not t.parts:
            return "0"
        return "+".join(term_text(p) if not isinstance(p, Sum) else f"({term_text(p)})" for p in t.parts)
    left = term_text(t.left)
    if isinstance(t.left, Sum):
        left = f"({left})"
    right = term_text(t.right)
    if isinstance(t.right, (Sum, Prod)):
        right = f"({right})"
    return f"{left}*{right}"
