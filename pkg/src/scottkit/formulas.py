"""Hash-consed formulas with finitely branching conjunctions and disjunctions.

Every formula lives in a :class:`FormulaPool`; building the same shape twice
returns the same node, so structural equality is identity.  Conjunction and
disjunction take *sets* of formulas: children are deduplicated and sorted by
a structural digest that does not depend on interning order.

Variables are non-negative integers; constants are referred to by name.
"""
from __future__ import annotations

import hashlib
import json
import threading
from typing import Iterable, Mapping, Sequence

import numpy as np

from .structures import Structure

__all__ = [
    "Formula",
    "FormulaPool",
    "DEFAULT_POOL",
    "FormulaError",
    "UnassignedVariable",
    "Atom",
    "Equal",
    "Not",
    "Conj",
    "Disj",
    "Exists",
    "Forall",
    "Implies",
    "qr",
    "evaluate",
    "Evaluator",
    "satisfaction",
    "to_sexpr",
    "from_sexpr",
    "to_json",
    "from_json",
]

ATOMIC = ("atom", "eq")
KEYWORDS = frozenset({"and", "or", "not", "exists", "forall", "=", "atom", "defs"})


class FormulaError(ValueError):
    pass


class UnassignedVariable(FormulaError, KeyError):
    pass


class Formula:
    """An interned formula node.  Do not instantiate directly."""

    __slots__ = ("id", "op", "data", "children", "qr", "free", "fv", "digest", "pool")

    def __init__(self, pool, id, op, data, children):
        self.pool = pool
        self.id = id
        self.op = op
        self.data = data
        self.children = children
        h = hashlib.blake2b(repr((op, data)).encode(), digest_size=16)
        for c in children:
            h.update(c.digest)
        self.digest = h.digest()
        if op in ATOMIC:
            self.qr = 0
            self.free = frozenset(t for t in data[-1] if isinstance(t, int))
        elif op in ("exists", "forall"):
            self.qr = children[0].qr + 1
            self.free = children[0].free - {data}
        else:
            self.qr = max((c.qr for c in children), default=0)
            self.free = frozenset().union(*(c.free for c in children))
        self.fv = tuple(sorted(self.free))

    def __repr__(self):
        text = _expr(self, {})
        return text if len(text) < 200 else text[:197] + "..."

    def __reduce__(self):
        raise TypeError("formulas are pool-bound; serialize with to_json")


class FormulaPool:
    """Interning table from node shape to node."""

    def __init__(self):
        self._table: dict = {}
        self._nodes: list[Formula] = []
        self._lock = threading.Lock()

    def __len__(self):
        return len(self._nodes)

    def intern(self, op: str, data, children: Sequence[Formula] = ()) -> Formula:
        children = tuple(children)
        for c in children:
            if c.pool is not self:
                raise FormulaError("cannot mix formulas from different pools")
        key = (op, data, tuple(c.id for c in children))
        node = self._table.get(key)
        if node is None:
            with self._lock:
                node = self._table.get(key)
                if node is None:
                    node = Formula(self, len(self._nodes), op, data, children)
                    self._nodes.append(node)
                    self._table[key] = node
        return node

    def lookup(self, node_id: int) -> Formula:
        return self._nodes[node_id]


DEFAULT_POOL = FormulaPool()


def _term(t):
    if isinstance(t, bool):
        raise FormulaError(f"invalid term {t!r}")
    if isinstance(t, (int, np.integer)):
        if t < 0:
            raise FormulaError(f"variable index must be >= 0, got {t}")
        return int(t)
    if isinstance(t, str) and t:
        return t
    raise FormulaError(f"invalid term {t!r}")


def Atom(rel: str, *args, pool: FormulaPool = None) -> Formula:
    """Relation atom ``rel(args)``; an int argument is a variable, a str a constant."""
    return (DEFAULT_POOL if pool is None else pool).intern("atom", (str(rel), tuple(_term(a) for a in args)))


def Equal(s, t, pool: FormulaPool = None) -> Formula:
    return (DEFAULT_POOL if pool is None else pool).intern("eq", ((_term(s), _term(t)),))


def _pool_of(fs, pool):
    if pool is not None:
        return pool
    return fs[0].pool if fs else DEFAULT_POOL


def Not(f: Formula) -> Formula:
    return f.pool.intern("not", None, (f,))


def _junction(op, fs, pool):
    fs = list(fs)
    pool = _pool_of(fs, pool)
    uniq = {f.id: f for f in fs}
    kids = sorted(uniq.values(), key=lambda f: f.digest)
    return pool.intern(op, None, kids)


def Conj(fs: Iterable[Formula] = (), pool: FormulaPool = None) -> Formula:
    return _junction("and", fs, pool)


def Disj(fs: Iterable[Formula] = (), pool: FormulaPool = None) -> Formula:
    return _junction("or", fs, pool)


def Exists(var: int, f: Formula) -> Formula:
    return f.pool.intern("exists", _term(var) if isinstance(var, int) else _bad_var(var), (f,))


def Forall(var: int, f: Formula) -> Formula:
    return f.pool.intern("forall", _term(var) if isinstance(var, int) else _bad_var(var), (f,))


def _bad_var(v):
    raise FormulaError(f"quantified variable must be an int, got {v!r}")


def Implies(a: Formula, b: Formula) -> Formula:
    return Disj([Not(a), b])


def qr(f: Formula) -> int:
    """Quantifier rank: 0 on atoms, unchanged by negation, max over a
    conjunction or disjunction, plus one per quantifier."""
    return f.qr


# --- evaluation -----------------------------------------------------------

def _term_value(M, t, env):
    if isinstance(t, int):
        try:
            return env[t]
        except KeyError:
            raise UnassignedVariable(f"variable {t} is free but unassigned") from None
    try:
        return M.constant(t)
    except ValueError:
        raise FormulaError(f"unknown constant {t!r}") from None


class Evaluator:
    """Pointwise model checker over one structure, memoized on
    ``(node, values of its free variables)``."""

    def __init__(self, M: Structure):
        self.M = M
        self._memo: dict = {}
        self._order: dict = {}

    def holds(self, f: Formula, asg: Mapping[int, int] | None = None) -> bool:
        env = dict(asg or {})
        for v in f.free:
            if v not in env:
                raise UnassignedVariable(f"variable {v} is free but unassigned")
            if not 0 <= env[v] < self.M.size:
                raise FormulaError(f"variable {v} assigned {env[v]}, outside the universe")
        return self._eval(f, env)

    def _children(self, f):
        # cheap children first; short-circuiting does not change the value
        kids = self._order.get(f.id)
        if kids is None:
            kids = sorted(f.children, key=lambda c: c.qr)
            self._order[f.id] = kids
        return kids

    def _eval(self, f, env):
        key = (f.id, tuple([env[v] for v in f.fv]))
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        op = f.op
        M = self.M
        if op == "atom":
            rel, args = f.data
            try:
                table = M.relation(rel)
            except KeyError:
                raise FormulaError(f"unknown relation {rel!r}") from None
            val = tuple(_term_value(M, t, env) for t in args) in table
        elif op == "eq":
            s, t = f.data[0]
            val = _term_value(M, s, env) == _term_value(M, t, env)
        elif op == "not":
            val = not self._eval(f.children[0], env)
        elif op == "and":
            val = all(self._eval(c, env) for c in self._children(f))
        elif op == "or":
            val = any(self._eval(c, env) for c in self._children(f))
        else:
            v, body = f.data, f.children[0]
            test = any if op == "exists" else all
            val = test(self._eval(body, {**env, v: d}) for d in range(M.size))
        self._memo[key] = val
        return val


def evaluate(M: Structure, f: Formula, asg: Mapping[int, int] | None = None) -> bool:
    """Tarskian truth of ``f`` in ``M`` under ``asg``.

    The empty conjunction is true, the empty disjunction false, and
    quantifiers range over ``range(M.size)``.
    """
    return Evaluator(M).holds(f, asg)


def _pad(arr, ndim):
    return arr.reshape(arr.shape + (1,) * (ndim - arr.ndim))


def _width(f):
    return max(f.free) + 1 if f.free else 0


def satisfaction(M: Structure, f: Formula, memo: dict | None = None,
                 max_cells: int = 10**7) -> np.ndarray:
    """All assignments satisfying ``f`` at once.

    Returns a boolean array with one axis per variable ``0..max free``;
    axes of variables that are not free have length 1.  ``memo`` may be
    shared between calls on the same structure.
    """
    if M.size ** _width(f) > max_cells:
        raise FormulaError("too many free variables for array evaluation")
    memo = {} if memo is None else memo
    return _sat(M, f, memo)


def _sat(M, f, memo):
    hit = memo.get(f.id)
    if hit is not None:
        return hit
    n = M.size
    width = _width(f)
    op = f.op
    if op in ATOMIC:
        args = f.data[-1]
        idx = []
        for t in args:
            if isinstance(t, int):
                shape = [1] * width
                shape[t] = n
                idx.append(np.arange(n).reshape(shape))
            else:
                idx.append(np.full([1] * width, M.constant(t)))
        if op == "atom":
            try:
                table = M.array(f.data[0])
            except KeyError:
                raise FormulaError(f"unknown relation {f.data[0]!r}") from None
            arr = table[tuple(idx)]
        else:
            arr = idx[0] == idx[1]
        arr = _pad(np.asarray(arr), width)
    elif op == "not":
        arr = ~_sat(M, f.children[0], memo)
    elif op in ("and", "or"):
        kids = [_pad(_sat(M, c, memo), width) for c in f.children]
        if not kids:
            arr = np.full([1] * width, op == "and")
        else:
            ufunc = np.logical_and if op == "and" else np.logical_or
            arr = kids[0]
            for k in kids[1:]:
                arr = ufunc(arr, k)
    else:
        v = f.data
        body = _sat(M, f.children[0], memo)
        if v < body.ndim and body.shape[v] > 1:
            body = body.any(axis=v, keepdims=True) if op == "exists" else body.all(axis=v, keepdims=True)
        body = _pad(body, width)
        arr = body.reshape(body.shape[:width])
    memo[f.id] = arr
    return arr


# --- serialization --------------------------------------------------------

def _fmt_term(t):
    return str(t)


def _expr(f, names):
    if f.id in names:
        return names[f.id]
    op = f.op
    if op == "atom":
        rel, args = f.data
        head = rel if rel not in KEYWORDS and not rel.lstrip("-").isdigit() else f"atom {rel}"
        return "(" + " ".join([head] + [_fmt_term(t) for t in args]) + ")"
    if op == "eq":
        s, t = f.data[0]
        return f"(= {_fmt_term(s)} {_fmt_term(t)})"
    if op in ("exists", "forall"):
        return f"({op} {f.data} {_expr(f.children[0], names)})"
    return "(" + " ".join([op] + [_expr(c, names) for c in f.children]) + ")"


def _postorder(root):
    seen, order = set(), []
    stack = [(root, False)]
    while stack:
        f, done = stack.pop()
        if done:
            order.append(f)
            continue
        if f.id in seen:
            continue
        seen.add(f.id)
        stack.append((f, True))
        for c in reversed(f.children):
            if c.id not in seen:
                stack.append((c, False))
    return order


def to_sexpr(f: Formula) -> str:
    """S-expression text.  Compound nodes used more than once are emitted
    once under a leading ``(defs ...)`` block and referenced as ``#k``."""
    order = _postorder(f)
    uses: dict = {}
    for node in order:
        for c in node.children:
            uses[c.id] = uses.get(c.id, 0) + 1
    names: dict = {}
    lines = []
    for node in order:
        if node is not f and node.op not in ATOMIC and uses.get(node.id, 0) > 1:
            name = f"#{len(names) + 1}"
            lines.append(f" ({name} {_expr(node, names)})")
            names[node.id] = name
    body = _expr(f, names)
    if not lines:
        return body + "\n"
    return "(defs\n" + "\n".join(lines) + ")\n" + body + "\n"


def _tokenize(text):
    tokens = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
        elif ch in "()":
            tokens.append((ch, i))
            i += 1
        else:
            j = i
            while j < n and not text[j].isspace() and text[j] not in "()":
                j += 1
            tokens.append((text[i:j], i))
            i = j
    return tokens


def _read(tokens):
    out, stack = [], [[]]
    for tok, pos in tokens:
        if tok == "(":
            stack.append([])
        elif tok == ")":
            if len(stack) == 1:
                raise FormulaError(f"unbalanced ')' at offset {pos}")
            item = stack.pop()
            stack[-1].append(item)
        else:
            stack[-1].append(tok)
    if len(stack) != 1:
        raise FormulaError("unbalanced '(' at end of input")
    return stack[0]


def _parse_term(tok):
    if isinstance(tok, list):
        raise FormulaError(f"expected a term, got a list {tok!r}")
    return int(tok) if tok.isdigit() else tok


def _build(x, defs, pool):
    if isinstance(x, str):
        if x in defs:
            return defs[x]
        raise FormulaError(f"unexpected symbol {x!r}")
    if not x:
        raise FormulaError("empty expression")
    head, rest = x[0], x[1:]
    if isinstance(head, list):
        raise FormulaError("expression head must be a symbol")
    if head == "and":
        return Conj([_build(y, defs, pool) for y in rest], pool=pool)
    if head == "or":
        return Disj([_build(y, defs, pool) for y in rest], pool=pool)
    if head == "not":
        if len(rest) != 1:
            raise FormulaError("'not' takes one argument")
        return Not(_build(rest[0], defs, pool))
    if head in ("exists", "forall"):
        if len(rest) != 2 or isinstance(rest[0], list) or not rest[0].isdigit():
            raise FormulaError(f"'{head}' takes a variable index and a body")
        body = _build(rest[1], defs, pool)
        return (Exists if head == "exists" else Forall)(int(rest[0]), body)
    if head == "=":
        if len(rest) != 2:
            raise FormulaError("'=' takes two terms")
        return Equal(_parse_term(rest[0]), _parse_term(rest[1]), pool=pool)
    if head == "atom":
        if not rest or isinstance(rest[0], list):
            raise FormulaError("'atom' needs a relation name")
        head, rest = rest[0], rest[1:]
    return Atom(head, *[_parse_term(t) for t in rest], pool=pool)


def from_sexpr(text: str, pool: FormulaPool = None) -> Formula:
    items = _read(_tokenize(text))
    if not items:
        raise FormulaError("no formula in input")
    defs: dict = {}
    if len(items) == 2 and isinstance(items[0], list) and items[0][:1] == ["defs"]:
        for entry in items[0][1:]:
            if not isinstance(entry, list) or len(entry) != 2 or not isinstance(entry[0], str):
                raise FormulaError(f"malformed definition {entry!r}")
            defs[entry[0]] = _build(entry[1], defs, pool)
        items = items[1:]
    if len(items) != 1:
        raise FormulaError("expected exactly one formula")
    return _build(items[0], defs, pool)


def to_json(f: Formula) -> str:
    """JSON DAG export ``{"nodes": [...], "root": id}`` with local ids in
    post-order."""
    local: dict = {}
    nodes = []
    for node in _postorder(f):
        local[node.id] = len(nodes)
        entry: dict = {"id": len(nodes), "op": node.op}
        if node.op == "atom":
            entry["rel"] = node.data[0]
            entry["args"] = list(node.data[1])
        elif node.op == "eq":
            entry["args"] = list(node.data[0])
        elif node.op in ("exists", "forall"):
            entry["var"] = node.data
        if node.children:
            entry["children"] = [local[c.id] for c in node.children]
        elif node.op in ("and", "or"):
            entry["children"] = []
        nodes.append(entry)
    return json.dumps({"nodes": nodes, "root": local[f.id]}, separators=(",", ":"))


def from_json(text: str, pool: FormulaPool = None) -> Formula:
    try:
        doc = json.loads(text)
        built: dict = {}
        for entry in doc["nodes"]:
            op = entry["op"]
            kids = [built[i] for i in entry.get("children", [])]
            if op == "atom":
                f = Atom(entry["rel"], *entry["args"], pool=pool)
            elif op == "eq":
                f = Equal(*entry["args"], pool=pool)
            elif op == "not":
                f = Not(kids[0])
            elif op == "and":
                f = Conj(kids, pool=pool)
            elif op == "or":
                f = Disj(kids, pool=pool)
            elif op == "exists":
                f = Exists(entry["var"], kids[0])
            elif op == "forall":
                f = Forall(entry["var"], kids[0])
            else:
                raise FormulaError(f"unknown op {op!r}")
            built[entry["id"]] = f
        return built[doc["root"]]
    except (KeyError, IndexError, TypeError, json.JSONDecodeError) as exc:
        raise FormulaError(f"malformed formula JSON: {exc}") from None
