"""Expressions of the letrec language, constructor signatures, and the
term-level utilities every other module relies on.

Expressions are immutable dataclasses.  Free-variable sets and sizes are
cached on the nodes, so repeated queries on shared subterms stay cheap.
"""

from __future__ import annotations

import re
import sys
from dataclasses import dataclass, field
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

# Deeply nested terms are processed recursively; the machines guard sizes.
if sys.getrecursionlimit() < 20000:
    sys.setrecursionlimit(20000)

Position = Tuple[int, ...]


class Expr:
    """Base class of all expression nodes."""

    __slots__ = ()

    def __str__(self) -> str:
        return pretty(self)


@dataclass(frozen=True, eq=True, repr=False)
class Var(Expr):
    name: str

    def __repr__(self):
        return f"Var({self.name!r})"


@dataclass(frozen=True, eq=True, repr=False)
class App(Expr):
    fun: Expr
    arg: Expr

    def __repr__(self):
        return f"App({self.fun!r}, {self.arg!r})"


@dataclass(frozen=True, eq=True, repr=False)
class Lam(Expr):
    var: str
    body: Expr

    def __repr__(self):
        return f"Lam({self.var!r}, {self.body!r})"


@dataclass(frozen=True, eq=True, repr=False)
class Letrec(Expr):
    bindings: Tuple[Tuple[str, Expr], ...]
    body: Expr

    def __post_init__(self):
        if not self.bindings:
            raise ValueError("letrec needs at least one binding")

    def __repr__(self):
        return f"Letrec({list(self.bindings)!r}, {self.body!r})"

    @property
    def names(self) -> Tuple[str, ...]:
        return tuple(n for n, _ in self.bindings)


@dataclass(frozen=True, eq=True, repr=False)
class Constr(Expr):
    name: str
    args: Tuple[Expr, ...] = ()

    def __repr__(self):
        return f"Constr({self.name!r}, {list(self.args)!r})"


@dataclass(frozen=True, eq=True, repr=False)
class Seq(Expr):
    first: Expr
    second: Expr

    def __repr__(self):
        return f"Seq({self.first!r}, {self.second!r})"


@dataclass(frozen=True, eq=True)
class Alt:
    """A case alternative ``C x1 .. xn -> body``.  Not an expression."""

    constr: str
    vars: Tuple[str, ...]
    body: Expr


@dataclass(frozen=True, eq=True, repr=False)
class Case(Expr):
    type: str
    scrut: Expr
    alts: Tuple[Alt, ...]

    def __repr__(self):
        return f"Case({self.type!r}, {self.scrut!r}, {list(self.alts)!r})"

    def alt_for(self, constr: str) -> Optional[Alt]:
        for a in self.alts:
            if a.constr == constr:
                return a
        return None


@dataclass(frozen=True, eq=True, repr=False)
class Bot(Expr):
    """Marker for cyclic unfoldings.  Only appears in trees."""

    def __repr__(self):
        return "Bot()"


@dataclass(frozen=True, eq=True, repr=False)
class Hole(Expr):
    def __repr__(self):
        return "Hole()"


BOT = Bot()
HOLE = Hole()


# ---------------------------------------------------------------------------
# Signatures


class SignatureError(ValueError):
    pass


@dataclass(frozen=True)
class SignatureTable:
    """Data types and their constructors with arities, in declaration order."""

    types: Tuple[Tuple[str, Tuple[Tuple[str, int], ...]], ...]
    _arity: Dict[str, int] = field(default_factory=dict, compare=False, repr=False)
    _type_of: Dict[str, str] = field(default_factory=dict, compare=False, repr=False)
    _by_type: Dict[str, Tuple[Tuple[str, int], ...]] = field(
        default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        types = tuple((t, tuple((c, int(a)) for c, a in cs)) for t, cs in self.types)
        if "Bool" not in {t for t, _ in types}:
            types = (("Bool", (("True", 0), ("False", 0))),) + types
        object.__setattr__(self, "types", types)
        for tname, cons in types:
            if tname in self._by_type:
                raise SignatureError(f"duplicate type {tname}")
            if not cons:
                raise SignatureError(f"type {tname} has no constructors")
            self._by_type[tname] = cons
            for c, a in cons:
                if c in self._arity:
                    raise SignatureError(f"constructor {c} declared twice")
                if a < 0:
                    raise SignatureError(f"negative arity for {c}")
                if c == "Bot":
                    raise SignatureError("Bot is reserved")
                self._arity[c] = a
                self._type_of[c] = tname
        if self._by_type["Bool"] != (("True", 0), ("False", 0)):
            raise SignatureError("Bool must be True/0 | False/0")

    def __hash__(self):
        return hash(self.types)

    @classmethod
    def standard(cls) -> "SignatureTable":
        """Bool and List (Nil/0, Cons/2)."""
        return cls((("Bool", (("True", 0), ("False", 0))),
                    ("List", (("Nil", 0), ("Cons", 2)))))

    @classmethod
    def parse(cls, text: str) -> "SignatureTable":
        """Read ``data T = C1/a1 | C2/a2 ;`` declarations."""
        types = []
        text = re.sub(r"--[^\n]*", "", text)
        for chunk in text.split(";"):
            chunk = chunk.strip()
            if not chunk:
                continue
            m = re.fullmatch(r"data\s+([A-Z][A-Za-z0-9_]*)\s*=\s*(.+)", chunk, re.S)
            if not m:
                raise SignatureError(f"bad declaration: {chunk!r}")
            cons = []
            for part in m.group(2).split("|"):
                cm = re.fullmatch(r"\s*([A-Z][A-Za-z0-9_]*)\s*/\s*(\d+)\s*", part)
                if not cm:
                    raise SignatureError(f"bad constructor spec {part.strip()!r}")
                cons.append((cm.group(1), int(cm.group(2))))
            types.append((m.group(1), tuple(cons)))
        return cls(tuple(types))

    @classmethod
    def from_file(cls, path) -> "SignatureTable":
        with open(path, encoding="utf-8") as fh:
            return cls.parse(fh.read())

    def arity(self, constr: str) -> int:
        try:
            return self._arity[constr]
        except KeyError:
            raise SignatureError(f"unknown constructor {constr}") from None

    def type_of(self, constr: str) -> str:
        try:
            return self._type_of[constr]
        except KeyError:
            raise SignatureError(f"unknown constructor {constr}") from None

    def constructors(self, tname: str) -> Tuple[Tuple[str, int], ...]:
        try:
            return self._by_type[tname]
        except KeyError:
            raise SignatureError(f"unknown type {tname}") from None

    def has_constructor(self, name: str) -> bool:
        return name in self._arity

    def has_type(self, name: str) -> bool:
        return name in self._by_type

    @property
    def type_names(self) -> Tuple[str, ...]:
        return tuple(t for t, _ in self.types)

    def __str__(self):
        return "\n".join(
            f"data {t} = " + " | ".join(f"{c}/{a}" for c, a in cs) + " ;"
            for t, cs in self.types)


STANDARD = SignatureTable.standard()


# ---------------------------------------------------------------------------
# Structural helpers


def children(e) -> List[Tuple[int, object]]:
    """Numbered children of a node (alternatives count as children of case)."""
    if isinstance(e, App):
        return [(1, e.fun), (2, e.arg)]
    if isinstance(e, Lam):
        return [(1, e.body)]
    if isinstance(e, Seq):
        return [(1, e.first), (2, e.second)]
    if isinstance(e, Constr):
        return [(i + 1, a) for i, a in enumerate(e.args)]
    if isinstance(e, Case):
        return [(1, e.scrut)] + [(i + 2, a) for i, a in enumerate(e.alts)]
    if isinstance(e, Alt):
        return [(1, e.body)]
    if isinstance(e, Letrec):
        return [(1, e.body)] + [(i + 2, rhs) for i, (_, rhs) in enumerate(e.bindings)]
    return []


def subterm(e, pos: Sequence[int]):
    """The node at ``pos``; letrec child 1 is the body, child i+1 binding i."""
    for i in pos:
        kids = dict(children(e))
        if i not in kids:
            raise IndexError(f"invalid position {format_position(pos)}")
        e = kids[i]
    return e


def with_child(e, i: int, new):
    """Copy of node ``e`` with child ``i`` replaced."""
    if isinstance(e, App):
        return App(new, e.arg) if i == 1 else App(e.fun, new)
    if isinstance(e, Lam):
        return Lam(e.var, new)
    if isinstance(e, Seq):
        return Seq(new, e.second) if i == 1 else Seq(e.first, new)
    if isinstance(e, Constr):
        args = list(e.args)
        args[i - 1] = new
        return Constr(e.name, tuple(args))
    if isinstance(e, Case):
        if i == 1:
            return Case(e.type, new, e.alts)
        if not isinstance(new, Alt):
            raise TypeError("a case alternative can only be replaced by an alternative")
        alts = list(e.alts)
        alts[i - 2] = new
        return Case(e.type, e.scrut, tuple(alts))
    if isinstance(e, Alt):
        return Alt(e.constr, e.vars, new)
    if isinstance(e, Letrec):
        if i == 1:
            return Letrec(e.bindings, new)
        b = list(e.bindings)
        b[i - 2] = (b[i - 2][0], new)
        return Letrec(tuple(b), e.body)
    raise IndexError("node has no children")


def replace_at(e, pos: Sequence[int], new):
    if not pos:
        return new
    return with_child(e, pos[0], replace_at(subterm(e, pos[:1]), pos[1:], new))


def positions(e) -> Iterator[Tuple[Position, object]]:
    """Preorder walk yielding ``(position, node)`` pairs."""
    stack: List[Tuple[Position, object]] = [((), e)]
    while stack:
        p, n = stack.pop()
        yield p, n
        for i, c in reversed(children(n)):
            stack.append((p + (i,), c))


def format_position(pos: Sequence[int]) -> str:
    return ".".join(map(str, pos)) if pos else "ε"


def parse_position(text: str) -> Position:
    text = text.strip()
    if text in ("", "ε", "e", "eps"):
        return ()
    try:
        out = tuple(int(t) for t in text.split("."))
    except ValueError:
        raise ValueError(f"malformed position {text!r}") from None
    if any(i < 1 for i in out):
        raise ValueError(f"malformed position {text!r}")
    return out


def _cached(e, attr, compute):
    try:
        return e.__dict__[attr]
    except KeyError:
        v = compute(e)
        object.__setattr__(e, attr, v)
        return v


def free_vars(e) -> frozenset:
    """Free variables; letrec binders scope over all right-hand sides."""
    return _cached(e, "_fv", _compute_fv)


def _compute_fv(e) -> frozenset:
    if isinstance(e, Var):
        return frozenset((e.name,))
    if isinstance(e, Lam):
        return free_vars(e.body) - {e.var}
    if isinstance(e, Alt):
        return free_vars(e.body) - set(e.vars)
    if isinstance(e, Letrec):
        fv = set(free_vars(e.body))
        for _, rhs in e.bindings:
            fv |= free_vars(rhs)
        return frozenset(fv - set(e.names))
    out = frozenset()
    for _, c in children(e):
        out |= free_vars(c)
    return out


def size(e) -> int:
    """Number of nodes (alternatives are not counted separately)."""
    return _metrics(e)[0]


def depth(e) -> int:
    return _metrics(e)[1]


def _metrics(e) -> Tuple[int, int]:
    try:
        return e.__dict__["_metrics"]
    except KeyError:
        pass
    n = 0 if isinstance(e, Alt) else 1
    d = 0
    for _, c in children(e):
        cn, cd = _metrics(c)
        n += cn
        if cd > d:
            d = cd
    v = (n, d + 1)
    object.__setattr__(e, "_metrics", v)
    return v


def _own_binders(e) -> Tuple[str, ...]:
    if isinstance(e, Lam):
        return (e.var,)
    if isinstance(e, Alt):
        return tuple(e.vars)
    if isinstance(e, Letrec):
        return tuple(e.names)
    return ()


def _binder_set(e) -> Optional[frozenset]:
    """All binders below ``e``, or ``None`` if some name is bound twice."""
    return _cached(e, "_binders", _compute_binder_set)


def _compute_binder_set(e) -> Optional[frozenset]:
    own = _own_binders(e)
    parts = [frozenset(own)]
    total = len(own)
    for _, c in children(e):
        b = _binder_set(c)
        if b is None:
            return None
        parts.append(b)
        total += len(b)
    out = frozenset().union(*parts)
    return out if len(out) == total else None


def _fresh_top(e) -> int:
    """One more than the largest ``N`` of a name ``_fN`` occurring in ``e``."""
    return _cached(e, "_freshtop", _compute_fresh_top)


def _compute_fresh_top(e) -> int:
    top = 0
    names = (e.name,) if isinstance(e, Var) else _own_binders(e)
    for n in names:
        m = _FRESH_RE.match(n)
        if m:
            top = max(top, int(m.group(1)) + 1)
    for _, c in children(e):
        top = max(top, _fresh_top(c))
    return top


def bound_names(e) -> List[str]:
    """All binder occurrences in traversal order (with repetitions)."""
    out = []
    for _, n in positions(e):
        if isinstance(n, Lam):
            out.append(n.var)
        elif isinstance(n, Alt):
            out.extend(n.vars)
        elif isinstance(n, Letrec):
            out.extend(n.names)
    return out


def all_names(e) -> set:
    return set(bound_names(e)) | set(free_vars(e))


def has_distinct_binders(e) -> bool:
    """Distinct variable convention: binders pairwise distinct and not free."""
    bs = _binder_set(e)
    return bs is not None and not (bs & free_vars(e))


def is_letrec_free(e) -> bool:
    return not _cached(e, "_hasrec", _compute_hasrec)


def _compute_hasrec(e) -> bool:
    return isinstance(e, Letrec) or any(_cached(c, "_hasrec", _compute_hasrec) for _, c in children(e))


def contains_hole(e) -> bool:
    return any(isinstance(n, Hole) for _, n in positions(e))


# ---------------------------------------------------------------------------
# Fresh names, renaming and substitution

_FRESH_RE = re.compile(r"_f(\d+)$")


class FreshNames:
    """Per-session supply of names ``_f0, _f1, ...``."""

    def __init__(self, start: int = 0):
        self.counter = start

    @classmethod
    def avoiding(cls, *exprs) -> "FreshNames":
        return cls(max((_fresh_top(e) for e in exprs), default=0))

    def __call__(self) -> str:
        n = f"_f{self.counter}"
        self.counter += 1
        return n


def freshen(e: Expr, fresh: FreshNames) -> Expr:
    """Rename every binder to a fresh name.  Positions are unchanged."""
    return _rename(e, {}, fresh)


def _rename(e, env, fresh):
    if isinstance(e, Var):
        r = env.get(e.name)
        return e if r is None else Var(r)
    if isinstance(e, Lam):
        n = fresh()
        return Lam(n, _rename(e.body, {**env, e.var: n}, fresh))
    if isinstance(e, App):
        return App(_rename(e.fun, env, fresh), _rename(e.arg, env, fresh))
    if isinstance(e, Seq):
        return Seq(_rename(e.first, env, fresh), _rename(e.second, env, fresh))
    if isinstance(e, Constr):
        if not e.args:
            return e
        return Constr(e.name, tuple(_rename(a, env, fresh) for a in e.args))
    if isinstance(e, Case):
        alts = []
        for a in e.alts:
            ns = tuple(fresh() for _ in a.vars)
            alts.append(Alt(a.constr, ns, _rename(a.body, {**env, **dict(zip(a.vars, ns))}, fresh)))
        return Case(e.type, _rename(e.scrut, env, fresh), tuple(alts))
    if isinstance(e, Letrec):
        ns = [fresh() for _ in e.bindings]
        env2 = {**env, **dict(zip(e.names, ns))}
        return Letrec(tuple((n, _rename(rhs, env2, fresh)) for n, (_, rhs) in zip(ns, e.bindings)),
                      _rename(e.body, env2, fresh))
    return e


def subst(e: Expr, pairs, fresh: Optional[FreshNames] = None, copy: bool = True) -> Expr:
    """Capture-avoiding simultaneous substitution ``e[t1/x1, ...]``.

    ``pairs`` is a mapping or a sequence of ``(name, Expr)``.  With ``copy``
    each inserted occurrence gets freshly renamed binders, so a result built
    from expressions obeying the distinct variable convention obeys it too.
    """
    mapping = dict(pairs)
    if not mapping:
        return e
    if fresh is None:
        fresh = FreshNames.avoiding(e, *mapping.values())
    repl_fv = set()
    for v in mapping.values():
        repl_fv |= free_vars(v)
    return _subst(e, mapping, repl_fv, fresh, copy)


def _subst(e, m, repl_fv, fresh, copy):
    if not m or not (free_vars(e) & m.keys()):
        return e
    if isinstance(e, Var):
        r = m[e.name]
        return freshen(r, fresh) if copy and not isinstance(r, Var) else r
    if isinstance(e, Lam):
        m2, (v,) = _enter(m, (e.var,), repl_fv, fresh)
        return Lam(v, _subst(e.body, m2, repl_fv, fresh, copy))
    if isinstance(e, App):
        return App(_subst(e.fun, m, repl_fv, fresh, copy), _subst(e.arg, m, repl_fv, fresh, copy))
    if isinstance(e, Seq):
        return Seq(_subst(e.first, m, repl_fv, fresh, copy), _subst(e.second, m, repl_fv, fresh, copy))
    if isinstance(e, Constr):
        return Constr(e.name, tuple(_subst(a, m, repl_fv, fresh, copy) for a in e.args))
    if isinstance(e, Case):
        alts = []
        for a in e.alts:
            m2, vs = _enter(m, a.vars, repl_fv, fresh)
            alts.append(Alt(a.constr, vs, _subst(a.body, m2, repl_fv, fresh, copy)))
        return Case(e.type, _subst(e.scrut, m, repl_fv, fresh, copy), tuple(alts))
    if isinstance(e, Letrec):
        m2, vs = _enter(m, e.names, repl_fv, fresh)
        return Letrec(tuple((v, _subst(rhs, m2, repl_fv, fresh, copy))
                            for v, (_, rhs) in zip(vs, e.bindings)),
                      _subst(e.body, m2, repl_fv, fresh, copy))
    return e


def _enter(m, binders, repl_fv, fresh):
    """Drop shadowed keys; rename binders that would capture."""
    m2 = {k: v for k, v in m.items() if k not in binders}
    out = []
    for b in binders:
        if b in repl_fv and m2:
            n = fresh()
            m2[b] = Var(n)
            out.append(n)
        else:
            out.append(b)
    return m2, tuple(out)


def ensure_distinct(e: Expr) -> Expr:
    """Rename binders that clash with earlier binders or free variables.

    Clashing names get primes appended, which keeps source names readable.
    """
    used = set(free_vars(e))
    taken = all_names(e)

    def pick(name):
        if name not in used:
            used.add(name)
            return name
        cand = name + "'"
        while cand in used or cand in taken:
            cand += "'"
        used.add(cand)
        return cand

    def go(e, env):
        if isinstance(e, Var):
            return Var(env.get(e.name, e.name))
        if isinstance(e, Lam):
            n = pick(e.var)
            return Lam(n, go(e.body, {**env, e.var: n}))
        if isinstance(e, Letrec):
            ns = [pick(n) for n in e.names]
            env2 = {**env, **dict(zip(e.names, ns))}
            return Letrec(tuple((n, go(rhs, env2)) for n, (_, rhs) in zip(ns, e.bindings)),
                          go(e.body, env2))
        if isinstance(e, Case):
            scrut = go(e.scrut, env)
            alts = []
            for a in e.alts:
                ns = tuple(pick(v) for v in a.vars)
                alts.append(Alt(a.constr, ns, go(a.body, {**env, **dict(zip(a.vars, ns))})))
            return Case(e.type, scrut, tuple(alts))
        if isinstance(e, App):
            return App(go(e.fun, env), go(e.arg, env))
        if isinstance(e, Seq):
            return Seq(go(e.first, env), go(e.second, env))
        if isinstance(e, Constr):
            return Constr(e.name, tuple(go(a, env) for a in e.args))
        return e

    return go(e, {})


# ---------------------------------------------------------------------------
# Canonical alpha form


def _occurrences(e, names) -> List[str]:
    """Free occurrences of ``names`` in left-to-right order (no duplicates)."""
    seen: List[str] = []
    seen_set = set()

    def go(e, shadow):
        if not (free_vars(e) & names):
            return
        if isinstance(e, Var):
            if e.name not in shadow and e.name not in seen_set:
                seen_set.add(e.name)
                seen.append(e.name)
            return
        if isinstance(e, Lam):
            go(e.body, shadow | {e.var})
        elif isinstance(e, Alt):
            go(e.body, shadow | set(e.vars))
        elif isinstance(e, Letrec):
            s2 = shadow | set(e.names)
            for _, rhs in e.bindings:
                go(rhs, s2)
            go(e.body, s2)
        else:
            for _, c in children(e):
                go(c, shadow)

    go(e, set())
    return seen


def binding_order(e: Letrec) -> List[int]:
    """Indices of ``e.bindings`` in canonical order.

    Reachable bindings come first, by first use scanning the body and then
    the right-hand sides of already ordered bindings.  Unreachable ones are
    ordered by the canonical text of their right-hand side.
    """
    names = set(e.names)
    index = {n: i for i, n in enumerate(e.names)}
    order: List[int] = []
    placed = set()

    def visit(expr):
        for n in _occurrences(expr, names):
            if n not in placed:
                placed.add(n)
                order.append(index[n])

    visit(e.body)
    k = 0
    while True:
        while k < len(order):
            visit(e.bindings[order[k]][1])
            k += 1
        if len(order) == len(e.bindings):
            break
        marker = {n: Var("#") for n in names}

        def key(i):
            rhs = subst(e.bindings[i][1], marker, copy=False)
            return (pretty(canonical(rhs)), e.bindings[i][0])

        i = min((i for i in range(len(e.bindings)) if e.bindings[i][0] not in placed), key=key)
        placed.add(e.bindings[i][0])
        order.append(i)
    return order


def canonical(e: Expr) -> Expr:
    """Canonical representative of the alpha class of ``e``.

    Binders become ``v0, v1, ...`` in leftmost-outermost order (skipping
    names free in ``e``) and letrec bindings are put in canonical order.
    Works on input that reuses binder names.
    """
    avoid = free_vars(e)
    counter = [0]

    def new():
        while True:
            n = f"v{counter[0]}"
            counter[0] += 1
            if n not in avoid:
                return n

    def go(e, env):
        if isinstance(e, Var):
            return Var(env.get(e.name, e.name))
        if isinstance(e, Lam):
            n = new()
            return Lam(n, go(e.body, {**env, e.var: n}))
        if isinstance(e, App):
            return App(go(e.fun, env), go(e.arg, env))
        if isinstance(e, Seq):
            return Seq(go(e.first, env), go(e.second, env))
        if isinstance(e, Constr):
            return Constr(e.name, tuple(go(a, env) for a in e.args)) if e.args else e
        if isinstance(e, Case):
            scrut = go(e.scrut, env)
            alts = []
            for a in e.alts:
                ns = tuple(new() for _ in a.vars)
                alts.append(Alt(a.constr, ns, go(a.body, {**env, **dict(zip(a.vars, ns))})))
            return Case(e.type, scrut, tuple(alts))
        if isinstance(e, Letrec):
            order = binding_order(e)
            ns = {e.bindings[i][0]: new() for i in order}
            env2 = {**env, **ns}
            bs = tuple((ns[e.bindings[i][0]], go(e.bindings[i][1], env2)) for i in order)
            return Letrec(bs, go(e.body, env2))
        return e

    return go(e, {})


def alpha_eq(a: Expr, b: Expr) -> bool:
    """Equality up to renaming of bound variables and letrec binding order."""
    return canonical(a) == canonical(b)


def reachable_bindings(e: Letrec) -> List[int]:
    """Indices of bindings reachable from the body, in binding order."""
    names = set(e.names)
    index = {n: i for i, n in enumerate(e.names)}
    todo = list(free_vars(e.body) & names)
    seen = set(todo)
    while todo:
        for n in free_vars(e.bindings[index[todo.pop()]][1]) & names:
            if n not in seen:
                seen.add(n)
                todo.append(n)
    return [i for i, n in enumerate(e.names) if n in seen]


def collect_garbage(e: Expr) -> Expr:
    """Drop every letrec binding unreachable from its body, everywhere in
    ``e``; a letrec left with no bindings is replaced by its body."""
    return _cached(e, "_gc", _compute_gc)


def _compute_gc(e):
    if is_letrec_free(e):
        return e
    if isinstance(e, Letrec):
        keep = reachable_bindings(e)
        body = collect_garbage(e.body)
        if not keep:
            return body
        return Letrec(tuple((e.bindings[i][0], collect_garbage(e.bindings[i][1])) for i in keep), body)
    out = e
    for i, c in children(e):
        c2 = collect_garbage(c)
        if c2 is not c:
            out = with_child(out, i, c2)
    return out


# ---------------------------------------------------------------------------
# Contexts


@dataclass(frozen=True)
class Context:
    """An expression with exactly one hole."""

    expr: Expr

    def __post_init__(self):
        holes = [p for p, n in positions(self.expr) if isinstance(n, Hole)]
        if len(holes) != 1:
            raise ValueError(f"a context needs exactly one hole, found {len(holes)}")
        object.__setattr__(self, "hole_position", holes[0])

    def __str__(self):
        return pretty(self.expr)


IDENTITY = Context(HOLE)


def fill(c: Context, e: Expr) -> Expr:
    """Plug ``e`` into the hole; free variables of ``e`` may get captured."""
    return replace_at(c.expr, c.hole_position, e)


def compose(outer: Context, inner: Context) -> Context:
    return Context(fill(outer, inner.expr))


# ---------------------------------------------------------------------------
# Small term builders


def lams(names: Iterable[str], body: Expr) -> Expr:
    for n in reversed(list(names)):
        body = Lam(n, body)
    return body


def apps(f: Expr, args: Iterable[Expr]) -> Expr:
    for a in args:
        f = App(f, a)
    return f


def omega() -> Expr:
    """The canonical diverging term ``(\\z. z z) (\\x. x x)``."""
    return App(Lam("z", App(Var("z"), Var("z"))), Lam("x", App(Var("x"), Var("x"))))


def is_omega(e: Expr) -> bool:
    """Literal match (up to renaming) with ``(\\z. z z) (\\x. x x)``."""
    if not (isinstance(e, App) and isinstance(e.fun, Lam) and isinstance(e.arg, Lam)):
        return False
    return all(_is_self_app(l) for l in (e.fun, e.arg))


def _is_self_app(l: Lam) -> bool:
    b = l.body
    return (isinstance(b, App) and isinstance(b.fun, Var) and isinstance(b.arg, Var)
            and b.fun.name == l.var == b.arg.name)


# ---------------------------------------------------------------------------
# Printing


def pretty(e) -> str:
    """Concrete syntax accepted by :func:`parse`."""
    out: List[str] = []
    _pp(e, 0, out)
    return "".join(out)


def _pp(e, prec, out):
    # prec 0: anything; 1: function position; 2: argument position
    if isinstance(e, Var):
        out.append(e.name)
    elif isinstance(e, Hole):
        out.append("[.]")
    elif isinstance(e, Bot):
        out.append("Bot")
    elif isinstance(e, Constr) and not e.args:
        out.append(e.name)
    elif isinstance(e, (App, Seq, Constr)):
        if prec > 1:
            out.append("(")
        if isinstance(e, App):
            _pp(e.fun, 1, out)
            out.append(" ")
            _pp(e.arg, 2, out)
        else:
            out.append("seq" if isinstance(e, Seq) else e.name)
            for _, c in children(e):
                out.append(" ")
                _pp(c, 2, out)
        if prec > 1:
            out.append(")")
    else:
        if prec > 0:
            out.append("(")
        if isinstance(e, Lam):
            out.append(f"\\{e.var}. ")
            _pp(e.body, 0, out)
        elif isinstance(e, Letrec):
            out.append("letrec ")
            for i, (n, rhs) in enumerate(e.bindings):
                if i:
                    out.append(", ")
                out.append(f"{n} = ")
                _pp(rhs, 0, out)
            out.append(" in ")
            _pp(e.body, 0, out)
        elif isinstance(e, Case):
            out.append(f"case {e.type} ")
            _pp(e.scrut, 0, out)
            out.append(" of { ")
            for i, a in enumerate(e.alts):
                if i:
                    out.append(" ; ")
                out.append(" ".join((a.constr,) + a.vars) + " -> ")
                _pp(a.body, 0, out)
            out.append(" }")
        else:
            raise TypeError(f"not an expression: {e!r}")
        if prec > 0:
            out.append(")")


def pretty_canonical(e: Expr) -> str:
    return pretty(canonical(e))
