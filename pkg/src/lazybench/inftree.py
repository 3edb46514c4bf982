"""Infinite trees: the letrec-unfolding of an expression, computed lazily.

Two independent views are provided.  :func:`it_label` computes the label
at one position by rewriting the position through the expression, with
``Bot`` for a cyclic chain of let-bound variables.  :func:`tree_of` returns
a handle that expands on demand and also supports normal-order tree
reduction, where beta and case substitute lazily through an environment.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from .syntax import (Alt, App, Case, Constr, Expr, FreshNames, Lam, Letrec, Position, Seq,
                     Var, format_position, freshen, has_distinct_binders, is_omega)


@dataclass(frozen=True)
class TreeLabel:
    """``kind`` is one of ``@ lam var con seq case alt bot``."""

    kind: str
    name: str = ""
    binders: Tuple[str, ...] = ()

    def __str__(self):
        if self.kind == "lam":
            return "λ" + self.name
        if self.kind == "case":
            return "case_" + self.name
        if self.kind == "alt":
            return "(" + " ".join((self.name,) + self.binders) + ")"
        if self.kind == "bot":
            return "Bot"
        if self.kind in ("var", "con"):
            return self.name
        return self.kind

    @property
    def arity(self) -> int:
        return {"@": 2, "seq": 2, "lam": 1, "alt": 1}.get(self.kind, 0)


APP_L = TreeLabel("@")
SEQ_L = TreeLabel("seq")
BOT_L = TreeLabel("bot")


def _dvc(s: Expr) -> Expr:
    return s if has_distinct_binders(s) else freshen(s, FreshNames.avoiding(s))


def _letmap(s: Expr) -> Dict[str, Expr]:
    from .syntax import positions
    m = {}
    for _, n in positions(s):
        if isinstance(n, Letrec):
            m.update(n.bindings)
    return m


def _node_label(n) -> TreeLabel:
    if isinstance(n, App):
        return APP_L
    if isinstance(n, Seq):
        return SEQ_L
    if isinstance(n, Lam):
        return TreeLabel("lam", n.var)
    if isinstance(n, Constr):
        return TreeLabel("con", n.name)
    if isinstance(n, Case):
        return TreeLabel("case", n.type)
    if isinstance(n, Alt):
        return TreeLabel("alt", n.constr, n.vars)
    if isinstance(n, Var):
        return TreeLabel("var", n.name)
    raise TypeError(n)


def _child(n, i):
    if isinstance(n, (App, Seq)) and i in (1, 2):
        return (n.fun, n.arg)[i - 1] if isinstance(n, App) else (n.first, n.second)[i - 1]
    if isinstance(n, (Lam, Alt)) and i == 1:
        return n.body
    if isinstance(n, Constr) and 1 <= i <= len(n.args):
        return n.args[i - 1]
    if isinstance(n, Case):
        if i == 1:
            return n.scrut
        if 2 <= i <= len(n.alts) + 1:
            return n.alts[i - 2]
    return None


# ---------------------------------------------------------------------------
# Position oracle


def it_label(s: Expr, p: Position) -> Optional[TreeLabel]:
    """Label of the unfolded tree of ``s`` at ``p``; ``None`` if undefined.

    Letrec is transparent and a let-bound variable continues at its
    right-hand side.  Meeting the same variable twice before the next
    position index is consumed is a cycle: at the end of the position the
    label is Bot, in the middle of it the position is invalid.
    """
    s = _dvc(s)
    lets = _letmap(s)
    node, rest, seen = s, list(p), set()
    while True:
        if isinstance(node, Letrec):
            node = node.body
            continue
        if isinstance(node, Var) and node.name in lets:
            if node.name in seen:
                return BOT_L if not rest else None
            seen.add(node.name)
            node = lets[node.name]
            continue
        if not rest:
            return _node_label(node)
        node = _child(node, rest.pop(0))
        seen.clear()
        if node is None:
            return None


# ---------------------------------------------------------------------------
# Lazy handles


class TreeHandle:
    """A node of an infinite tree; ``head`` and ``child`` expand lazily."""

    def resolve(self) -> "TreeHandle":
        return self

    @property
    def head(self) -> TreeLabel:
        return self.resolve()._head()

    def child(self, i: int) -> Optional["TreeHandle"]:
        return self.resolve()._child(i)

    def arity(self) -> int:
        h = self.resolve()
        return h._arity()

    def children(self) -> List["TreeHandle"]:
        return [self.child(i) for i in range(1, self.arity() + 1)]


class _BotHandle(TreeHandle):
    def _head(self):
        return BOT_L

    def _child(self, i):
        return None

    def _arity(self):
        return 0

    def __repr__(self):
        return "Bot"


BOT_HANDLE = _BotHandle()


class Closure(TreeHandle):
    """Expression node ``node`` under ``env`` (lambda/pattern variables to
    handles); let-bound names resolve through the shared ``lets`` map."""

    __slots__ = ("node", "env", "lets", "_resolved")

    def __init__(self, node, env, lets):
        self.node = node
        self.env = env
        self.lets = lets
        self._resolved = None

    def resolve(self):
        if self._resolved is None:
            self._resolved = self._compute()
        return self._resolved

    def _compute(self):
        h, seen, alive = self, set(), []
        while isinstance(h, Closure):
            n = h.node
            if isinstance(n, Letrec):
                h = Closure(n.body, h.env, h.lets)
            elif isinstance(n, Var):
                if n.name in h.env:
                    h = h.env[n.name]
                elif n.name in h.lets:
                    key = (n.name, id(h.env))
                    if key in seen:
                        return BOT_HANDLE
                    seen.add(key)
                    alive.append(h.env)  # keep ids stable while we loop
                    h = Closure(h.lets[n.name], h.env, h.lets)
                else:
                    return h
            else:
                return h
            if isinstance(h, Closure) and h._resolved is not None:
                return h._resolved
        return h.resolve()

    def _head(self):
        return _node_label(self.node)

    def _arity(self):
        n = self.node
        if isinstance(n, Constr):
            return len(n.args)
        if isinstance(n, Case):
            return len(n.alts) + 1
        return _node_label(n).arity

    def _child(self, i):
        n = self.node
        c = _child(n, i)
        if c is None:
            return None
        env = self.env
        if isinstance(n, Lam) and n.var in env:
            env = {k: v for k, v in env.items() if k != n.var}
        elif isinstance(n, Alt) and set(n.vars) & env.keys():
            env = {k: v for k, v in env.items() if k not in n.vars}
        return Closure(c, env, self.lets)

    def __repr__(self):
        return f"Closure({self.node!s})"


class Built(TreeHandle):
    """A node with explicit label and children (made by tree reduction)."""

    __slots__ = ("label", "kids")

    def __init__(self, label: TreeLabel, kids):
        self.label = label
        self.kids = tuple(kids)

    def _head(self):
        return self.label

    def _arity(self):
        return len(self.kids)

    def _child(self, i):
        return self.kids[i - 1] if 1 <= i <= len(self.kids) else None


def tree_of(s: Expr) -> TreeHandle:
    s = _dvc(s)
    return Closure(s, {}, _letmap(s))


def label_at(t: TreeHandle, p: Position) -> Optional[TreeLabel]:
    for i in p:
        t = t.child(i)
        if t is None:
            return None
    return t.head


@dataclass
class TreePrefix:
    labels: Dict[Position, TreeLabel]
    depth: int

    def __str__(self):
        return "\n".join(f"{format_position(p)}: {l}" for p, l in sorted(
            self.labels.items(), key=lambda kv: (len(kv[0]), kv[0])))


def prefix(t: TreeHandle, d: int) -> TreePrefix:
    """All labels at positions of length at most ``d``."""
    if d < 0:
        raise ValueError("depth must be nonnegative")
    out = {}
    stack = [((), t)]
    while stack:
        p, h = stack.pop()
        out[p] = h.head
        if len(p) < d:
            for i in range(1, h.arity() + 1):
                stack.append((p + (i,), h.child(i)))
    return TreePrefix(out, d)


def trees_eq_upto(a: TreeHandle, b: TreeHandle, d: int) -> bool:
    """Prefix equality up to consistent renaming of binders along paths."""
    stack = [(a, b, d, {}, {})]
    while stack:
        x, y, k, ab, ba = stack.pop()
        lx, ly = x.head, y.head
        if lx.kind != ly.kind:
            return False
        if lx.kind == "var":
            if lx.name in ab or ly.name in ba:
                if ab.get(lx.name) != ly.name or ba.get(ly.name) != lx.name:
                    return False
            elif lx.name != ly.name:
                return False
        elif lx.kind == "lam" or lx.kind == "alt":
            if lx.kind == "alt" and (lx.name != ly.name or len(lx.binders) != len(ly.binders)):
                return False
            bx = (lx.name,) if lx.kind == "lam" else lx.binders
            by = (ly.name,) if ly.kind == "lam" else ly.binders
            ab, ba = dict(ab), dict(ba)
            for u, v in zip(bx, by):
                # drop stale pairings that the new binders shadow
                if u in ab:
                    ba.pop(ab.pop(u), None)
                if v in ba:
                    ab.pop(ba.pop(v), None)
                ab[u], ba[v] = v, u
        elif lx != ly:
            return False
        if k == 0:
            continue
        n = x.arity()
        if n != y.arity():
            return False
        for i in range(1, n + 1):
            stack.append((x.child(i), y.child(i), k - 1, ab, ba))
    return True


def tree_eq_upto(a: Expr, b: Expr, d: int) -> bool:
    return trees_eq_upto(tree_of(a), tree_of(b), d)


# ---------------------------------------------------------------------------
# Tree reduction


@dataclass(frozen=True)
class TreeReduced:
    tree: TreeHandle
    rule: str
    depth: int


@dataclass(frozen=True)
class TreeAnswer:
    kind: str


@dataclass(frozen=True)
class NoRedexFound:
    reason: str


@dataclass(frozen=True)
class DescentLimit:
    depth: int


@dataclass(frozen=True)
class OmegaRedex:
    """The normal-order redex is the literal term Ω, so the tree diverges."""

    depth: int


def tree_step(t: TreeHandle, descent_limit: int = 2_000):
    """One normal-order step on a tree."""
    path: List[TreeHandle] = []
    cur = t.resolve()
    while True:
        lab = cur.head
        if lab.kind in ("@", "seq", "case"):
            if len(path) >= descent_limit:
                return DescentLimit(len(path))
            path.append(cur)
            cur = cur.child(1).resolve()
            continue
        break
    if not path:
        if lab.kind == "lam":
            return TreeAnswer("AWHNF")
        if lab.kind == "con":
            return TreeAnswer("CWHNF")
        return NoRedexFound("Bot" if lab.kind == "bot" else f"free variable {lab.name}")
    parent = path[-1]
    plab = parent.head
    if lab.kind == "bot":
        return NoRedexFound("Bot in reduction position")
    if isinstance(parent, Closure) and is_omega(parent.node) and lab.kind == "lam":
        return OmegaRedex(len(path) - 1)
    if plab.kind == "@" and lab.kind == "lam":
        arg = parent.child(2)
        new = Closure(cur.node.body, {**cur.env, cur.node.var: arg}, cur.lets)
        rule = "betaTr"
    elif plab.kind == "seq" and lab.kind in ("lam", "con"):
        new, rule = parent.child(2), "seqTr"
    elif plab.kind == "case" and lab.kind == "con":
        alt = None
        for i in range(2, parent.arity() + 1):
            h = parent.child(i).resolve()
            if h.head.name == lab.name:
                alt = h
                break
        if alt is None:
            return NoRedexFound(f"constructor {lab.name} in case over {plab.name}")
        env = dict(alt.env)
        for k, v in enumerate(alt.node.vars):
            env[v] = cur.child(k + 1)
        new, rule = Closure(alt.node.body, env, alt.lets), "caseTr"
    else:
        return NoRedexFound(f"{lab} in position of {plab}")
    for h in reversed(path[:-1]):
        kids = [new] + [h.child(i) for i in range(2, h.arity() + 1)]
        new = Built(h.head, kids)
    return TreeReduced(new, rule, len(path) - 1)


@dataclass(frozen=True)
class TreeOutcome:
    converged: bool
    reason: str
    steps: int
    tree: Optional[TreeHandle] = None

    @property
    def definitive(self) -> bool:
        return self.converged or self.reason in ("no-redex", "omega")

    def __str__(self):
        return ("Converged" if self.converged else "Exhausted") + f"({self.reason}, {self.steps} steps)"


def tree_converges(s: Expr, step_budget: int = 10_000, descent_limit: int = 2_000) -> TreeOutcome:
    """Iterate :func:`tree_step` from the tree of ``s``.

    The result is ``Converged`` or ``Exhausted``; ``reason`` says why
    (``answer``, ``budget``, ``descent-limit``, ``no-redex`` or ``omega``).
    ``no-redex`` and ``omega`` are certain non-convergence.
    """
    t = tree_of(s)
    for n in range(step_budget + 1):
        r = tree_step(t, descent_limit)
        if isinstance(r, TreeAnswer):
            return TreeOutcome(True, "answer", n, t)
        if isinstance(r, NoRedexFound):
            return TreeOutcome(False, "no-redex", n, t)
        if isinstance(r, OmegaRedex):
            return TreeOutcome(False, "omega", n, t)
        if isinstance(r, DescentLimit):
            return TreeOutcome(False, "descent-limit", n, t)
        if n == step_budget:
            break
        t = r.tree
    return TreeOutcome(False, "budget", step_budget, t)


__all__ = ["TreeLabel", "TreeHandle", "TreePrefix", "it_label", "tree_of", "prefix",
           "label_at", "tree_eq_upto", "trees_eq_upto", "tree_step", "tree_converges",
           "TreeReduced", "TreeAnswer", "NoRedexFound", "DescentLimit", "OmegaRedex",
           "TreeOutcome", "BOT_L"]
