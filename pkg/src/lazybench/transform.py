"""Program transformations on letrec expressions.

Every reduction rule of the call-by-need calculus is available as an
unrestricted transformation (any context, any position), together with
garbage collection, letrec shifting out of argument positions and the
general copy rule.  ``at`` always names a node of the input:

* lbeta, lapp, lcase, lseq, seq-c, case-c, seq-in/e, case-in/e: the
  application, case or seq node being rewritten;
* cp-in, cp-e, gcp: the variable occurrence that receives the copy;
* llet-in: the outer letrec; llet-e, lwas-*: the inner letrec;
* gc, gc2: the letrec whose bindings are dropped.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Dict, Iterator, List, Optional, Sequence, Tuple

from .syntax import (App, Case, Constr, Expr, FreshNames, Lam, Letrec, Position, Seq, Var,
                     Alt, canonical, free_vars, freshen, has_distinct_binders,
                     positions, replace_at, subterm, with_child)


class NoMatch(ValueError):
    """The rule's left-hand side or side condition does not hold."""


@dataclass(frozen=True)
class Rule:
    name: str
    rewrite: Callable[[Expr, Position, FreshNames], Expr]

    def apply(self, e: Expr, at: Position, fresh: Optional[FreshNames] = None) -> Expr:
        return self.rewrite(e, tuple(at), fresh or FreshNames.avoiding(e))

    def instances(self, e: Expr, fresh: Optional[FreshNames] = None) -> Iterator[Tuple[Position, Expr]]:
        """All ``(position, result)`` pairs where the rule applies."""
        fresh = fresh or FreshNames.avoiding(e)
        for p, n in positions(e):
            if not isinstance(n, Expr):
                continue
            try:
                yield p, self.rewrite(e, p, fresh)
            except NoMatch:
                pass


def _node(e, p):
    try:
        return subterm(e, p)
    except IndexError:
        raise NoMatch(f"no node at position {p}") from None


def _parent(e, p):
    if not p:
        raise NoMatch("the root has no parent")
    return _node(e, p[:-1]), p[-1]


# -- structural rules -------------------------------------------------------

def _lbeta(e, p, fresh):
    n = _node(e, p)
    if not (isinstance(n, App) and isinstance(n.fun, Lam)):
        raise NoMatch("not an applied abstraction")
    return replace_at(e, p, Letrec(((n.fun.var, n.arg),), n.fun.body))


def _lift(kind):
    def rw(e, p, fresh):
        n = _node(e, p)
        if kind == "lapp" and isinstance(n, App) and isinstance(n.fun, Letrec):
            return replace_at(e, p, Letrec(n.fun.bindings, App(n.fun.body, n.arg)))
        if kind == "lseq" and isinstance(n, Seq) and isinstance(n.first, Letrec):
            return replace_at(e, p, Letrec(n.first.bindings, Seq(n.first.body, n.second)))
        if kind == "lcase" and isinstance(n, Case) and isinstance(n.scrut, Letrec):
            return replace_at(e, p, Letrec(n.scrut.bindings, Case(n.type, n.scrut.body, n.alts)))
        raise NoMatch(f"{kind}: no letrec in the evaluated position")
    return rw


def _llet_in(e, p, fresh):
    n = _node(e, p)
    if not (isinstance(n, Letrec) and isinstance(n.body, Letrec)):
        raise NoMatch("llet-in: body is not a letrec")
    return replace_at(e, p, Letrec(n.bindings + n.body.bindings, n.body.body))


def _llet_e(e, p, fresh):
    n = _node(e, p)
    parent, i = _parent(e, p)
    if not (isinstance(n, Letrec) and isinstance(parent, Letrec) and i >= 2):
        raise NoMatch("llet-e: not a letrec bound by a letrec")
    x = parent.bindings[i - 2][0]
    bindings = []
    for name, rhs in parent.bindings:
        bindings.append((name, n.body if name == x else rhs))
        if name == x:
            bindings.extend(n.bindings)
    return replace_at(e, p[:-1], Letrec(tuple(bindings), parent.body))


def _is_value(v):
    return isinstance(v, (Lam, Constr))


def _seq_c(e, p, fresh):
    n = _node(e, p)
    if not (isinstance(n, Seq) and _is_value(n.first)):
        raise NoMatch("seq-c: first argument is not a value")
    return replace_at(e, p, n.second)


def _case_c(e, p, fresh):
    n = _node(e, p)
    if not (isinstance(n, Case) and isinstance(n.scrut, Constr)):
        raise NoMatch("case-c: scrutinee is not a constructor application")
    alt = n.alt_for(n.scrut.name)
    if alt is None:
        raise NoMatch("case-c: constructor of the wrong type")
    rhs = Letrec(tuple(zip(alt.vars, n.scrut.args)), alt.body) if n.scrut.args else alt.body
    return replace_at(e, p, rhs)


# -- rules that follow a variable to its binding ----------------------------

def _binding_site(e, p):
    """For the variable at ``p``: the position of its binding letrec and the
    child index through which ``p`` is reached (1 = body)."""
    n = _node(e, p)
    if not isinstance(n, Var):
        raise NoMatch("not a variable occurrence")
    site = None
    cur = e
    for k, i in enumerate(p):
        if isinstance(cur, Letrec) and n.name in cur.names:
            site = (p[:k], i)
        elif isinstance(cur, Lam) and cur.var == n.name:
            site = None
        elif isinstance(cur, Alt) and n.name in cur.vars:
            site = None
        cur = subterm(cur, (i,))
    if site is None:
        raise NoMatch(f"{n.name} is not bound by a letrec")
    return site


def _chain(letrec: Letrec, x: str):
    """Follow ``x = y, y = z, ...`` inside one environment.  Returns the chain
    (from ``x``) and the final right-hand side."""
    env = dict(letrec.bindings)
    chain = [x]
    cur = env[x]
    while isinstance(cur, Var) and cur.name in env:
        if cur.name in chain:
            raise NoMatch("cyclic variable chain")
        chain.append(cur.name)
        cur = env[cur.name]
    return chain, cur


def _chain_target(e, occ, side):
    q, i = _binding_site(e, occ)
    letrec = subterm(e, q)
    chain, v = _chain(letrec, subterm(e, occ).name)
    if side == "in" and i != 1:
        raise NoMatch("occurrence is not in the letrec body")
    if side == "e":
        if i == 1:
            raise NoMatch("occurrence is in the letrec body")
        if letrec.bindings[i - 2][0] in chain:
            raise NoMatch("occurrence is inside the variable chain")
    return q, letrec, chain, v


def _cp(side):
    def rw(e, p, fresh):
        _, _, _, v = _chain_target(e, p, side)
        if not isinstance(v, Lam):
            raise NoMatch("cp: chain does not end in an abstraction")
        return replace_at(e, p, freshen(v, fresh))
    return rw


def _seq_x(side):
    def rw(e, p, fresh):
        n = _node(e, p)
        if not (isinstance(n, Seq) and isinstance(n.first, Var)):
            raise NoMatch("seq: first argument is not a variable")
        _, _, _, v = _chain_target(e, p + (1,), side)
        if not isinstance(v, Constr):
            raise NoMatch("seq: chain does not end in a constructor application")
        return replace_at(e, p, n.second)
    return rw


def _case_x(side):
    def rw(e, p, fresh):
        n = _node(e, p)
        if not (isinstance(n, Case) and isinstance(n.scrut, Var)):
            raise NoMatch("case: scrutinee is not a variable")
        q, _, chain, v = _chain_target(e, p + (1,), side)
        if not isinstance(v, Constr):
            raise NoMatch("case: chain does not end in a constructor application")
        alt = n.alt_for(v.name)
        if alt is None:
            raise NoMatch("case: constructor of the wrong type")
        if not v.args:
            return replace_at(e, p, alt.body)
        ys = tuple(fresh() for _ in v.args)
        e2 = replace_at(e, p, Letrec(tuple((z, Var(y)) for z, y in zip(alt.vars, ys)), alt.body))
        letrec = subterm(e2, q)
        x1 = chain[-1]
        bindings = []
        for name, rhs in letrec.bindings:
            if name == x1:
                bindings.append((name, Constr(v.name, tuple(Var(y) for y in ys))))
                bindings.extend(zip(ys, v.args))
            else:
                bindings.append((name, rhs))
        return replace_at(e2, q, Letrec(tuple(bindings), letrec.body))
    return rw


def _gcp(e, p, fresh):
    q, i = _binding_site(e, p)
    if i != 1:
        raise NoMatch("gcp: occurrence is not in the letrec body")
    letrec = subterm(e, q)
    return replace_at(e, p, freshen(dict(letrec.bindings)[subterm(e, p).name], fresh))


# -- garbage collection and letrec shifting ---------------------------------

def _gc(e, p, fresh):
    n = _node(e, p)
    if not isinstance(n, Letrec):
        raise NoMatch("gc: not a letrec")
    if free_vars(n.body) & set(n.names):
        raise NoMatch("gc: the body uses a bound variable (FV(t) ∩ {x1..xn} ≠ ∅)")
    return replace_at(e, p, n.body)


def _reachable(n: Letrec):
    env = dict(n.bindings)
    todo = [x for x in free_vars(n.body) if x in env]
    seen = set(todo)
    while todo:
        for y in free_vars(env[todo.pop()]):
            if y in env and y not in seen:
                seen.add(y)
                todo.append(y)
    return seen


def _gc2(e, p, fresh):
    n = _node(e, p)
    if not isinstance(n, Letrec):
        raise NoMatch("gc: not a letrec")
    keep = _reachable(n)
    if not keep or len(keep) == len(n.bindings):
        raise NoMatch("gc2: no proper subset of bindings is unused")
    return replace_at(e, p, Letrec(tuple(b for b in n.bindings if b[0] in keep), n.body))


def _lwas(kind):
    def rw(e, p, fresh):
        n = _node(e, p)
        parent, i = _parent(e, p)
        if not isinstance(n, Letrec):
            raise NoMatch("lwas: not a letrec")
        ok = ((kind == "app" and isinstance(parent, App) and i == 2)
              or (kind == "seq" and isinstance(parent, Seq) and i == 2)
              or (kind == "constr" and isinstance(parent, Constr)))
        if not ok:
            raise NoMatch(f"lwas-{kind}: letrec is not in an argument position")
        return replace_at(e, p[:-1], Letrec(n.bindings, with_child(parent, i, n.body)))
    return rw


RULES: Dict[str, Rule] = {r.name: r for r in [
    Rule("lbeta", _lbeta),
    Rule("cp-in", _cp("in")),
    Rule("cp-e", _cp("e")),
    Rule("lapp", _lift("lapp")),
    Rule("lcase", _lift("lcase")),
    Rule("lseq", _lift("lseq")),
    Rule("llet-in", _llet_in),
    Rule("llet-e", _llet_e),
    Rule("seq-c", _seq_c),
    Rule("seq-in", _seq_x("in")),
    Rule("seq-e", _seq_x("e")),
    Rule("case-c", _case_c),
    Rule("case-in", _case_x("in")),
    Rule("case-e", _case_x("e")),
    Rule("gc", _gc),
    Rule("gc2", _gc2),
    Rule("lwas-app", _lwas("app")),
    Rule("lwas-constr", _lwas("constr")),
    Rule("lwas-seq", _lwas("seq")),
    Rule("gcp", _gcp),
]}

CORE_RULES = ("lbeta", "cp-in", "cp-e", "lapp", "lcase", "lseq", "llet-in", "llet-e",
              "seq-c", "seq-in", "seq-e", "case-c", "case-in", "case-e")

FAMILIES = {
    "gc": ("gc", "gc2"),
    "lwas": ("lwas-app", "lwas-constr", "lwas-seq"),
    "cp": ("cp-in", "cp-e"),
    "llet": ("llet-in", "llet-e"),
    "lll": ("llet-in", "llet-e", "lapp", "lcase", "lseq"),
    "seq": ("seq-c", "seq-in", "seq-e"),
    "case": ("case-c", "case-in", "case-e"),
    "lr": CORE_RULES,
    "all": tuple(RULES),
}


def resolve_rules(name) -> List[Rule]:
    """A rule, a registered rule name, or a family name to a list of rules."""
    if isinstance(name, Rule):
        return [name]
    if name in RULES:
        return [RULES[name]]
    if name in FAMILIES:
        return [RULES[n] for n in FAMILIES[name]]
    raise KeyError(f"unknown rule {name!r}; known: {', '.join(list(RULES) + list(FAMILIES))}")


def apply_transformation_lr(rule, e: Expr, at: Sequence[int]) -> Expr:
    """Rewrite ``e`` at ``at`` and return the canonical form of the result.

    Raises :class:`NoMatch` naming the failed condition.
    """
    rules = resolve_rules(rule)
    if len(rules) != 1:
        raise KeyError(f"{rule!r} names a family; pick one rule")
    fresh = FreshNames.avoiding(e)
    if not has_distinct_binders(e):
        e = freshen(e, fresh)
    return canonical(rules[0].apply(e, at, fresh))


__all__ = ["Rule", "RULES", "FAMILIES", "CORE_RULES", "NoMatch", "resolve_rules",
           "apply_transformation_lr"]
