"""Call-by-name calculus on the letrec syntax: bindings are copied on demand
(gcp) and beta substitutes, so nothing is shared."""

from __future__ import annotations

from typing import Optional

from .outcomes import (AWHNF, CWHNF, S, T, V, Labeling, Reduced, StepStuck, Whnf, run)
from .syntax import (App, Case, Constr, Expr, FreshNames, Lam, Letrec, Seq, Var,
                     freshen, replace_at, subst, subterm)

RULES = ("beta", "gcp", "lapp", "lcase", "lseq", "seq-c", "case")


def label_name(e: Expr) -> Labeling:
    """Descend through top-level letrec bodies (label T), then through
    function, seq-first and scrutinee positions (label S).  Never fails."""
    labels = {}
    env = {}
    pos, cur, in_a = [], e, False
    while True:
        if isinstance(cur, Letrec) and not in_a:
            labels[tuple(pos)] = V
            env.update(cur.bindings)
            pos.append(1)
            cur = cur.body
        elif isinstance(cur, (App, Seq, Case)):
            labels[tuple(pos)] = V
            in_a = True
            pos.append(1)
            cur = cur.fun if isinstance(cur, App) else cur.first if isinstance(cur, Seq) else cur.scrut
        else:
            pos = tuple(pos)
            labels[pos] = S if in_a else T
            return Labeling(labels, pos, cur, [], env)


def step_name(e: Expr, fresh: Optional[FreshNames] = None):
    fresh = fresh or FreshNames.avoiding(e)
    lab = label_name(e)
    p, node = lab.focus, lab.node
    if isinstance(node, Var):
        if node.name in lab.env:
            return Reduced(replace_at(e, p, freshen(lab.env[node.name], fresh)), "gcp", p)
        return StepStuck(f"free variable {node.name}")
    if lab.labels[p] == T:
        if isinstance(node, Lam):
            return Whnf(AWHNF)
        if isinstance(node, Constr):
            return Whnf(CWHNF)
        return StepStuck("no rule")
    pp = p[:-1]
    parent = subterm(e, pp)
    if isinstance(node, Lam):
        if isinstance(parent, App):
            return Reduced(replace_at(e, pp, subst(node.body, {node.var: parent.arg}, fresh)), "beta", pp)
        if isinstance(parent, Seq):
            return Reduced(replace_at(e, pp, parent.second), "seq-c", pp)
        return StepStuck("abstraction in case scrutinee")
    if isinstance(node, Constr):
        if isinstance(parent, Seq):
            return Reduced(replace_at(e, pp, parent.second), "seq-c", pp)
        if isinstance(parent, Case):
            alt = parent.alt_for(node.name)
            if alt is None:
                return StepStuck(f"constructor {node.name} in case over {parent.type}")
            return Reduced(replace_at(e, pp, subst(alt.body, zip(alt.vars, node.args), fresh)), "case", pp)
        return StepStuck(f"constructor {node.name} applied to an argument")
    if isinstance(node, Letrec):
        if isinstance(parent, App):
            rule, inner = "lapp", App(node.body, parent.arg)
        elif isinstance(parent, Seq):
            rule, inner = "lseq", Seq(node.body, parent.second)
        else:
            rule, inner = "lcase", Case(parent.type, node.body, parent.alts)
        return Reduced(replace_at(e, pp, Letrec(node.bindings, inner)), rule, pp)
    return StepStuck("no rule")


def is_name_whnf(e: Expr) -> Optional[str]:
    while isinstance(e, Letrec):
        e = e.body
    return AWHNF if isinstance(e, Lam) else CWHNF if isinstance(e, Constr) else None


def evaluate_name(e: Expr, max_steps: int = 10_000, **kw):
    return run(step_name, e, max_steps, **kw)


__all__ = ["label_name", "step_name", "evaluate_name", "is_name_whnf", "RULES"]
