"""The letrec-free lazy lambda calculus with constructors, case and seq."""

from __future__ import annotations

from typing import Optional

from .outcomes import AWHNF, CWHNF, Reduced, StepStuck, Whnf, run
from .syntax import (App, Case, Constr, Expr, FreshNames, Lam, Letrec, Seq, Var,
                     is_letrec_free, replace_at, subst, subterm)

RULES = ("nbeta", "ncase", "nseq")


class LetrecNotAllowed(ValueError):
    pass


def _check(e: Expr):
    if not is_letrec_free(e):
        raise LetrecNotAllowed("the letrec-free calculus does not accept letrec")


def _step(e: Expr, fresh: FreshNames):
    pos, cur = [], e
    while isinstance(cur, (App, Seq, Case)):
        pos.append(1)
        cur = cur.fun if isinstance(cur, App) else cur.first if isinstance(cur, Seq) else cur.scrut
    if not pos:
        if isinstance(cur, Lam):
            return Whnf(AWHNF)
        if isinstance(cur, Constr):
            return Whnf(CWHNF)
    if isinstance(cur, Var):
        return StepStuck(f"free variable {cur.name}")
    pp = tuple(pos[:-1])
    parent = subterm(e, pp)
    if isinstance(parent, Seq):
        return Reduced(replace_at(e, pp, parent.second), "nseq", pp)
    if isinstance(cur, Lam):
        if isinstance(parent, App):
            return Reduced(replace_at(e, pp, subst(cur.body, {cur.var: parent.arg}, fresh)), "nbeta", pp)
        return StepStuck("abstraction in case scrutinee")
    if isinstance(cur, Constr) and isinstance(parent, Case):
        alt = parent.alt_for(cur.name)
        if alt is None:
            return StepStuck(f"constructor {cur.name} in case over {parent.type}")
        return Reduced(replace_at(e, pp, subst(alt.body, zip(alt.vars, cur.args), fresh)), "ncase", pp)
    return StepStuck(f"constructor {cur.name} applied to an argument")


def step_lcc(e: Expr, fresh: Optional[FreshNames] = None):
    _check(e)
    return _step(e, fresh or FreshNames.avoiding(e))


def is_lcc_whnf(e: Expr) -> Optional[str]:
    return AWHNF if isinstance(e, Lam) else CWHNF if isinstance(e, Constr) else None


def evaluate_lcc(e: Expr, max_steps: int = 10_000, **kw):
    """Raises :class:`LetrecNotAllowed` on letrec input."""
    _check(e)
    return run(_step, e, max_steps, **kw)


__all__ = ["step_lcc", "evaluate_lcc", "is_lcc_whnf", "LetrecNotAllowed", "RULES"]
