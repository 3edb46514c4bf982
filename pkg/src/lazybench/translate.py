"""Translations between the calculi.

``translate_W`` (call-by-need to call-by-name) is the identity.  ``translate_N``
and ``translate_Nprime`` remove letrec using multi-fixpoint combinators; N
builds beta redexes for the recursive variables while N' substitutes them.
"""

from __future__ import annotations

from typing import List, Optional, Sequence

from .syntax import (Alt, App, Case, Constr, Context, Expr, FreshNames, Lam, Letrec,
                     Seq, Var, apps, ensure_distinct, lams, subst)


def build_Y(n: int, i: int) -> Expr:
    """``Y_i^n = \\f1..fn. X_i X_1 .. X_n`` where
    ``X_j = \\x1..xn. f_j (x1 x1..xn) .. (xn x1..xn)``."""
    if n < 1 or not 1 <= i <= n:
        raise ValueError(f"need 1 <= i <= n, got n={n}, i={i}")
    fs = [f"f{j}" for j in range(1, n + 1)] if n > 1 else ["f"]
    xs = [f"x{j}" for j in range(1, n + 1)] if n > 1 else ["x"]

    def block(j):
        selfapps = [apps(Var(xk), [Var(x) for x in xs]) for xk in xs]
        return lams(xs, apps(Var(fs[j - 1]), selfapps))

    body = apps(block(i), [block(j) for j in range(1, n + 1)])
    return ensure_distinct(lams(fs, body))


def translate_W(e):
    return e


def _frame(xs: Sequence[str], rhss: Sequence[Expr], fresh: FreshNames):
    """The combinator pieces shared by N and N'.

    Returns the fresh names ``x'``, the ``U_i = x_i' x_1' .. x_n'`` and the
    ``X_i' = \\y1..yn. F_i (y1 y1..yn) .. (yn y1..yn)`` with ``F_i = \\xs. rhs_i``.
    """
    n = len(xs)
    primes = [fresh() for _ in xs]
    us = [apps(Var(p), [Var(q) for q in primes]) for p in primes]
    blocks = []
    for rhs in rhss:
        ys = [fresh() for _ in range(n)]
        selfapps = [apps(Var(y), [Var(z) for z in ys]) for y in ys]
        blocks.append(lams(ys, apps(lams(xs, rhs), selfapps)))
    return primes, us, blocks


class _Translator:
    def __init__(self, prime: bool, fresh: Optional[FreshNames]):
        self.prime = prime
        self.fresh = fresh

    def __call__(self, e):
        if isinstance(e, Letrec):
            xs = list(e.names)
            rhss = [self(rhs) for _, rhs in e.bindings]
            body = self(e.body)
            primes, us, blocks = _frame(xs, rhss, self.fresh)
            if self.prime:
                # sigma = {x_i -> X_i' X_1' .. X_n'}
                sigma = {x: apps(blocks[k], blocks) for k, x in enumerate(xs)}
                return subst(body, sigma, self.fresh)
            return apps(lams(primes, apps(lams(xs, body), us)), blocks)
        if isinstance(e, App):
            return App(self(e.fun), self(e.arg))
        if isinstance(e, Lam):
            return Lam(e.var, self(e.body))
        if isinstance(e, Seq):
            return Seq(self(e.first), self(e.second))
        if isinstance(e, Constr):
            return Constr(e.name, tuple(self(a) for a in e.args)) if e.args else e
        if isinstance(e, Case):
            return Case(e.type, self(e.scrut),
                        tuple(Alt(a.constr, a.vars, self(a.body)) for a in e.alts))
        return e  # variables, the hole


def translate_N(e: Expr, fresh: Optional[FreshNames] = None) -> Expr:
    return _Translator(False, fresh or FreshNames.avoiding(e))(e)


def translate_Nprime(e: Expr, fresh: Optional[FreshNames] = None) -> Expr:
    return _Translator(True, fresh or FreshNames.avoiding(e))(e)


def translate_N_context(c: Context, fresh: Optional[FreshNames] = None) -> Context:
    """The hole is treated as a constant, so N commutes with filling."""
    return Context(translate_N(c.expr, fresh or FreshNames.avoiding(c.expr)))


def fixpoint_law_sides(n: int, fs: List[Expr]):
    """``(Y_i^n F1..Fn, F_i (Y_1^n F1..Fn) .. (Y_n^n F1..Fn))`` for each i."""
    if len(fs) != n:
        raise ValueError("need exactly n functions")
    ys = [apps(build_Y(n, j), fs) for j in range(1, n + 1)]
    return [(ys[i], apps(fs[i], ys)) for i in range(n)]


__all__ = ["build_Y", "translate_W", "translate_N", "translate_Nprime",
           "translate_N_context", "fixpoint_law_sides"]
