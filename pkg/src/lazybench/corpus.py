"""Seeded random generation of well-formed expressions."""

from __future__ import annotations

import random
from typing import List, Optional

from .syntax import (Alt, App, Case, Constr, Expr, Lam, Letrec, Seq, SignatureTable,
                     STANDARD, Var, ensure_distinct, omega, size)

FREE_NAMES = ("a", "b", "c")


class _Gen:
    def __init__(self, sig: SignatureTable, rng: random.Random, closed_only: bool):
        self.sig = sig
        self.rng = rng
        self.closed_only = closed_only
        self.counter = 0
        self.nullary = [c for _, cs in sig.types for c, a in cs if a == 0]
        self.nonnullary = [(c, a) for _, cs in sig.types for c, a in cs if a > 0]

    def name(self) -> str:
        self.counter += 1
        return f"x{self.counter}"

    def leaf(self, scope) -> Expr:
        r = self.rng.random()
        if scope and r < 0.55:
            return Var(self.rng.choice(scope))
        if not self.closed_only and r < 0.65:
            return Var(self.rng.choice(FREE_NAMES))
        if r < 0.8:
            x = self.name()
            return Lam(x, Var(x))
        return Constr(self.rng.choice(self.nullary))

    def gen(self, budget: int, scope: List[str], recursive: List[str]) -> Expr:
        rng = self.rng
        if budget <= 1:
            return self.leaf(scope + recursive if rng.random() < 0.2 else scope)
        if budget >= 7 and rng.random() < 0.02:
            return omega()
        kinds = ["lam", "app", "app", "letrec", "constr", "seq", "case", "leaf"]
        kind = rng.choice(kinds)
        if kind == "leaf":
            return self.leaf(scope)
        if kind == "lam":
            x = self.name()
            return Lam(x, self.gen(budget - 1, scope + [x], recursive))
        if kind == "app":
            k = rng.randint(1, max(1, budget - 2))
            fun = self.gen(k, scope, recursive)
            if rng.random() < 0.5:
                x = self.name()
                fun = Lam(x, self.gen(max(1, k - 1), scope + [x], recursive))
            return App(fun, self.gen(max(1, budget - 1 - k), scope, recursive))
        if kind in ("constr", "seq") and budget >= 3:
            if kind == "seq":
                k = rng.randint(1, budget - 2)
                return Seq(self.gen(k, scope, recursive), self.gen(budget - 1 - k, scope, recursive))
            c, a = rng.choice(self.nonnullary) if self.nonnullary else (None, 0)
            if c is None:
                return self.leaf(scope)
            parts = self.split(budget - 1, a)
            return Constr(c, tuple(self.gen(p, scope, recursive) for p in parts))
        if kind == "case" and budget >= 3:
            tname = rng.choice(self.sig.type_names)
            cons = self.sig.constructors(tname)
            parts = self.split(budget - 1, len(cons) + 1)
            scrut = self.scrutinee(tname, parts[0], scope, recursive)
            alts = []
            for (c, a), p in zip(cons, parts[1:]):
                vs = tuple(self.name() for _ in range(a))
                alts.append(Alt(c, vs, self.gen(p, scope + list(vs), recursive)))
            return Case(tname, scrut, tuple(alts))
        if kind == "letrec" and budget >= 3:
            n = rng.choice([1, 1, 1, 2, 2, 3])
            n = min(n, (budget - 1) // 2)
            parts = self.split(budget - 1, n + 1)
            names = [self.name() for _ in range(n)]
            bindings = []
            for i, (x, p) in enumerate(zip(names, parts[1:])):
                # mostly refer to earlier bindings; recursion is rarer
                rec = names if rng.random() < 0.25 else []
                bindings.append((x, self.gen(p, scope + names[:i], recursive + rec)))
            return Letrec(tuple(bindings), self.gen(parts[0], scope + names, recursive))
        return self.leaf(scope)

    def scrutinee(self, tname: str, budget: int, scope, recursive) -> Expr:
        """Usually something that evaluates to a constructor of ``tname``."""
        rng = self.rng
        r = rng.random()
        if r < 0.35:
            return self.gen(budget, scope, recursive)
        c, a = rng.choice(self.sig.constructors(tname))
        parts = self.split(budget - 1, a) if a and budget > a else [1] * a
        value = Constr(c, tuple(self.gen(p, scope, recursive) for p in parts))
        if r < 0.7 or budget < 4:
            return value
        # hide the constructor behind a beta redex or a letrec
        x = self.name()
        if r < 0.85:
            return App(Lam(x, value), self.gen(2, scope, recursive))
        return Letrec(((x, value),), Var(x))

    def split(self, total: int, k: int) -> List[int]:
        """Split ``total`` into ``k`` positive parts (at least 1 each)."""
        if k <= 0:
            return []
        total = max(total, k)
        cuts = sorted(self.rng.sample(range(1, total), k - 1)) if k > 1 else []
        bounds = [0] + cuts + [total]
        return [bounds[i + 1] - bounds[i] for i in range(k)]


def gen_expr(rng: random.Random, size_bound: int = 40, sig: SignatureTable = STANDARD,
             closed_only: bool = True) -> Expr:
    g = _Gen(sig, rng, closed_only)
    while True:
        e = g.gen(rng.randint(max(1, size_bound // 4), size_bound), [], [])
        if size(e) <= size_bound:
            return ensure_distinct(e)


def gen_corpus(sig: SignatureTable = STANDARD, seed: int = 0, count: int = 500,
               size_bound: int = 40, closed_only: bool = True) -> List[Expr]:
    """Deterministic list of ``count`` well-formed expressions of size at most
    ``size_bound``.  The same arguments always give the same corpus."""
    if count < 1:
        raise ValueError("count must be positive")
    rng = random.Random(seed)
    return [gen_expr(rng, size_bound, sig, closed_only) for _ in range(count)]


__all__ = ["gen_corpus", "gen_expr"]
