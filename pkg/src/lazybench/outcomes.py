"""Step results, evaluation outcomes and the shared evaluation driver."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Tuple

from .syntax import (App, Expr, Lam, Letrec, Var, _is_self_app, FreshNames, Position, _cached, canonical, collect_garbage, depth, freshen, has_distinct_binders,
                     is_omega, pretty, size, subterm)

AWHNF = "AWHNF"
CWHNF = "CWHNF"

S, T, V, W = "S", "T", "V", "W"


# -- single steps -----------------------------------------------------------

@dataclass(frozen=True)
class Reduced:
    next: Expr
    rule: str
    redex: Position


@dataclass(frozen=True)
class Whnf:
    kind: str


@dataclass(frozen=True)
class StepStuck:
    reason: str


@dataclass
class Labeling:
    """Result of a successful labeling pass.

    ``labels`` maps positions to S/T/V/W, ``focus`` is the position where
    the S (or T) label came to rest and ``node`` the subterm found there.
    """

    labels: dict
    focus: Position
    node: object
    jumps: list
    env: Optional[dict] = None

    ok = True

    @property
    def redex_parent(self) -> Optional[Position]:
        return self.focus[:-1] if self.focus else None


@dataclass
class LabelFail:
    reason: str
    labels: dict

    ok = False


# -- whole evaluations ------------------------------------------------------

@dataclass(frozen=True)
class Converged:
    whnf: Expr
    kind: str
    steps: int

    converged = True
    definitive = True

    @property
    def expr(self):
        return self.whnf


@dataclass(frozen=True)
class Stuck:
    at: Expr
    reason: str
    steps: int

    converged = False
    definitive = True

    @property
    def expr(self):
        return self.at


@dataclass(frozen=True)
class Diverged:
    """Certain divergence, detected by an exact loop or an Ω redex."""

    last: Expr
    reason: str
    steps: int

    converged = False
    definitive = True

    @property
    def expr(self):
        return self.last


@dataclass(frozen=True)
class BudgetExhausted:
    last: Expr
    steps: int
    reason: str = "budget"

    converged = False
    definitive = False

    @property
    def expr(self):
        return self.last


BETA_RULES = frozenset({"lbeta", "beta", "nbeta"})

#: cycle detection stores canonical texts only for terms up to this size
CYCLE_CHECK_SIZE = 5_000
#: loops are looked for only after this many steps; short runs skip the cost
CYCLE_CHECK_AFTER = 32
#: size and depth guards are checked every this many steps
GUARD_EVERY = 8
LETREC_SHIFTS = frozenset({"lapp", "lcase", "lseq", "llet-in", "llet-e"})


def _omega_redex(e: Expr, redex: Expr) -> bool:
    """Ω itself, or ``(λx.x x) y`` where ``y`` reaches a self-application
    through variable bindings of the top letrec.  The second shape only
    ever rebuilds itself: bindings to abstractions are never updated."""
    if is_omega(redex):
        return True
    if not (isinstance(redex, App) and isinstance(redex.fun, Lam) and _is_self_app(redex.fun)
            and isinstance(redex.arg, Var) and isinstance(e, Letrec)):
        return False
    env = dict(e.bindings)
    v, seen = redex.arg, set()
    while isinstance(v, Var) and v.name in env and v.name not in seen:
        seen.add(v.name)
        v = env[v.name]
    return isinstance(v, Lam) and _is_self_app(v)


def _cycle_key(g: Expr) -> str:
    return _cached(g, "_cyclekey", lambda g: pretty(canonical(g)))


def run(step: Callable, e: Expr, max_steps: int, *, detect_divergence: bool = False,
        trace: Optional[Callable] = None, max_size: int = 50_000,
        max_depth: int = 3_000, fresh: Optional[FreshNames] = None):
    """Iterate ``step(e, fresh)`` for at most ``max_steps`` steps.

    With ``detect_divergence`` two sound checks are enabled: a normal-order
    redex that is literally Ω, and a repeated term.  Repetition is judged on
    the garbage-collected canonical form; unreachable bindings never take
    part in later steps, so a repeat separated by at least one step other
    than a letrec shift is a genuine loop.
    """
    if max_steps < 0:
        raise ValueError("max_steps must be nonnegative")
    fresh = fresh or FreshNames.avoiding(e)
    if not has_distinct_binders(e):
        e = freshen(e, fresh)
    seen = {}
    progress = 0
    n = 0
    try:
        while True:
            r = step(e, fresh)
            if isinstance(r, Whnf):
                return Converged(e, r.kind, n)
            if isinstance(r, StepStuck):
                return Stuck(e, r.reason, n)
            if detect_divergence:
                if r.rule in BETA_RULES and _omega_redex(e, subterm(e, r.redex)):
                    return Diverged(e, "omega", n)
                if n >= CYCLE_CHECK_AFTER and size(e) <= CYCLE_CHECK_SIZE:
                    g = collect_garbage(e)
                    bucket = seen.setdefault((size(g), depth(g)), [])
                    if bucket:
                        key = _cycle_key(g)
                        if any(_cycle_key(h) == key and p < progress for h, p in bucket):
                            return Diverged(e, "cycle", n)
                    bucket.append((g, progress))
                if r.rule not in LETREC_SHIFTS:
                    progress += 1
            if n >= max_steps:
                return BudgetExhausted(e, n)
            n += 1
            e = r.next
            if trace is not None:
                trace(n, r.rule, r.redex, e)
            if n % GUARD_EVERY == 0:
                if size(e) > max_size:
                    return BudgetExhausted(e, n, "size")
                if depth(e) > max_depth:
                    return BudgetExhausted(e, n, "depth")
    except RecursionError:
        return BudgetExhausted(e, n, "depth")


def outcome_label(o) -> str:
    return {Converged: "Converged", Stuck: "Stuck", Diverged: "Diverged",
            BudgetExhausted: "BudgetExhausted"}[type(o)]


def verdict(o) -> Optional[bool]:
    """True/False for definitive outcomes, None when the budget ran out."""
    return o.converged if o.definitive else None


__all__ = ["AWHNF", "CWHNF", "Reduced", "Whnf", "StepStuck", "Labeling", "LabelFail",
           "Converged", "Stuck", "Diverged", "BudgetExhausted", "run", "verdict",
           "outcome_label"]
