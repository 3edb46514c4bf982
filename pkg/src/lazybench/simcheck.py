"""Bounded applicative similarity over the CE test contexts.

Every verdict is relative to a chain depth ``k``, a bound on the size of
test arguments, a per-level argument sample and a step budget.  Outcomes
are three-valued: a refutation is always backed by two definitive
evaluations, and any budget ambiguity that could hide one is reported as
:class:`SimBudgetExhausted` rather than silently counted as a pass.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Dict, Iterable, Iterator, List, Optional, Sequence, Tuple, Union

from .corpus import gen_corpus
from .lcc import evaluate_lcc
from .lr import evaluate_lr
from .name import evaluate_name
from .outcomes import verdict
from .syntax import (HOLE, Alt, App, Case, Constr, Context, Expr, FreshNames, Lam,
                     SignatureTable, STANDARD, Var, free_vars, is_letrec_free, omega,
                     pretty, size, subst, subterm)
from .transform import Rule, resolve_rules

EVALUATORS: Dict[str, Callable] = {"lr": evaluate_lr, "name": evaluate_name, "lcc": evaluate_lcc}


# ---------------------------------------------------------------------------
# Test contexts


@dataclass(frozen=True)
class Apply:
    """``([.] r)``"""

    arg: Expr

    def plug(self, e: Expr) -> Expr:
        return App(e, self.arg)

    def __str__(self):
        return f"Apply({pretty(self.arg)})"


def _case_alts(shape, pick: Callable[[str, Tuple[str, ...]], Expr]):
    alts = []
    for c, a in shape:
        vs = tuple(f"_q{j}" for j in range(1, a + 1))
        alts.append(Alt(c, vs, pick(c, vs)))
    return tuple(alts)


@dataclass(frozen=True)
class CaseProbe:
    """``case_T [.] of {c xs -> True; others -> Ω}``"""

    type: str
    constr: str
    shape: Tuple[Tuple[str, int], ...] = field(compare=False, repr=False, default=())

    def plug(self, e: Expr) -> Expr:
        alts = _case_alts(self.shape, lambda c, vs: Constr("True") if c == self.constr else omega())
        return Case(self.type, e, alts)

    def __str__(self):
        return f"CaseProbe({self.type},{self.constr})"


@dataclass(frozen=True)
class CaseSelect:
    """``case_T [.] of {c x1..xn -> x_index; others -> Ω}``"""

    type: str
    constr: str
    index: int
    shape: Tuple[Tuple[str, int], ...] = field(compare=False, repr=False, default=())

    def plug(self, e: Expr) -> Expr:
        alts = _case_alts(self.shape, lambda c, vs: Var(vs[self.index - 1]) if c == self.constr else omega())
        return Case(self.type, e, alts)

    def __str__(self):
        return f"CaseSelect({self.type},{self.constr},{self.index})"


QContext = Union[Apply, CaseProbe, CaseSelect]


def as_context(q: QContext) -> Context:
    return Context(q.plug(HOLE))


def format_chain(chain: Sequence[QContext]) -> str:
    """Outermost context first; ``-`` for the empty chain."""
    return " . ".join(str(q) for q in chain) if chain else "-"


def plug_chain(chain: Sequence[QContext], e: Expr) -> Expr:
    for q in reversed(chain):
        e = q.plug(e)
    return e


def default_abstractions() -> List[Expr]:
    """``λx.x``, ``λx.Ω`` and ``λx.λy.x``."""
    return [Lam("x", Var("x")), Lam("x", omega()), Lam("x", Lam("y", Var("x")))]


def enumerate_CE(sig: SignatureTable = STANDARD, size_bound: int = 3,
                 abstraction_pool: Iterable[Expr] = ()) -> List[Expr]:
    """Closed test arguments of size at most ``size_bound``.

    Ω and every abstraction count as size 1; a constructor application
    counts 1 plus the sizes of its arguments.  Output is ordered by size,
    then leaves before constructors and constructors in declaration order.
    """
    if size_bound < 1:
        raise ValueError("size_bound must be at least 1")
    leaves = [omega()] + default_abstractions()
    for p in abstraction_pool:
        if not isinstance(p, Lam) or free_vars(p) or not is_letrec_free(p):
            raise ValueError(f"pool entries must be closed letrec-free abstractions: {pretty(p)}")
        if p not in leaves:
            leaves.append(p)
    by_size: Dict[int, List[Expr]] = {1: leaves + [Constr(c) for _, cs in sig.types for c, a in cs if a == 0]}
    for n in range(2, size_bound + 1):
        level = []
        for _, cs in sig.types:
            for c, a in cs:
                if a == 0 or a > n - 1:
                    continue
                for parts in _compositions(n - 1, a):
                    for args in itertools.product(*(by_size.get(p, []) for p in parts)):
                        level.append(Constr(c, tuple(args)))
        by_size[n] = level
    return [e for n in range(1, size_bound + 1) for e in by_size[n]]


def _compositions(total: int, k: int) -> Iterator[Tuple[int, ...]]:
    if k == 1:
        yield (total,)
        return
    for first in range(1, total - k + 2):
        for rest in _compositions(total - first, k - 1):
            yield (first,) + rest


def case_contexts(sig: SignatureTable = STANDARD) -> List[QContext]:
    """All probes, then all selectors, in declaration order."""
    probes, selects = [], []
    for t, cs in sig.types:
        shape = tuple(cs)
        for c, a in cs:
            probes.append(CaseProbe(t, c, shape))
            selects.extend(CaseSelect(t, c, i, shape) for i in range(1, a + 1))
    return probes + selects


def enumerate_Q(sig: SignatureTable = STANDARD, ce: Iterable[Expr] = ()) -> List[QContext]:
    """``Apply(r)`` for each argument, then case probes, then case selectors."""
    return [Apply(r) for r in ce] + case_contexts(sig)


# ---------------------------------------------------------------------------
# Configuration and verdicts


@dataclass(frozen=True)
class SimConfig:
    k: int = 3
    arg_size: int = 3
    args_per_level: int = 8
    max_steps: int = 2_000
    calculus: str = "lr"
    seed: int = 0
    abstraction_pool: Tuple[Expr, ...] = ()
    sig: SignatureTable = field(default=STANDARD, compare=False)

    def __post_init__(self):
        if self.k < 0 or self.arg_size < 1 or self.args_per_level < 1 or self.max_steps < 1:
            raise ValueError("similarity bounds must be positive (k may be 0)")
        if self.calculus not in EVALUATORS:
            raise ValueError(f"unknown calculus {self.calculus!r}")

    def replace(self, **kw) -> "SimConfig":
        from dataclasses import replace
        return replace(self, **kw)

    @property
    def ce(self) -> List[Expr]:
        return _ce_cached(self.sig, self.arg_size, self.abstraction_pool)

    def args_at(self, level: int) -> List[Expr]:
        """The argument sample for the ``level``-th context applied (1-based).

        The smallest half of the budget is always the first arguments in
        enumeration order; the rest is a seeded sample of the remainder.
        """
        ce = self.ce
        n = self.args_per_level
        if len(ce) <= n:
            return list(ce)
        head = n // 2 + n % 2
        rng = random.Random(self.seed * 1009 + level)
        picked = sorted(rng.sample(range(head, len(ce)), n - head))
        return ce[:head] + [ce[i] for i in picked]

    def contexts_at(self, level: int) -> List[QContext]:
        return enumerate_Q(self.sig, self.args_at(level))

    def evaluate(self, e: Expr):
        return EVALUATORS[self.calculus](e, max_steps=self.max_steps, detect_divergence=True)


@lru_cache(maxsize=32)
def _ce_cached(sig, arg_size, pool):
    return enumerate_CE(sig, arg_size, pool)


@dataclass(frozen=True)
class HoldsToDepth:
    k: int

    holds = True
    refuted = False

    def __str__(self):
        return f"HoldsToDepth({self.k})"


@dataclass(frozen=True)
class Refuted:
    """``plug_chain(witness, s1)`` converges and ``plug_chain(witness, s2)``
    definitively does not (under ``substitution`` for open inputs)."""

    witness: Tuple[QContext, ...]
    substitution: Tuple[Tuple[str, Expr], ...] = ()

    holds = False
    refuted = True

    def __str__(self):
        return "Refuted"


@dataclass(frozen=True)
class SimBudgetExhausted:
    k: int
    details: str

    holds = False
    refuted = False

    def __str__(self):
        return "BudgetExhausted"


SimVerdict = Union[HoldsToDepth, Refuted, SimBudgetExhausted]


def format_verdict(v: SimVerdict, cfg: SimConfig) -> str:
    """``<verdict> k=<k> args=<n> witness=<chain or ->``"""
    line = f"{v} k={cfg.k} args={cfg.args_per_level} witness="
    if isinstance(v, Refuted):
        line += format_chain(v.witness)
        if v.substitution:
            line += " sigma={" + ", ".join(f"{x}:={pretty(r)}" for x, r in v.substitution) + "}"
        return line
    return line + "-"


# ---------------------------------------------------------------------------
# Bounded checks


def _require_closed(cfg: SimConfig, *es: Expr):
    for e in es:
        fv = free_vars(e)
        if fv:
            raise ValueError(f"open expression (free: {', '.join(sorted(fv))}); "
                             "use open_extension_check")
        if cfg.calculus == "lcc" and not is_letrec_free(e):
            raise ValueError("the lcc calculus needs letrec-free expressions")


def _explore(s1: Expr, s2: Expr, depth: int, cfg: SimConfig, use_values: bool,
             k_report: int) -> SimVerdict:
    """Breadth-first search for a witness chain of length at most ``depth``.

    A chain whose left side definitively diverges is pruned: every test
    context is strict, so no extension can converge on the left.  With
    ``use_values`` the contexts of the next level are applied to the values
    rather than to the expressions (the inductive iterates).
    """
    frontier = [((), s1, s2)]
    unknown = []
    for level in range(depth + 1):
        nxt = []
        qs = cfg.contexts_at(level + 1) if level < depth else []
        for chain, a, b in frontier:
            oa = cfg.evaluate(a)
            va = verdict(oa)
            if va is False:
                continue
            ob = oa if b is a else cfg.evaluate(b)
            vb = verdict(ob)
            if va is True and vb is False:
                return Refuted(chain)
            if va is None or vb is None:
                if not (vb is True and level == depth):
                    unknown.append(chain)
                continue
            if level == depth:
                continue
            if use_values:
                a, b = oa.whnf, (oa.whnf if b is a else ob.whnf)
            for q in qs:
                qa = q.plug(a)
                nxt.append(((q,) + chain, qa, qa if b is a else q.plug(b)))
        frontier = nxt
    if unknown:
        return SimBudgetExhausted(k_report, f"{len(unknown)} chain(s) undecided within "
                                            f"{cfg.max_steps} steps, e.g. [{format_chain(unknown[0])}]")
    return HoldsToDepth(k_report)


def bounded_le_Q(s1: Expr, s2: Expr, cfg: SimConfig = SimConfig()) -> SimVerdict:
    """Every sampled chain ``Q1(..Qn(.)..)``, ``n <= k``, converging on
    ``s1`` also converges on ``s2``.  Chains are plugged around the original
    expressions, never around their values."""
    _require_closed(cfg, s1, s2)
    return _explore(s1, s2, cfg.k, cfg, False, cfg.k)


def kleene_iterate(s1: Expr, s2: Expr, i: int, cfg: SimConfig = SimConfig()) -> SimVerdict:
    """Membership in the ``i``-th inductive iterate; iterate 0 is all pairs.

    ``s1`` is related to ``s2`` at ``i > 0`` iff convergence of ``s1`` to
    ``v1`` implies convergence of ``s2`` to ``v2`` and every sampled ``Q``
    relates ``Q(v1)`` and ``Q(v2)`` at ``i - 1``.
    """
    if i < 0:
        raise ValueError("iterate index must be nonnegative")
    _require_closed(cfg, s1, s2)
    if i == 0:
        return HoldsToDepth(0)
    return _explore(s1, s2, i - 1, cfg, True, i)


def bounded_sim_iterates(s1: Expr, s2: Expr, cfg: SimConfig = SimConfig()) -> SimVerdict:
    """The iterate that inspects value chains of length at most ``k``
    (iterate ``k + 1``), reported at depth ``k`` like :func:`bounded_le_Q`."""
    _require_closed(cfg, s1, s2)
    return _explore(s1, s2, cfg.k, cfg, True, cfg.k)


def check_mutual_sim(s1: Expr, s2: Expr, cfg: SimConfig = SimConfig(),
                     method: str = "chains") -> Tuple[SimVerdict, SimVerdict]:
    check = {"chains": bounded_le_Q, "iterates": bounded_sim_iterates}[method]
    return check(s1, s2, cfg), check(s2, s1, cfg)


def closing_substitutions(names: Sequence[str], cfg: SimConfig, limit: int) -> List[Tuple[Tuple[str, Expr], ...]]:
    """The first ``limit`` maps from ``names`` to test arguments, ordered by
    the sum of the arguments' enumeration indices."""
    ce = cfg.ce
    out = []
    m = len(names)
    total = 0
    while len(out) < limit and total <= m * (len(ce) - 1):
        for idx in itertools.product(range(min(total, len(ce) - 1) + 1), repeat=m):
            if sum(idx) == total:
                out.append(tuple((x, ce[i]) for x, i in zip(names, idx)))
                if len(out) == limit:
                    break
        total += 1
    return out


def open_extension_check(s1: Expr, s2: Expr, cfg: SimConfig = SimConfig(),
                         n_substitutions: int = 12) -> SimVerdict:
    """Bounded check of every sampled closing instance of ``s1``, ``s2``."""
    names = sorted(free_vars(s1) | free_vars(s2))
    if not names:
        return bounded_le_Q(s1, s2, cfg)
    unknown = 0
    for sigma in closing_substitutions(names, cfg, n_substitutions):
        v = bounded_le_Q(subst(s1, sigma), subst(s2, sigma), cfg)
        if isinstance(v, Refuted):
            return Refuted(v.witness, sigma)
        if isinstance(v, SimBudgetExhausted):
            unknown += 1
    if unknown:
        return SimBudgetExhausted(cfg.k, f"{unknown} closing instance(s) undecided")
    return HoldsToDepth(cfg.k)


# ---------------------------------------------------------------------------
# Convergence admissibility


@dataclass(frozen=True)
class AdmissibilityFailure:
    expr: Expr
    context: QContext
    direct: bool
    via_value: bool


def admissibility_failures(s: Expr, qs: Iterable[QContext], cfg: SimConfig = SimConfig()) -> Tuple[List[AdmissibilityFailure], int]:
    """Compare ``Q(s)⇓`` with ``s⇓v ∧ Q(v)⇓`` for every ``Q``.

    Returns the failures and the number of comparisons skipped because one
    side was undecided.
    """
    o = cfg.evaluate(s)
    failures, skipped = [], 0
    for q in qs:
        direct = verdict(cfg.evaluate(q.plug(s)))
        if o.converged:
            via = verdict(cfg.evaluate(q.plug(o.whnf)))
        else:
            via = verdict(o)
        if direct is None or via is None:
            skipped += 1
        elif direct != via:
            failures.append(AdmissibilityFailure(s, q, direct, via))
    return failures, skipped


# ---------------------------------------------------------------------------
# Transformation harness


@dataclass(frozen=True)
class Counterexample:
    rule: str
    expr: Expr
    position: Tuple[int, ...]
    result: Expr
    before: Optional[bool]
    after: Optional[bool]
    witness: Tuple[QContext, ...] = ()
    kind: str = "convergence"  # or "similarity ->" / "similarity <-"

    @property
    def redex(self) -> Expr:
        return subterm(self.expr, self.position)

    def __str__(self):
        pos = ".".join(map(str, self.position)) or "ε"
        return (f"{self.rule} @{pos} ({self.kind}): {pretty(self.expr)}  ~>  {pretty(self.result)}"
                f"  [{self.before} vs {self.after}; witness={format_chain(self.witness)}]")


@dataclass
class TransformationReport:
    rule: str
    expressions: int = 0
    instances: int = 0
    counterexamples: List[Counterexample] = field(default_factory=list)
    inconclusive: int = 0
    sim_checked: int = 0
    sim_inconclusive: int = 0

    @property
    def ok(self) -> bool:
        return not self.counterexamples

    def summary(self) -> str:
        return (f"{self.rule}: {self.instances} instance(s) in {self.expressions} expression(s), "
                f"{len(self.counterexamples)} counterexample(s), {self.inconclusive} inconclusive, "
                f"similarity {self.sim_checked} checked / {self.sim_inconclusive} undecided")


def check_transformation(rule: Union[str, Rule, Sequence[Rule]], corpus: Sequence[Expr],
                         cfg: SimConfig = SimConfig(), sim_sample: int = 10) -> TransformationReport:
    """Apply ``rule`` at every matching position of every corpus expression.

    Convergence of source and result is compared for every instance.  A
    seeded sample of at most ``sim_sample`` closed instances with agreeing
    verdicts is also checked for mutual bounded similarity.
    """
    if isinstance(rule, (str, Rule)):
        rules = resolve_rules(rule)
        label = rule if isinstance(rule, str) else rule.name
    else:
        rules = list(rule)
        label = "+".join(r.name for r in rules)
    report = TransformationReport(label)
    agreeing = []
    for e in corpus:
        report.expressions += 1
        before = None
        evaluated = False
        fresh = FreshNames.avoiding(e)
        for r in rules:
            for p, e2 in r.instances(e, fresh):
                report.instances += 1
                if not evaluated:
                    before, evaluated = verdict(cfg.evaluate(e)), True
                after = verdict(cfg.evaluate(e2))
                if before is None or after is None:
                    report.inconclusive += 1
                elif before != after:
                    report.counterexamples.append(Counterexample(r.name, e, p, e2, before, after))
                elif not (free_vars(e) or free_vars(e2)):
                    agreeing.append((r.name, e, p, e2, before))
    rng = random.Random(cfg.seed)
    for name, e, p, e2, v in sorted(rng.sample(agreeing, min(sim_sample, len(agreeing))),
                                    key=lambda t: agreeing.index(t)):
        report.sim_checked += 1
        for a, b, arrow in ((e, e2, "->"), (e2, e, "<-")):
            sv = bounded_le_Q(a, b, cfg)
            if isinstance(sv, Refuted):
                report.counterexamples.append(Counterexample(
                    name, e, p, e2, v, v, sv.witness, "similarity " + arrow))
                break
            if isinstance(sv, SimBudgetExhausted):
                report.sim_inconclusive += 1
                break
    return report


__all__ = ["Apply", "CaseProbe", "CaseSelect", "QContext", "as_context", "format_chain",
           "plug_chain", "enumerate_CE", "enumerate_Q", "case_contexts", "default_abstractions",
           "SimConfig", "HoldsToDepth", "Refuted", "SimBudgetExhausted", "SimVerdict",
           "format_verdict", "bounded_le_Q", "bounded_sim_iterates", "kleene_iterate",
           "check_mutual_sim", "open_extension_check", "closing_substitutions",
           "admissibility_failures", "AdmissibilityFailure", "check_transformation",
           "TransformationReport", "Counterexample", "gen_corpus", "EVALUATORS"]
