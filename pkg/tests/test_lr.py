import pytest
from hypothesis import given

from lazybench.lcc import evaluate_lcc
from lazybench.lr import RULES, evaluate_lr, is_lr_whnf, label_lr, step_lr
from lazybench.outcomes import (AWHNF, CWHNF, BudgetExhausted, Converged, Reduced, S, StepStuck,
                                Stuck, T, Whnf, verdict)
from lazybench.parsing import parse
from lazybench.syntax import Letrec, alpha_eq, is_letrec_free, omega, subterm

from strategies import seeded_exprs

S1 = r"letrec x = (y \u.u), y = \z.z in x"


def step(text):
    return step_lr(parse(text))


def test_running_example_labels():
    lab = label_lr(parse(S1))
    assert lab.ok
    assert lab.labels == {(): "V", (1,): "V", (2,): "V", (2, 1): "V", (3,): S}
    assert lab.focus == (3,)


def test_cyclic_chain_fails_labeling():
    assert not label_lr(parse("letrec x = x in x")).ok
    o = evaluate_lr(parse("letrec x = x in x"))
    assert isinstance(o, Stuck) and "cyclic" in o.reason


def test_abstraction_labeled_top():
    lab = label_lr(parse(r"\x. x"))
    assert lab.labels == {(): T}


def test_running_example_steps():
    r = step(S1)
    assert r.rule == "cp-e"
    assert alpha_eq(r.next, parse(r"letrec x = ((\w.w) \u.u), y = \z.z in x"))
    r = step(r"letrec x = z1, z1 = \u.u, y = \z.z in x")
    assert r.rule == "cp-in"
    assert alpha_eq(r.next, parse(r"letrec x = z1, z1 = \u.u, y = \z.z in \u.u"))


def test_golden_trace():
    rules = []
    o = evaluate_lr(parse(S1), trace=lambda n, rule, p, e: rules.append(rule))
    assert rules == ["cp-e", "lbeta", "llet-e", "cp-in"]
    assert isinstance(o, Converged) and o.steps == 4 and o.kind == AWHNF
    assert alpha_eq(o.whnf, parse(r"letrec x = z1, z1 = \u.u, y = \z.z in \u.u"))


def test_identity_application():
    o = evaluate_lr(parse(r"(\x. x) (\y. y)"))
    assert isinstance(o, Converged) and o.steps == 2 and o.kind == AWHNF
    assert alpha_eq(o.whnf, parse(r"letrec x = \y. y in \y. y"))


def test_variable_bound_to_abstraction():
    e = parse(r"letrec x = \u. u in x")
    assert is_lr_whnf(e) is None
    assert step_lr(e).rule == "cp-in"
    o = evaluate_lr(e)
    assert o.steps == 1 and o.kind == AWHNF


def test_whnf_shapes():
    assert is_lr_whnf(parse("Cons True Nil")) == CWHNF
    assert is_lr_whnf(parse("letrec x1 = Cons True Nil, x2 = x1 in x2")) == CWHNF
    assert is_lr_whnf(parse(r"letrec a = True in \x. a")) == AWHNF
    assert is_lr_whnf(parse(r"(\x. x) True")) is None
    assert isinstance(step_lr(parse("Cons True Nil")), Whnf)


@pytest.mark.parametrize("src, rule, result", [
    (r"(letrec a = True in \x.x) Nil", "lapp", r"letrec a = True in (\x. x) Nil"),
    (r"letrec b = (letrec a = True in \x. a) in b", "llet-e", r"letrec b = \x. a, a = True in b"),
    (r"letrec a = True in (letrec b = Nil in \x.b)", "llet-in", r"letrec a = True, b = Nil in \x. b"),
    ("case Bool (letrec a = True in a) of {True -> Nil; False -> Nil}", "lcase",
     "letrec a = True in case Bool a of {True -> Nil; False -> Nil}"),
    ("case List (Cons True Nil) of {Nil -> Nil; Cons h t -> t}", "case-c",
     "letrec h = True, t = Nil in t"),
    ("letrec x = Cons True Nil in case List x of {Nil -> Nil; Cons h t -> h}", "case-in",
     "letrec x = Cons p q, p = True, q = Nil in letrec h = p, t = q in h"),
    ("letrec x = Cons True Nil, y = case List x of {Nil -> Nil; Cons h t -> h} in y", "case-e",
     "letrec x = Cons p q, p = True, q = Nil, y = (letrec h = p, t = q in h) in y"),
    ("seq True Nil", "seq-c", "Nil"),
    ("letrec x = True in seq x Nil", "seq-in", "letrec x = True in Nil"),
    ("letrec x = True, y = seq x Nil in y", "seq-e", "letrec x = True, y = Nil in y"),
    (r"letrec x = \u.u, y = x True in y", "cp-e", r"letrec x = \u.u, y = (\v. v) True in y"),
    (r"(\x. x) True", "lbeta", "letrec x = True in x"),
])
def test_rule_instances(src, rule, result):
    r = step(src)
    assert isinstance(r, Reduced)
    assert r.rule == rule and rule in RULES
    assert alpha_eq(r.next, parse(result))


@pytest.mark.parametrize("src, reason", [
    ("True Nil", "applied"),
    (r"case Bool (\x.x) of {True -> Nil; False -> Nil}", "abstraction"),
    ("letrec x = y in x", "free variable y"),
    ("z", "free variable z"),
])
def test_stuck(src, reason):
    r = step(src)
    assert isinstance(r, StepStuck) and reason in r.reason


def test_omega_runs_out_of_budget():
    o = evaluate_lr(omega(), max_steps=500)
    assert isinstance(o, BudgetExhausted) and o.steps == 500
    assert evaluate_lr(omega(), detect_divergence=True).reason == "omega"


@given(seeded_exprs())
def test_step_is_deterministic(e):
    a, b = step_lr(e), step_lr(e)
    assert a == b
    assert isinstance(a, (Reduced, Whnf, StepStuck))


@given(seeded_exprs())
def test_labeling_follows_reduction_contexts(e):
    lab = label_lr(e)
    if not lab.ok:
        return
    jumps = {p for p, _ in lab.jumps}
    for p in lab.labels:
        if not p:
            continue
        parent = subterm(e, p[:-1])
        # leaving position 1 is only allowed into a letrec binding
        assert p[-1] == 1 or isinstance(parent, Letrec) or p[:-1] in jumps
    assert lab.labels[lab.focus] in (S, T)


@given(seeded_exprs())
def test_converged_terms_are_whnf(e):
    o = evaluate_lr(e, max_steps=2_000)
    if isinstance(o, Converged):
        assert is_lr_whnf(o.whnf) == o.kind


@given(seeded_exprs(30))
def test_agrees_with_letrec_free_machine(e):
    if not is_letrec_free(e):
        return
    a = verdict(evaluate_lr(e, detect_divergence=True))
    b = verdict(evaluate_lcc(e, detect_divergence=True))
    assert a is None or b is None or a == b
