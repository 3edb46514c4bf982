import random

import pytest
from hypothesis import given

from lazybench.lcc import LetrecNotAllowed, evaluate_lcc, is_lcc_whnf, step_lcc
from lazybench.outcomes import AWHNF, CWHNF, BudgetExhausted, Converged, Stuck, verdict
from lazybench.parsing import parse, parse_context
from lazybench.syntax import Constr, alpha_eq, fill, is_letrec_free, omega

from strategies import seeded_exprs


def test_seq_on_value():
    r = step_lcc(parse(r"seq (\x. x) True"))
    assert r.rule == "nseq" and r.next == Constr("True")


def test_nullary_case():
    r = step_lcc(parse("case Bool True of {True -> Nil; False -> Nil}"))
    assert r.rule == "ncase" and r.next == Constr("Nil")


def test_case_on_abstraction_is_stuck():
    o = evaluate_lcc(parse(r"case Bool (\x. x) of {True -> Nil; False -> Nil}"))
    assert isinstance(o, Stuck)


def test_self_application_of_identity():
    o = evaluate_lcc(parse(r"(\x. x x) (\y. y)"))
    assert isinstance(o, Converged) and o.steps == 2 and o.kind == AWHNF
    assert alpha_eq(o.whnf, parse(r"\y. y"))


def test_arguments_stay_unevaluated():
    o = evaluate_lcc(parse(r"Cons ((\z. z z) (\x. x x)) Nil"))
    assert isinstance(o, Converged) and o.steps == 0 and o.kind == CWHNF


def test_omega():
    o = evaluate_lcc(omega(), max_steps=100)
    assert isinstance(o, BudgetExhausted) and o.steps == 100
    assert evaluate_lcc(omega(), detect_divergence=True).reason == "omega"


def test_letrec_rejected():
    with pytest.raises(LetrecNotAllowed):
        evaluate_lcc(parse("letrec x = True in x"))
    with pytest.raises(LetrecNotAllowed):
        step_lcc(parse("letrec x = True in x"))


def test_whnf():
    assert is_lcc_whnf(parse(r"\x. x")) == AWHNF
    assert is_lcc_whnf(parse("True")) == CWHNF
    assert is_lcc_whnf(parse("seq True True")) is None


def _lcc_terms():
    return seeded_exprs(20).filter(is_letrec_free)


@given(_lcc_terms())
def test_deterministic(e):
    assert step_lcc(e) == step_lcc(e)


CONTEXTS = [parse_context(t) for t in (
    "[.]", r"[.] (\x. x)", "seq [.] True", "case Bool [.] of {True -> Nil; False -> True}",
    "case List [.] of {Nil -> True; Cons h t -> h}", r"(\f. f True) [.]", "Cons [.] Nil",
    "[.] True False", r"(\y. seq y y) [.]",
)]


@given(_lcc_terms())
def test_single_step_is_correct_in_contexts(e):
    r = step_lcc(e)
    if not hasattr(r, "next"):
        return
    for c in CONTEXTS:
        a = verdict(evaluate_lcc(fill(c, e), 2_000, detect_divergence=True))
        b = verdict(evaluate_lcc(fill(c, r.next), 2_000, detect_divergence=True))
        assert a is None or b is None or a == b


def test_single_step_on_corpus(corpus):
    checked = 0
    for e in random.Random(3).sample([e for e in corpus if is_letrec_free(e)], 40):
        r = step_lcc(e)
        if hasattr(r, "next"):
            assert is_letrec_free(r.next)
            a = verdict(evaluate_lcc(e, detect_divergence=True))
            b = verdict(evaluate_lcc(r.next, detect_divergence=True))
            assert a is None or b is None or a == b
            checked += 1
    assert checked > 0
