import random

import pytest
from hypothesis import given, strategies as st

from lazybench.lcc import evaluate_lcc
from lazybench.name import evaluate_name
from lazybench.outcomes import BudgetExhausted, verdict
from lazybench.parsing import parse, parse_context
from lazybench.syntax import (HOLE, Context, Expr, Lam, Letrec, alpha_eq, fill, free_vars,
                              is_letrec_free, omega, positions, replace_at)
from lazybench.translate import (build_Y, fixpoint_law_sides, translate_N, translate_N_context,
                                 translate_Nprime, translate_W)

from strategies import seeded_exprs


def test_single_fixpoint_combinator():
    assert alpha_eq(build_Y(1, 1), parse(r"\f. (\x. f (x x)) (\x. f (x x))"))


def test_two_fixpoint_combinator_blocks():
    y = build_Y(2, 1)
    blocks = [n for _, n in positions(y)
              if isinstance(n, Lam) and isinstance(n.body, Lam) and n.var.startswith("x")]
    assert len(blocks) == 3
    assert alpha_eq(y, parse(r"\f1 f2. (\x1 x2. f1 (x1 x1 x2) (x2 x1 x2))"
                             r" (\x1 x2. f1 (x1 x1 x2) (x2 x1 x2)) (\x1 x2. f2 (x1 x1 x2) (x2 x1 x2))"))


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_combinators_closed_and_letrec_free(n):
    for i in range(1, n + 1):
        y = build_Y(n, i)
        assert not free_vars(y) and is_letrec_free(y)


def test_bad_index():
    with pytest.raises(ValueError):
        build_Y(2, 3)
    with pytest.raises(ValueError):
        build_Y(0, 1)


def test_W_is_identity():
    e = parse(r"letrec x = \u. u in x")
    assert translate_W(e) is e and translate_W(omega()) == omega()


def test_N_on_single_binding():
    out = translate_N(parse(r"letrec x = \y. y in x"))
    assert alpha_eq(out, parse(r"(\x'. (\x. x) (x' x')) (\z. (\x. \y. y) (z z))"))


def test_Nprime_on_single_binding():
    out = translate_Nprime(parse(r"letrec x = \y. y in x"))
    assert alpha_eq(out, parse(r"(\z. (\x. \y. y) (z z)) (\z. (\x. \y. y) (z z))"))


def test_identity_on_letrec_free():
    e = parse(r"\x. x")
    assert translate_N(e) == e and translate_Nprime(e) == e


def test_contexts():
    assert translate_N_context(Context(HOLE)).expr == HOLE
    c = parse_context(r"(\x. x) [.]")
    assert alpha_eq(translate_N_context(c).expr, c.expr)


def test_self_loop_stays_divergent():
    e = parse("letrec x = x in x")
    assert isinstance(evaluate_lcc(translate_N(e), 2_000), BudgetExhausted)
    assert isinstance(evaluate_name(e, 2_000), BudgetExhausted)
    assert evaluate_lcc(translate_N(e), detect_divergence=True).definitive


def test_fixpoint_sides_shape():
    fs = [parse(r"\a b. Cons True a"), parse(r"\a b. b")]
    sides = fixpoint_law_sides(2, fs)
    assert len(sides) == 2
    for lhs, rhs in sides:
        assert is_letrec_free(lhs) and is_letrec_free(rhs)
    with pytest.raises(ValueError):
        fixpoint_law_sides(3, fs)


@given(seeded_exprs(30))
def test_outputs_letrec_free(e):
    assert is_letrec_free(translate_N(e))
    assert is_letrec_free(translate_Nprime(e))
    assert free_vars(translate_N(e)) == free_vars(e)


@given(seeded_exprs(30))
def test_N_idempotent(e):
    once = translate_N(e)
    assert translate_N(once) == once


@given(seeded_exprs(25, closed=False), seeded_exprs(10), st.randoms(use_true_random=False))
def test_compositional(host, s, rng):
    p = rng.choice([q for q, n in positions(host) if isinstance(n, Expr)])
    c = Context(replace_at(host, p, HOLE))
    lhs = translate_N(fill(c, s))
    rhs = fill(translate_N_context(c), translate_N(s))
    assert alpha_eq(lhs, rhs)


@given(seeded_exprs(25))
def test_convergence_equivalence(e):
    src = verdict(evaluate_name(e, detect_divergence=True))
    for tr in (translate_N, translate_Nprime):
        out = verdict(evaluate_lcc(tr(e), detect_divergence=True))
        assert src is None or out is None or src == out


def test_N_and_Nprime_agree_on_corpus(corpus):
    for e in random.Random(4).sample(corpus, 100):
        a = verdict(evaluate_lcc(translate_N(e), detect_divergence=True))
        b = verdict(evaluate_lcc(translate_Nprime(e), detect_divergence=True))
        assert a is None or b is None or a == b
        if isinstance(e, Letrec):
            assert not isinstance(translate_N(e), Letrec)
