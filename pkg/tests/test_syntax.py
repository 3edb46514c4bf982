import random

import pytest
from hypothesis import given, strategies as st

from lazybench.parsing import parse, parse_context
from lazybench.syntax import (App, BOT, Case, Constr, FreshNames, IDENTITY, Lam, Letrec, Seq,
                              Var, alpha_eq, canonical, collect_garbage, contains_hole, depth,
                              fill, format_position, free_vars, freshen, has_distinct_binders,
                              is_letrec_free, omega, parse_position, positions, pretty,
                              replace_at, size, subst, subterm)

from strategies import open_exprs, seeded_exprs


# -- independent oracles ----------------------------------------------------

def naive_fv(e):
    if isinstance(e, Var):
        return {e.name}
    if isinstance(e, Lam):
        return naive_fv(e.body) - {e.var}
    if isinstance(e, App):
        return naive_fv(e.fun) | naive_fv(e.arg)
    if isinstance(e, Seq):
        return naive_fv(e.first) | naive_fv(e.second)
    if isinstance(e, Constr):
        return set().union(*(naive_fv(a) for a in e.args)) if e.args else set()
    if isinstance(e, Case):
        out = naive_fv(e.scrut)
        for a in e.alts:
            out |= naive_fv(a.body) - set(a.vars)
        return out
    if isinstance(e, Letrec):
        names = {x for x, _ in e.bindings}
        out = naive_fv(e.body)
        for _, r in e.bindings:
            out |= naive_fv(r)
        return out - names
    return set()


def nameless(e, env=()):
    """De Bruijn form; letrec bindings keep their textual order."""
    if isinstance(e, Var):
        return ("bound", env.index(e.name)) if e.name in env else ("free", e.name)
    if isinstance(e, Lam):
        return ("lam", nameless(e.body, (e.var,) + env))
    if isinstance(e, App):
        return ("app", nameless(e.fun, env), nameless(e.arg, env))
    if isinstance(e, Seq):
        return ("seq", nameless(e.first, env), nameless(e.second, env))
    if isinstance(e, Constr):
        return ("con", e.name) + tuple(nameless(a, env) for a in e.args)
    if isinstance(e, Case):
        return ("case", e.type, nameless(e.scrut, env)) + tuple(
            (a.constr, len(a.vars), nameless(a.body, tuple(reversed(a.vars)) + env)) for a in e.alts)
    if isinstance(e, Letrec):
        inner = tuple(reversed([x for x, _ in e.bindings])) + env
        return ("letrec",) + tuple(nameless(r, inner) for _, r in e.bindings) + (nameless(e.body, inner),)
    return (type(e).__name__,)


def naive_subst(e, x, r):
    """Substitution of a closed ``r``; nothing can be captured."""
    if isinstance(e, Var):
        return r if e.name == x else e
    if isinstance(e, Lam):
        return e if e.var == x else Lam(e.var, naive_subst(e.body, x, r))
    if isinstance(e, App):
        return App(naive_subst(e.fun, x, r), naive_subst(e.arg, x, r))
    if isinstance(e, Seq):
        return Seq(naive_subst(e.first, x, r), naive_subst(e.second, x, r))
    if isinstance(e, Constr):
        return Constr(e.name, tuple(naive_subst(a, x, r) for a in e.args))
    if isinstance(e, Case):
        from lazybench.syntax import Alt
        return Case(e.type, naive_subst(e.scrut, x, r), tuple(
            a if x in a.vars else Alt(a.constr, a.vars, naive_subst(a.body, x, r)) for a in e.alts))
    if isinstance(e, Letrec):
        if x in {y for y, _ in e.bindings}:
            return e
        return Letrec(tuple((y, naive_subst(s, x, r)) for y, s in e.bindings), naive_subst(e.body, x, r))
    return e


# -- examples ---------------------------------------------------------------

def test_alpha_examples():
    assert alpha_eq(parse(r"\x. x"), parse(r"\y. y"))
    assert alpha_eq(parse(r"letrec a = \x.x, b = a in b"), parse(r"letrec b = a, a = \x.x in b"))
    assert not alpha_eq(parse(r"\x. \y. x"), parse(r"\x. \y. y"))


def test_free_vars_examples():
    assert free_vars(Var("x")) == {"x"}
    assert free_vars(parse("letrec x = x in x")) == set()
    assert free_vars(parse(r"letrec x = (y \u.u) in x")) == {"y"}
    assert free_vars(omega()) == set()


def test_subst_examples():
    e = subst(parse("x y"), {"x": parse(r"\z. z")})
    assert alpha_eq(e, parse(r"(\z. z) y"))
    captured = subst(Lam("y", Var("x")), {"x": Var("y")})
    assert isinstance(captured, Lam) and captured.var != "y"
    assert captured.body == Var("y")


def test_fill_examples():
    e = parse(r"\x. x")
    assert fill(IDENTITY, e) == e
    assert alpha_eq(fill(parse_context("[.] r"), e), parse(r"(\x. x) r"))
    assert alpha_eq(fill(parse_context("seq [.] True"), omega()), Seq(omega(), Constr("True")))


def test_omega_shape():
    assert pretty(omega()) == r"(\z. z z) (\x. x x)"


def test_positions_and_size():
    e = parse(r"letrec x = \y. y, z = True in x z")
    assert subterm(e, (1,)) == parse("x z")
    assert isinstance(subterm(e, (2,)), Lam)
    assert subterm(e, (3,)) == Constr("True")
    assert size(Var("x")) == 1 and size(parse(r"\x. x")) == 2
    assert depth(Var("x")) == 1
    assert parse_position("1.2.1") == (1, 2, 1) and parse_position("ε") == ()
    assert format_position((1, 2)) == "1.2" and format_position(()) == "ε"
    assert replace_at(e, (1,), BOT).body == BOT


def test_collect_garbage():
    assert collect_garbage(parse(r"letrec x = \u. u in True")) == Constr("True")
    e = parse(r"letrec a = b, b = \x. x, c = a in a")
    assert alpha_eq(collect_garbage(e), parse(r"letrec a = b, b = \x. x in a"))


# -- properties -------------------------------------------------------------

@given(open_exprs())
def test_free_vars_matches_naive_definition(e):
    assert free_vars(e) == naive_fv(e)


@given(open_exprs(), st.randoms(use_true_random=False))
def test_alpha_invariant_under_renaming(e, rng):
    renamed = freshen(e, FreshNames(rng.randrange(1000)))
    assert alpha_eq(e, renamed)
    assert nameless(e) == nameless(renamed)


@given(open_exprs(letrec=False), open_exprs(letrec=False))
def test_alpha_matches_nameless_on_letrec_free(a, b):
    assert alpha_eq(a, b) == (nameless(a) == nameless(b))


@given(seeded_exprs(), st.randoms(use_true_random=False))
def test_alpha_invariant_under_binding_permutation(e, rng):
    def shuffle(n):
        if isinstance(n, Letrec):
            bs = list(n.bindings)
            rng.shuffle(bs)
            return Letrec(tuple(bs), n.body)
        return n
    permuted = e
    for p, n in list(positions(e)):
        if isinstance(n, Letrec):
            permuted = replace_at(permuted, p, shuffle(subterm(permuted, p)))
    assert alpha_eq(e, permuted)
    assert alpha_eq(permuted, e)


@given(open_exprs(), open_exprs(), open_exprs())
def test_alpha_is_an_equivalence(a, b, c):
    assert alpha_eq(a, a)
    assert alpha_eq(a, b) == alpha_eq(b, a)
    if alpha_eq(a, b) and alpha_eq(b, c):
        assert alpha_eq(a, c)


@given(open_exprs())
def test_parse_pretty_round_trip(e):
    assert alpha_eq(parse(pretty(e)), e)


@given(seeded_exprs(40))
def test_round_trip_on_generated_terms(e):
    assert alpha_eq(parse(pretty(e)), e)


@given(open_exprs(), st.sampled_from(["x", "y", "z"]))
def test_identity_substitution(e, x):
    assert alpha_eq(subst(e, [(x, Var(x))]), e)


@given(open_exprs(), st.sampled_from(["x", "y"]), seeded_exprs(8))
def test_closed_substitution_matches_naive(e, x, r):
    assert alpha_eq(subst(e, {x: r}), naive_subst(e, x, r))


@given(open_exprs(), st.sampled_from(["x", "y"]), open_exprs(max_leaves=4))
def test_substitution_free_variables(e, x, r):
    out = subst(e, {x: r})
    expect = naive_fv(e) - {x}
    if x in naive_fv(e):
        expect |= naive_fv(r)
    assert free_vars(out) == expect


@given(open_exprs())
def test_canonical_idempotent_and_alpha_equal(e):
    c = canonical(e)
    assert canonical(c) == c
    assert alpha_eq(c, e)


@given(open_exprs())
def test_freshen_gives_distinct_binders(e):
    assert has_distinct_binders(freshen(e, FreshNames.avoiding(e)))


@given(open_exprs(), open_exprs())
def test_fill_free_vars(c_body, e):
    # put a hole under the first lambda or at the root
    hole = next((p + (1,) for p, n in positions(c_body) if isinstance(n, Lam)), ())
    c = parse_context(pretty(replace_at(c_body, hole, parse("[.]", allow_hole=True))))
    assert contains_hole(c.expr)
    assert free_vars(fill(c, e)) <= free_vars(c.expr) | free_vars(e)


@given(seeded_exprs())
def test_subterm_replace_roundtrip(e):
    for p, n in positions(e):
        assert subterm(e, p) is n or subterm(e, p) == n
        assert replace_at(e, p, n) == e


@given(seeded_exprs())
def test_garbage_collection_keeps_free_vars(e):
    g = collect_garbage(e)
    assert free_vars(g) == free_vars(e)
    assert size(g) <= size(e)
    assert collect_garbage(g) == g


def test_letrec_free_flag():
    assert is_letrec_free(omega())
    assert not is_letrec_free(parse("letrec x = x in x"))


def test_fresh_names_avoid_existing():
    e = parse(r"\_f3. _f7", allow_reserved=True)
    assert FreshNames.avoiding(e)() not in {"_f3", "_f7"}
    with pytest.raises(ValueError):
        parse(r"\_f3. _f3")


def test_shuffled_corpus_terms_stay_distinct(corpus):
    rng = random.Random(1)
    for e in rng.sample(corpus, 50):
        assert has_distinct_binders(e)
        assert not free_vars(e)
