import itertools

import pytest
from hypothesis import given

from lazybench.inftree import (BOT_L, NoRedexFound, TreeAnswer, TreeReduced, it_label, label_at,
                               prefix, tree_converges, tree_eq_upto, tree_of, tree_step,
                               trees_eq_upto)
from lazybench.name import evaluate_name
from lazybench.parsing import parse
from lazybench.syntax import (App, Case, Constr, FreshNames, Lam, Letrec, Seq, Var, freshen,
                              omega)

from strategies import seeded_exprs

EXAMPLE = r"letrec x = x, y = (\z. z) x y in y"


def naive_label(e, p):
    """Direct unfolding: resolve letrec variables by looking up the right
    hand side in its own scope; a variable chain that revisits a name is Bot."""
    env = {}
    cur = e
    rest = list(p)
    while True:
        seen = set()
        while True:
            if isinstance(cur, Letrec):
                group = dict(env)
                for x, r in cur.bindings:
                    group[x] = (r, group)
                env = group
                cur = cur.body
            elif isinstance(cur, Var) and isinstance(env.get(cur.name), tuple):
                if cur.name in seen:
                    return "Bot"
                seen.add(cur.name)
                cur, env = env[cur.name]
            else:
                break
        if isinstance(cur, Var):
            label, kids = cur.name, []
        elif isinstance(cur, App):
            label, kids = "@", [cur.fun, cur.arg]
        elif isinstance(cur, Seq):
            label, kids = "seq", [cur.first, cur.second]
        elif isinstance(cur, Lam):
            label, kids = "λ" + cur.var, [cur.body]
            env = {k: v for k, v in env.items() if k != cur.var}
        elif isinstance(cur, Constr):
            label, kids = cur.name, list(cur.args)
        elif isinstance(cur, Case):
            label, kids = "case_" + cur.type, [cur.scrut] + list(cur.alts)
        else:  # an alternative
            label, kids = "(" + " ".join((cur.constr,) + cur.vars) + ")", [cur.body]
            env = {k: v for k, v in env.items() if k not in cur.vars}
        if not rest:
            return label
        i = rest.pop(0)
        if not 1 <= i <= len(kids):
            return None
        cur = kids[i - 1]


def test_example_tree_labels():
    e = parse(EXAMPLE)
    expected = {(): "@", (1,): "@", (1, 1): "λz", (1, 2): "Bot", (2,): "@"}
    for p, lab in expected.items():
        assert str(it_label(e, p)) == lab
        assert str(label_at(tree_of(e), p)) == lab


def test_invalid_position():
    assert it_label(parse("True"), (9, 9, 9)) is None
    assert label_at(tree_of(parse("True")), (1,)) is None


def test_self_loop_is_bot():
    t = tree_of(parse("letrec x = x in x"))
    assert t.head == BOT_L
    assert not tree_converges(parse("letrec x = x in x")).converged


def test_omega_head_is_application():
    assert str(tree_of(omega()).head) == "@"
    assert tree_converges(omega()).reason == "omega"


def test_running_example_converges():
    assert tree_converges(parse(r"letrec x = (y \u.u), y = \z.z in x")).converged


def test_looping_binding_never_answers():
    o = tree_converges(parse(r"letrec y = (\x. y) a in y"), step_budget=300)
    assert not o.converged and not o.definitive


def test_beta_step():
    r = tree_step(tree_of(parse(r"(\x. x) True")))
    assert isinstance(r, TreeReduced) and r.rule == "betaTr"
    assert str(r.tree.head) == "True"
    assert isinstance(tree_step(r.tree), TreeAnswer)


def test_bot_in_reduction_position():
    assert isinstance(tree_step(tree_of(parse("letrec x = x in x True"))), NoRedexFound)


def test_alpha_trees():
    for d in range(5):
        assert tree_eq_upto(parse(r"\x. x"), parse(r"\y. y"), d)
    assert not tree_eq_upto(parse(r"\x. \y. x"), parse(r"\x. \y. y"), 3)


def test_prefix_rendering():
    text = str(prefix(tree_of(parse(EXAMPLE)), 1))
    assert text.splitlines() == ["ε: @", "1: @", "2: @"]
    assert list(prefix(tree_of(parse("True")), 0).labels) == [()]
    with pytest.raises(ValueError):
        prefix(tree_of(parse("True")), -1)


def _positions_upto(t, d):
    return prefix(t, d).labels


@given(seeded_exprs(30, closed=False))
def test_labels_match_naive_unfolding(e):
    for p, lab in _positions_upto(tree_of(e), 5).items():
        want = naive_label(e, p)
        assert str(lab) == want or (want is not None and want.startswith("λ") and lab.kind == "lam")
        assert str(it_label(e, p)) == str(lab)


@given(seeded_exprs(30, closed=False))
def test_navigation_agrees_with_positional_oracle(e):
    t = tree_of(e)
    for p in itertools.chain([()], *(itertools.product((1, 2, 3), repeat=n) for n in (1, 2, 3))):
        assert str(label_at(t, p)) == str(it_label(e, p))


@given(seeded_exprs(30))
def test_prefix_monotone(e):
    t = tree_of(e)
    for d in range(4):
        small, big = prefix(t, d).labels, prefix(t, d + 1).labels
        assert all(big[p] == small[p] for p in small)


@given(seeded_exprs(30))
def test_tree_equality_reflexive_and_alpha_invariant(e):
    renamed = freshen(e, FreshNames(500))
    assert trees_eq_upto(tree_of(e), tree_of(renamed), 6)


@given(seeded_exprs(25))
def test_name_beta_is_one_tree_step(e):
    cur = [e]

    def check(n, rule, redex, nxt):
        if rule in ("beta", "case", "seq-c"):
            r = tree_step(tree_of(cur[0]))
            assert isinstance(r, TreeReduced)
            assert trees_eq_upto(r.tree, tree_of(nxt), 5)
        cur[0] = nxt

    evaluate_name(e, max_steps=60, trace=check)
