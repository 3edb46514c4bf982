import pytest

from lazybench.corpus import gen_corpus
from lazybench.parsing import parse
from lazybench.syntax import alpha_eq, free_vars, has_distinct_binders, pretty, size


def test_same_seed_same_corpus():
    a = gen_corpus(seed=7, count=50)
    b = gen_corpus(seed=7, count=50)
    assert [pretty(e) for e in a] == [pretty(e) for e in b]
    assert [pretty(e) for e in gen_corpus(seed=8, count=50)] != [pretty(e) for e in a]


def test_shape(corpus):
    assert len(corpus) == 500
    for e in corpus:
        assert size(e) <= 40
        assert not free_vars(e)
        assert has_distinct_binders(e)


def test_printed_terms_reparse(corpus):
    for e in corpus[:100]:
        assert alpha_eq(parse(pretty(e)), e)


def test_open_terms_use_reserved_free_names():
    names = set()
    for e in gen_corpus(seed=1, count=200, closed_only=False):
        names |= free_vars(e)
    assert names and names <= {"a", "b", "c"}


def test_bad_count():
    with pytest.raises(ValueError):
        gen_corpus(count=0)
