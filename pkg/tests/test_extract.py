import pytest
from hypothesis import given, strategies as st

from hybridtab.engine import decide, satisfy
from hybridtab.extract import (ExtractionError, check_truth_lemma, extract,
                               named_worlds, reflexive_transitive_closure,
                               transitive_closure, warshall_closure)
from hybridtab.engine import Branch
from hybridtab.calculi import TAB_I4
from hybridtab.syntax import parse

edges = st.sets(st.tuples(st.integers(0, 4), st.integers(0, 4)), max_size=10)


@given(edges)
def test_closures_agree(es):
    ws = range(5)
    assert transitive_closure(ws, es) == warshall_closure(ws, es)
    assert reflexive_transitive_closure(ws, es) == warshall_closure(ws, es, True)


def test_closure_examples():
    assert transitive_closure("abc", {("a", "b"), ("b", "c")}) == \
        {("a", "b"), ("b", "c"), ("a", "c")}
    assert transitive_closure("ab", {("a", "b"), ("b", "a")}) == \
        {("a", "b"), ("b", "a"), ("a", "a"), ("b", "b")}


def test_reflexive_point_from_twin_blocking():
    d = satisfy(parse("@i (<>p & []<>p)"), "i4")
    em = extract(d.branch)
    assert em.worlds == ("i", "n0")
    assert em.rel == {("i", "n0"), ("n0", "n0")}
    assert em.r_e == em.rel
    assert em.model.props == {"p": {"n0"}}
    assert em.urfather_map == {"i": "i", "n0": "n0", "n1": "n0"}
    assert em.closure == "transitive"
    assert check_truth_lemma(d.branch, em)
    assert named_worlds(d.branch, em) == {"i"}


def test_partial_order_extraction_is_reflexive():
    d = decide(parse("[]p -> p & q"), "po")
    em = extract(d.branch)
    assert em.closure == "reflexive-transitive"
    assert all((w, w) in em.rel for w in em.worlds)


def test_k_extraction_merges_equated_nominals():
    d = decide(parse("@i j & @i p -> @j q"), "k")
    em = extract(d.branch)
    assert em.variant == "K"
    assert em.world_of("i") == em.world_of("j")
    assert check_truth_lemma(d.branch, em)


def test_rejects_unsaturated_and_closed_branches():
    b = Branch(parse("@i (<>p & []<>p)"), TAB_I4)
    with pytest.raises(ExtractionError):
        extract(b)
    d = decide(parse("p -> p"), "i4")
    with pytest.raises(ExtractionError):
        extract(d.tableau.leaves()[0].branch)
