"""Loop checking on scripted branches of TAB + [Trs] + (D)."""

import pytest

from hybridtab.calculi import TAB, RuleInstance, is_applicable
from hybridtab.engine import Branch
from hybridtab.loopcheck import (TSetVariant, dump_tsets, generation_graph,
                                 identity_urfather, quasi_urfather, t_set,
                                 twins, urfather_map)
from hybridtab.syntax import Box, Dia, Neg, Nom, Prop, parse

TRS_D = TAB.with_rules(add=["trs"], restriction_d=True)
p = Prop("p")


def fire(b: Branch, tag: str, *premises: int) -> None:
    inst = RuleInstance(tag, premises)
    assert is_applicable(b, inst), (tag, premises)
    b.fire(inst)


def dia_at(b: Branch, n: int) -> RuleInstance:
    return RuleInstance("dia", (n,))


def first_ten(b: Branch) -> None:
    """The shared start of both runs: i -> n0 -> n1, with p, <>p at n1."""
    fire(b, "and", 0)         # 1 @i<>p, 2 @i[]<>p
    fire(b, "dia", 1)         # 3 @i<>n0*, 4 @n0 p
    fire(b, "box", 2, 3)      # 5 @n0 <>p
    fire(b, "trs", 2, 3)      # 6 @n0 []<>p
    fire(b, "dia", 5)         # 7 @n0<>n1*, 8 @n1 p
    fire(b, "box", 6, 7)      # 9 @n1 <>p


@pytest.fixture
def branch():
    b = Branch(parse("@i (<>p & []<>p)"), TRS_D)
    first_ten(b)
    return b


def test_scripted_prefix(branch):
    assert [(e.prefix, e.payload) for e in branch.entries[7:10]] == [
        ("n0", Dia(Nom("n1"))), ("n1", p), ("n1", Dia(p))]
    assert branch.parent == {"n0": "i", "n1": "n0"}


def test_twins_block_diamond_on_third_generation(branch):
    assert is_applicable(branch, dia_at(branch, 9))
    fire(branch, "trs", 6, 7)  # 10 @n1 []<>p
    assert twins(branch, "n0", "n1")
    assert t_set(branch, "n1") == {p, Dia(p), Box(Dia(p))}
    assert not quasi_urfather(branch, "n1")
    assert quasi_urfather(branch, "n0")
    assert not is_applicable(branch, dia_at(branch, 9))
    assert identity_urfather(branch, "n1") == "n0"
    assert urfather_map(branch) == {"i": "i", "n0": "n0", "n1": "n0"}


def test_reordering_only_postpones_the_block(branch):
    fire(branch, "dia", 9)       # 10 @n1<>n2*, 11 @n2 p
    fire(branch, "trs", 6, 7)    # 12 @n1 []<>p
    fire(branch, "box", 12, 10)  # 13 @n2 <>p
    assert branch.entries[13].prefix == "n2"
    assert twins(branch, "n0", "n1")
    assert not quasi_urfather(branch, "n2")
    assert not is_applicable(branch, dia_at(branch, 13))


def test_without_restriction_the_branch_keeps_growing():
    from hybridtab.engine import Status
    b = Branch(parse("@i (<>p & []<>p)"), TAB.with_rules(add=["trs"]))
    status, _ = b.run(budget=200)
    assert status is Status.BUDGET
    assert len(b.nominal_order) > 20


def test_generation_graph_is_forest(branch):
    g = generation_graph(branch)
    assert g.edges == (("i", "n0"), ("n0", "n1"))
    assert g.shape_violations() == []
    dot = g.to_dot()
    assert dot.startswith("digraph generation {") and '"n0" -> "n1";' in dot


def test_shape_violations_detect_cycles_and_double_parents():
    from hybridtab.loopcheck import GenerationGraph
    g = GenerationGraph(("a", "b", "c"), (("a", "b"), ("c", "b"), ("b", "a")))
    problems = g.shape_violations()
    assert any("2 parents" in s for s in problems)
    assert any("cycle" in s for s in problems)


def test_signature_variants_include_extra_formulas():
    from hybridtab.engine import decide
    d = decide(parse("[]p -> p"), "i4")
    b = d.branch
    root = b.root.prefix
    extras = {Nom(root), Box(Neg(Nom(root)))}
    assert t_set(b, root).t2 == extras
    # the partial-order variant draws on a different extra formula
    assert t_set(b, root, TSetVariant.PO).t2 == extras
    assert dump_tsets(b).startswith(f"T({root}) = {{")


def test_incremental_signatures_match_recomputation():
    from hybridtab.engine import decide
    for cal in ("i4", "i4d", "po"):
        d = decide(parse("[]([]p -> p) -> []p"), cal)
        b = d.branch or d.tableau.leaves()[0].branch
        for i in b.nominal_order:
            assert b.tsets.get(i) == t_set(b, i).members
