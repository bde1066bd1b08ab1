import pytest
from hypothesis import given

from hybridtab.semantics import evaluate
from hybridtab.syntax import (And, check_namespaces, At, Box, Dia, Neg, NamespaceError, Nom, Or,
                              ParseError, Prop, complement, fresh_nominal,
                              is_nnf, modal_depth, nominals, parse, props,
                              size, subformulas, to_nnf, to_text)
from strategies import NOMS, formulas, models

p, q = Prop("p"), Prop("q")
i, j = Nom("i"), Nom("j")


def test_parse_precedence_and_implication():
    assert parse("<>j & @j p -> <>p", nominals=["j"]) == \
        Or(Neg(And(Dia(j), At("j", p))), Dia(p))
    assert parse("p | q & p") == Or(p, And(q, p))
    assert parse("p -> q -> p") == Or(Neg(p), Or(Neg(q), p))


def test_parse_aliases():
    ascii_ = parse("~<>[]@i p", nominals=["i"])
    assert parse("¬◇□@_i p") == ascii_
    assert parse("!<>[]@i p") == ascii_


def test_identifiers_after_at_are_nominals_everywhere():
    assert parse("i & @i p") == And(i, At("i", p))


def test_iff_desugars():
    assert parse("p <-> q") == And(Or(Neg(p), q), Or(Neg(q), p))


@pytest.mark.parametrize("text, pos", [("p &", 3), ("p $ q", 2), ("(p", 2), ("@ & p", 2)])
def test_parse_errors_report_position(text, pos):
    with pytest.raises(ParseError) as err:
        parse(text)
    assert err.value.position == pos


def test_reserved_names_rejected_unless_allowed():
    with pytest.raises(ParseError):
        parse("n0 & p")
    assert parse("@n0 p", allow_reserved=True) == At("n0", p)


def test_namespace_clash():
    with pytest.raises(NamespaceError):
        parse("@p q", props=["p"])
    with pytest.raises(NamespaceError):
        check_namespaces(And(p, Nom("p")))
    with pytest.raises(NamespaceError):
        parse("p", nominals=["p"], props=["p"])


@given(formulas)
def test_print_parse_round_trip(f):
    for uni in (False, True):
        assert parse(to_text(f, uni), nominals=NOMS) == f


@given(formulas, models())
def test_nnf_is_equivalent(f, m):
    g = to_nnf(f)
    assert is_nnf(g)
    for w in m.worlds:
        assert evaluate(m, w, g) == evaluate(m, w, f)


@given(formulas, models())
def test_complement_negates(f, m):
    g = complement(to_nnf(f))
    assert is_nnf(g)
    for w in m.worlds:
        assert evaluate(m, w, g) != evaluate(m, w, f)


def test_nnf_moves_negation_through_at():
    assert to_nnf(Neg(At("i", Box(p)))) == At("i", Dia(Neg(p)))
    assert to_nnf(Neg(Neg(j))) == j


def test_subformulas_reflexive_and_complete():
    f = And(Dia(p), Box(Dia(p)))
    assert subformulas(f) == {f, Dia(p), Box(Dia(p)), p}


def test_measures():
    f = At("j", And(Box(Dia(p)), Neg(i)))
    assert nominals(f) == ("j", "i")
    assert props(f) == ("p",)
    assert modal_depth(f) == 2
    assert size(f) == 7


def test_fresh_nominal():
    assert fresh_nominal(["i", "j"]) == "n0"
    assert fresh_nominal(["n0", "n4", "k"]) == "n5"


def test_formulas_are_immutable_and_hashable():
    f = And(p, q)
    with pytest.raises(AttributeError):
        f.left = q
    assert len({And(p, q), And(p, q), Or(p, q)}) == 2
    assert At("i", p) == At(i, p)
