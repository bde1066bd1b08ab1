import json

import pytest
from hypothesis import given

from hybridtab.semantics import (FrameClass, KripkeModel, ModelError,
                                 OracleBudgetExceeded, class_frames,
                                 dump_model, evaluate, extension, load_model,
                                 oracle_countermodel, relation_class_check)
from hybridtab.syntax import parse
from strategies import formulas, models

chain = KripkeModel(("a", "b", "c"), {("a", "b"), ("b", "c"), ("a", "c")},
                    {"p": {"c"}}, {"i": "a"})


def test_evaluate_examples():
    assert evaluate(chain, "a", parse("<><>p"))
    assert not evaluate(chain, "b", parse("<><>p"))
    assert evaluate(chain, "c", parse("@i <>p"))
    assert evaluate(chain, "c", parse("[]q"))
    assert not evaluate(chain, "a", parse("q"))


def test_evaluate_errors():
    with pytest.raises(ModelError):
        evaluate(chain, "a", parse("@k p"))
    with pytest.raises(ModelError):
        evaluate(chain, "z", parse("p"))
    with pytest.raises(ModelError):
        KripkeModel(("a",), {("a", "b")})


@given(formulas, models())
def test_extension_agrees_with_evaluate(f, m):
    ext = extension(m, f)
    assert ext == {w for w in m.worlds if evaluate(m, w, f)}


def test_class_checks_and_witnesses():
    assert relation_class_check(chain, FrameClass.SPO)
    report = relation_class_check(chain, FrameClass.USPO)
    assert [c.name for c in report.failures] == ["serial"]
    assert report.failures[0].witness == ("c",)
    loop = KripkeModel(("a", "b"), {("a", "b"), ("b", "a")})
    report = relation_class_check(loop, FrameClass.SPO)
    assert {c.name for c in report.failures} == {"transitive"}
    assert len(report.failures[0].witness) == 3


@pytest.mark.parametrize("cls", [FrameClass.SPO, FrameClass.PO])
def test_frame_enumeration_counts_posets(cls):
    # unlabelled posets on 1..4 elements
    assert [len(class_frames(n, cls)) for n in range(1, 5)] == [1, 2, 5, 16]


def test_frame_enumeration_guard():
    with pytest.raises(OracleBudgetExceeded):
        class_frames(5, FrameClass.ALL)
    assert class_frames(1, FrameClass.USPO) == ()


def test_oracle():
    m, w = oracle_countermodel(parse("[]p -> p"), FrameClass.SPO, 2)
    assert not evaluate(m, w, parse("[]p -> p"))
    assert oracle_countermodel(parse("[]p -> p"), FrameClass.PO, 3) is None
    assert oracle_countermodel(parse("[]p -> [][]p"), FrameClass.SPO, 3) is None
    assert oracle_countermodel(parse("[]p -> [][]p"), FrameClass.ALL, 3) is not None
    assert oracle_countermodel(parse("@i []~i"), FrameClass.SPO, 3) is None
    with pytest.raises(OracleBudgetExceeded):
        oracle_countermodel(parse("[]p -> [][]p"), FrameClass.ALL, 3, budget=5)


def test_model_json_round_trip():
    m = KripkeModel(("a", ("b", 1)), {("a", ("b", 1))}, {"p": {("b", 1)}},
                    {"i": "a"})
    text = dump_model(m)
    assert load_model(text) == m
    doc = json.loads(text)
    assert doc["rel"] == [["a", ["b", 1]]]
    assert text.endswith("\n")
