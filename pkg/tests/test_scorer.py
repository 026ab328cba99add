import json
import random
from fractions import Fraction

import pytest

from conftest import con, make_problem, obj, write_jsonl
from gen import max_matching_bruteforce, typed_constraint
from lpformulate.canonical import gold_canonical
from lpformulate.ir import normalize, parse_ir
from lpformulate.scorer import Prediction, ScoreError, load_predictions, match_declarations, score


def decls(src):
    return [normalize(d) for d in parse_ir(src)]


def test_identity_match():
    gold = decls("maximize 3x + 4y ; 3x + 4y <= 50 ; x >= 1")
    assert match_declarations(gold, gold) == (3, 0, 0)


def test_one_missing_one_spurious():
    gold = decls("maximize 3x + 4y ; 3x + 4y <= 50 ; x >= 1")
    pred = decls("maximize 3x + 4y ; 3x + 4y <= 50 ; y >= 1")
    assert match_declarations(pred, gold) == (2, 1, 1)


def test_decimal_three_matches_integer_three():
    assert match_declarations(decls("3.0x <= 5"), decls("3x <= 5")) == (1, 0, 0)


def test_no_scale_invariance():
    assert match_declarations(decls("2x <= 10"), decls("x <= 5")) == (0, 1, 1)


def test_duplicates_match_by_multiplicity():
    gold = decls("x <= 5 ; x <= 5")
    assert match_declarations(decls("x <= 5"), gold) == (1, 0, 1)
    assert match_declarations(decls("x <= 5 ; x <= 5 ; x <= 5"), gold) == (2, 1, 0)


def test_unnormalized_rejected():
    with pytest.raises(ScoreError):
        match_declarations(parse_ir("x + 1 <= 5").declarations, [])


def test_matches_bruteforce_oracle():
    rng = random.Random(7)
    pool = [normalize(typed_constraint(rng, 2)[0]) for _ in range(4)]
    for _ in range(300):
        pred = [rng.choice(pool) for _ in range(rng.randint(0, 5))]
        gold = [rng.choice(pool) for _ in range(rng.randint(0, 5))]
        matched, fp, fn = match_declarations(pred, gold)
        assert matched == max_matching_bruteforce(pred, gold)
        assert matched + fp == len(pred) and matched + fn == len(gold)


def two_problems():
    p1 = make_problem("a", "t", [], ["u", "v"], [obj("max", 3, 4), con("<=", 50, 3, 4), con(">=", 1, 1, 0)])
    p2 = make_problem("b", "t", [], ["u"], [obj("min", 2), con(">=", 3, 1)])
    return [p1, p2]


def test_accuracy_fixture():
    golds = two_problems()
    preds = {
        "a": decls("maximize 3x + 4y ; 3x + 4y <= 50 ; x >= 1 ; y <= 7"),
        "b": decls("minimize 2x"),
    }
    report = score(preds, golds)
    assert [(s.D, s.FP, s.FN) for s in report.per_problem] == [(3, 1, 0), (2, 0, 1)]
    assert report.accuracy == Fraction(3, 5)


def test_perfect_and_empty():
    golds = two_problems()
    perfect = {p.id: gold_canonical(p).declarations() for p in golds}
    assert score(perfect, golds).accuracy == 1
    assert score({}, golds).accuracy == 0
    assert score({"a": [], "b": []}, golds).accuracy == 0


def test_accuracy_can_go_negative():
    golds = two_problems()[1:]
    junk = decls("minimize 5x ; x <= 1 ; x <= 2 ; x <= 3 ; x <= 4")
    report = score({"b": junk}, golds)
    assert report.accuracy == 1 - Fraction(5 + 2, 2)


def test_unknown_prediction_id():
    with pytest.raises(ScoreError):
        score({"zzz": []}, two_problems())


def test_order_invariance():
    golds = two_problems()
    preds = {"a": decls("y <= 7 ; x >= 1 ; maximize 3x + 4y"), "b": decls("x >= 3")}
    base = score(preds, golds).accuracy
    rev = {k: list(reversed(v)) for k, v in preds.items()}
    assert score(rev, list(reversed(golds))).accuracy == base


def test_monotone_under_edits(sample_corpus):
    perfect = {p.id: gold_canonical(p).declarations() for p in sample_corpus}
    acc = score(perfect, sample_corpus).accuracy
    assert acc == 1
    spurious = dict(perfect)
    spurious["p001"] = perfect["p001"] + decls("y <= 99")
    assert score(spurious, sample_corpus).accuracy < acc
    dropped = dict(perfect)
    dropped["p002"] = perfect["p002"][1:]
    assert score(dropped, sample_corpus).accuracy < acc


def test_unparsed_segments_count_as_false_positives():
    pred = Prediction.from_ir("maximize 3x + 4y ; 3x + 4y <= 50 ; x >= 1 ; garbage !!")
    report = score({"a": pred}, two_problems()[:1])
    s = report.per_problem[0]
    assert (s.matched, s.FP, s.FN, s.unparsed) == (3, 1, 0, 1)


def test_load_predictions_both_formats(tmp_path):
    golds = two_problems()
    path = write_jsonl(tmp_path / "pred.jsonl", [
        {"id": "a", "ir": "maximize 3x + 4y ; x >= 1 ; 3x + 4y <= 50"},
        {"id": "b", "canonical": gold_canonical(golds[1]).to_record()},
    ])
    assert score(load_predictions(path), golds).accuracy == 1


@pytest.mark.parametrize("line", ['{"ir": "x <= 1"}', '{"id": "a"}', "{nope", '{"id": "a", "ir": 3}'])
def test_load_predictions_errors(tmp_path, line):
    path = tmp_path / "p.jsonl"
    path.write_text(line + "\n")
    with pytest.raises(ScoreError, match="line 1"):
        load_predictions(path)


def test_report_record_and_table():
    report = score({}, two_problems())
    rec = report.to_record()
    assert rec["accuracy"] == 0.0 and rec["accuracy_exact"] == "0" and rec["D"] == 5
    json.dumps(rec)
    assert "accuracy = 0.0000" in report.table()
