import json
from pathlib import Path

import pytest

from lpformulate.corpus import load_corpus, problem_from_record

DATA = Path(__file__).parent / "data"
SAMPLE = DATA / "lpwp_sample.jsonl"


def locate(text, surface, occurrence=0):
    """Character span of the ``occurrence``-th appearance of ``surface``."""
    start = -1
    for _ in range(occurrence + 1):
        start = text.index(surface, start + 1)
    return start, start + len(surface)


def make_record(pid, text, marks, variables, gold, order_hints=None):
    """Record dict with spans computed from ``(label, surface[, occurrence[, link]])`` marks."""
    tags = []
    for mark in marks:
        label, surface = mark[0], mark[1]
        occurrence = mark[2] if len(mark) > 2 else 0
        start, end = locate(text, surface, occurrence)
        tag = {"label": label, "start": start, "end": end}
        if len(mark) > 3 and mark[3] is not None:
            tag["constraint"] = mark[3]
        tags.append(tag)
    tags.sort(key=lambda t: t["start"])
    rec = {"id": pid, "text": text, "tags": tags, "variables": variables, "gold": gold}
    if order_hints is not None:
        rec["order_hints"] = order_hints
    return rec


def obj(direction, *coeffs):
    return {"kind": "objective", "direction": direction, "coeffs": [str(c) for c in coeffs]}


def con(op, rhs, *coeffs, type=None):
    rec = {"kind": "constraint", "coeffs": [str(c) for c in coeffs], "op": op, "rhs": str(rhs)}
    if type is not None:
        rec["type"] = type
    return rec


def make_problem(*args, **kwargs):
    return problem_from_record(make_record(*args, **kwargs))


def write_jsonl(path, records):
    path.write_text("".join(json.dumps(r, ensure_ascii=False) + "\n" for r in records), encoding="utf-8")
    return path


@pytest.fixture(scope="session")
def sample_corpus():
    return load_corpus(SAMPLE)


@pytest.fixture
def bakery():
    text = ("A bakery makes cakes and pies. Each cake earns $3 and each pie earns $4. "
            "Cakes take 3 hours and pies take 4 hours, and there are 50 hours available. "
            "The bakery cannot make more than 10 cakes. How many of each maximize profit?")
    marks = [
        ("VAR", "cakes"), ("VAR", "pies"), ("PARAM", "3"), ("PARAM", "4"),
        ("LIMIT", "50"), ("CONST_DIR", "cannot", 0, 1), ("LIMIT", "10"),
        ("OBJ_DIR", "maximize"), ("OBJ_NAME", "profit"),
    ]
    gold = [obj("max", 3, 4), con("<=", 50, 3, 4), con("<=", 10, 1, 0)]
    return make_problem("bakery", text, marks, ["cakes", "pies"], gold)
