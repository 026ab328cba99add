"""Exit criteria. Each test prints one ``ACCEPT <name>: PASS|FAIL`` line.

Run alone with ``pytest tests/test_acceptance.py -v``.
"""
import contextlib
import random
import subprocess
import sys
import time
from fractions import Fraction as F

import numpy as np
import pytest

from conftest import SAMPLE, con, make_problem, obj
from gen import binomial_interval, max_matching_bruteforce, must_precede, rand_document, rand_objective, typed_constraint
from lpformulate.augment import AugmentConfig, augment_corpus, count_rewrites, find_eligible
from lpformulate.canonical import (
    ConstraintType,
    Row,
    canonicalize_gold,
    classify,
    gold_canonical,
    sort_declarations,
    to_canonical,
)
from lpformulate.corpus import dumps_problem, load_corpus
from lpformulate.embed import N_TAGS, EmbeddingTables, baseline_compose, compose
from lpformulate.ir import Constraint, IrDocument, Op, normalize, parse_ir, print_ir
from lpformulate.scorer import match_declarations, score

ORDERING_CASES = 1000
ORDERING_BUDGET_S = 10.0
ROUND_TRIP_CASES = 1000
MATCHING_CASES = 500
EMBED_CASES = 100
EMBED_ATOL = 1e-12
BINOMIAL_SITES = 1000
BINOMIAL_COVERAGE = "0.9999"
FIDELITY_BUDGET_S = 0.1


@pytest.fixture
def verdict(capsys):
    @contextlib.contextmanager
    def check(name):
        try:
            yield
        except BaseException as exc:
            with capsys.disabled():
                print(f"\nACCEPT {name}: FAIL ({type(exc).__name__}: {exc})")
            raise
        with capsys.disabled():
            print(f"\nACCEPT {name}: PASS")
    return check


def test_worked_example_fidelity(verdict):
    with verdict("worked example fidelity"):
        t0 = time.perf_counter()
        [decl] = parse_ir("3x + 4y <= 50").declarations
        assert decl.lhs.mapping == {"x": 3, "y": 4}
        assert decl.op is Op.LE
        assert decl.rhs.constant == 50 and decl.rhs.is_constant()

        doc = parse_ir("3x + 4y <= 50 ; maximize 3x + 4y")
        types = [classify(normalize(c)) for c in doc.constraints]
        ordered = sort_declarations(doc, types, [0])
        form = to_canonical(ordered, 2)
        assert form.rows == (Row((F(3), F(4)), Op.LE, F(50)),)

        p = make_problem("ex", "cakes and pies", [("VAR", "cakes"), ("VAR", "pies")], ["cakes", "pies"],
                         [obj("max", 3, 4), con("<=", 50, 3, 4)])
        assert print_ir(canonicalize_gold(p)) == "maximize 3x + 4y ; 3x + 4y <= 50"
        assert gold_canonical(p).rows == form.rows
        assert time.perf_counter() - t0 < FIDELITY_BUDGET_S


def test_accuracy_oracle_fixture(verdict):
    with verdict("accuracy oracle fixture"):
        golds = [
            make_problem("a", "t", [], ["u", "v"], [obj("max", 3, 4), con("<=", 50, 3, 4), con(">=", 1, 1, 0)]),
            make_problem("b", "t", [], ["u"], [obj("min", 2), con(">=", 3, 1)]),
        ]
        engineered = {
            "a": [normalize(d) for d in parse_ir("maximize 3x + 4y ; 3x + 4y <= 50 ; x >= 1 ; y <= 7")],
            "b": [normalize(d) for d in parse_ir("minimize 2x")],
        }
        report = score(engineered, golds)
        assert [(s.D, s.FP, s.FN) for s in report.per_problem] == [(3, 1, 0), (2, 0, 1)]
        assert report.accuracy == F(3, 5)
        perfect = {p.id: gold_canonical(p).declarations() for p in golds}
        assert score(perfect, golds).accuracy == 1
        assert score({"a": [], "b": []}, golds).accuracy == 0


def test_ordering_property_suite(verdict):
    with verdict("ordering property suite"):
        rng = random.Random(20221)
        t0 = time.perf_counter()
        for _ in range(ORDERING_CASES):
            n_vars = rng.randint(1, 4)
            items = [typed_constraint(rng, n_vars) for _ in range(rng.randint(0, 8))]
            cons = [d for d, _ in items]
            types = [classify(d, ratio_origin=r) for d, r in items]
            positions = list(range(len(cons)))
            rng.shuffle(positions)
            objective = rand_objective(rng, n_vars)
            decls = [*cons]
            decls.insert(rng.randint(0, len(decls)), objective)
            doc = IrDocument(tuple(decls))
            out = sort_declarations(doc, types, positions)

            meta = {id(d): (t, p) for d, t, p in zip(cons, types, positions)}
            triples = [(d, *meta.get(id(d), (None, None))) for d in out]
            for i in range(len(triples)):
                for j in range(i + 1, len(triples)):
                    assert not must_precede(triples[j], triples[i])

            again_meta = [meta[id(d)] for d in out if isinstance(d, Constraint)]
            assert sort_declarations(out, [m[0] for m in again_meta], [m[1] for m in again_meta]) == out

            perm = list(range(len(cons)))
            rng.shuffle(perm)
            shuffled = IrDocument((*[cons[k] for k in perm], objective))
            assert sort_declarations(shuffled, [types[k] for k in perm], [positions[k] for k in perm]) == out
        assert time.perf_counter() - t0 < ORDERING_BUDGET_S


def test_round_trip_property(verdict, sample_corpus):
    with verdict("round-trip property"):
        rng = random.Random(4242)
        for _ in range(ROUND_TRIP_CASES):
            doc = rand_document(rng)
            assert parse_ir(print_ir(doc)) == doc
        corpus = augment_corpus(sample_corpus, AugmentConfig(p=1.0, seed=0))
        for p in corpus:
            assert to_canonical(parse_ir(print_ir(canonicalize_gold(p))), p.variables) == gold_canonical(p)


def test_matching_oracle(verdict):
    with verdict("matching oracle"):
        rng = random.Random(31337)
        for _ in range(MATCHING_CASES):
            n_vars = rng.randint(1, 2)
            pool = [normalize(typed_constraint(rng, n_vars)[0]) for _ in range(rng.randint(1, 4))]
            pool.append(rand_objective(rng, n_vars))
            pred = [rng.choice(pool) for _ in range(rng.randint(0, 5))]
            gold = [rng.choice(pool) for _ in range(rng.randint(0, 5))]
            matched, fp, fn = match_declarations(pred, gold)
            assert matched == max_matching_bruteforce(pred, gold)
            assert (fp, fn) == (len(pred) - matched, len(gold) - matched)


def _site_corpus(n_sites):
    clauses = [f"Item{k} cannot exceed {10 + k}." for k in range(4)]
    problems, i = [], 0
    while n_sites:
        k = min(4, n_sites)
        marks = [("CONST_DIR", "cannot", j, j) for j in range(k)]
        gold = [obj("max", *([1] * k))] + [con("<=", 10 + j, *[int(j == v) for v in range(k)]) for j in range(k)]
        problems.append(make_problem(f"s{i}", " ".join(clauses[:k]), marks, [f"v{j}" for j in range(k)], gold))
        n_sites -= k
        i += 1
    return problems


def test_augmentation_suite(verdict, sample_corpus):
    with verdict("augmentation suite"):
        assert augment_corpus(sample_corpus, AugmentConfig(p=0.0, seed=5)) == list(sample_corpus)

        full = augment_corpus(sample_corpus, AugmentConfig(p=1.0, seed=5))
        variants = full[len(sample_corpus):]
        assert variants and all(find_eligible(v) == [] for v in variants)
        for p in full:
            assert all(p.text[t.start:t.end] == t.surface for t in p.tags)

        corpus = _site_corpus(BINOMIAL_SITES)
        assert sum(len(find_eligible(p)) for p in corpus) == BINOMIAL_SITES
        lo, hi = binomial_interval(BINOMIAL_SITES, "0.3", BINOMIAL_COVERAGE)
        assert (lo, hi) == (245, 357)
        out = augment_corpus(corpus, AugmentConfig(p=0.3, seed=2022))
        originals = {p.id: p for p in corpus}
        rewritten = sum(count_rewrites(originals[v.id.split("#")[0]], v) for v in out[len(corpus):])
        for p in out:
            assert all(p.text[t.start:t.end] == t.surface for t in p.tags)
        assert lo <= rewritten <= hi, rewritten

        cfg = AugmentConfig(p=0.3, seed=7)
        first = "\n".join(dumps_problem(p) for p in augment_corpus(load_corpus(SAMPLE), cfg))
        second = "\n".join(dumps_problem(p) for p in augment_corpus(load_corpus(SAMPLE), cfg))
        assert first == second


def test_embedding_contract(verdict):
    with verdict("embedding contract"):
        rng = np.random.default_rng(2022)

        def frac_matrix(shape):
            num = rng.integers(-9, 10, size=shape)
            den = rng.integers(1, 6, size=shape)
            return np.array([[F(int(a), int(b)) for a, b in zip(r1, r2)] for r1, r2 in zip(num, den)], dtype=object)

        for _ in range(EMBED_CASES):
            d, vocab, max_len = (int(v) for v in rng.integers(1, 6, size=3))
            tables = EmbeddingTables(frac_matrix((vocab, d)), frac_matrix((max_len, d)),
                                     lam=F(int(rng.integers(0, 20)), 2))
            n = int(rng.integers(0, max_len + 1))
            tokens = rng.integers(0, vocab, size=n)
            tags = rng.integers(0, N_TAGS, size=n)
            assert (compose(tables, tokens, tags) == baseline_compose(tables, tokens)).all()

        real = EmbeddingTables(rng.normal(size=(64, 32)), rng.normal(size=(48, 32)))
        real = real.with_tag(rng.normal(size=(N_TAGS, 32)))
        tokens = rng.integers(0, 64, size=48)
        tags = rng.integers(0, N_TAGS, size=48)
        for l1, l2 in [(0.5, 4.5), (1.0, 5.0), (2.25, 0.125)]:
            lhs = compose(real, tokens, tags, l1) + compose(real, tokens, tags, l2) - compose(real, tokens, tags, 0.0)
            assert np.max(np.abs(lhs - compose(real, tokens, tags, l1 + l2))) <= EMBED_ATOL

        one = np.array([[F(1), F(0)]], dtype=object)
        pos = np.array([[F(0), F(1)]], dtype=object)
        hand = EmbeddingTables(one, pos, n_tags=2, lam=2).with_tag(np.array([[F(0), F(0)], [F(1), F(1)]], dtype=object))
        assert compose(hand, [0], [1]).tolist() == [[3, 3]]


def test_defaults_in_help(verdict):
    with verdict("lambda=5 and p=0.3 defaults in --help"):
        top = subprocess.run([sys.executable, "-m", "lpformulate", "--help"], capture_output=True, text=True)
        assert top.returncode == 0
        assert "--p 0.3" in top.stdout and "--lambda 5" in top.stdout
        aug = subprocess.run([sys.executable, "-m", "lpformulate", "augment", "--help"],
                             capture_output=True, text=True).stdout
        emb = subprocess.run([sys.executable, "-m", "lpformulate", "embed-check", "--help"],
                             capture_output=True, text=True).stdout
        assert "(default: 0.3)" in aug and "(default: 5)" in emb
