"""Declaration-level mapping accuracy.

accuracy = 1 - (sum(FP) + sum(FN)) / sum(D)

A predicted declaration matches a gold one only if, after normalization,
direction or operator, every coefficient, and the constant are equal as
rationals. ``2x <= 10`` does not match ``x <= 5``.
"""
from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .canonical import CanonicalForm, gold_canonical
from .corpus import Problem
from .ir import (
    ALIASES,
    Constraint,
    IrDecl,
    IrError,
    LinearExpr,
    Objective,
    normalize,
    parse_declaration,
    split_declarations,
)


class ScoreError(ValueError):
    pass


@dataclass(frozen=True)
class ProblemScore:
    id: str
    D: int
    FP: int
    FN: int
    matched: int
    unparsed: int = 0


@dataclass(frozen=True)
class ScoreReport:
    per_problem: tuple[ProblemScore, ...]
    accuracy: Fraction

    @property
    def totals(self) -> dict[str, int]:
        return {
            "D": sum(s.D for s in self.per_problem),
            "FP": sum(s.FP for s in self.per_problem),
            "FN": sum(s.FN for s in self.per_problem),
            "matched": sum(s.matched for s in self.per_problem),
        }

    def to_record(self) -> dict:
        return {
            "accuracy": float(self.accuracy),
            "accuracy_exact": str(self.accuracy),
            **self.totals,
            "problems": [
                {"id": s.id, "D": s.D, "FP": s.FP, "FN": s.FN, "matched": s.matched, "unparsed": s.unparsed}
                for s in self.per_problem
            ],
        }

    def table(self) -> str:
        lines = [f"{'id':<24} {'D':>4} {'FP':>4} {'FN':>4} {'match':>6}"]
        for s in self.per_problem:
            lines.append(f"{s.id:<24} {s.D:>4} {s.FP:>4} {s.FN:>4} {s.matched:>6}")
        t = self.totals
        lines.append(f"{'TOTAL':<24} {t['D']:>4} {t['FP']:>4} {t['FN']:>4} {t['matched']:>6}")
        lines.append(f"accuracy = {float(self.accuracy):.4f} ({self.accuracy})")
        return "\n".join(lines)


def _check_normalized(decls: Iterable[IrDecl], side: str) -> None:
    for d in decls:
        if isinstance(d, Constraint) and not d.is_normalized():
            raise ScoreError(f"{side} declaration is not normalized: {d}")


def match_declarations(pred: Sequence[IrDecl], gold: Sequence[IrDecl]) -> tuple[int, int, int]:
    """Return ``(matched, FP, FN)`` under exact multiset matching.

    Edges only join equal declarations, so every connected component of the
    bipartite graph is complete and the multiset intersection is already a
    maximum matching.
    """
    _check_normalized(pred, "predicted")
    _check_normalized(gold, "gold")
    matched = sum((Counter(pred) & Counter(gold)).values())
    return matched, len(pred) - matched, len(gold) - matched


@dataclass
class Prediction:
    """Normalized declarations for one problem, plus segments that failed to parse."""

    declarations: list[IrDecl] = field(default_factory=list)
    unparsed: int = 0

    @classmethod
    def from_ir(cls, text: str) -> "Prediction":
        pred = cls()
        for segment in split_declarations(text):
            try:
                pred.declarations.append(normalize(parse_declaration(segment)))
            except IrError:
                pred.unparsed += 1
        return pred

    @classmethod
    def from_canonical(cls, form: CanonicalForm) -> "Prediction":
        pred = cls()
        try:
            pred.declarations.append(Objective(form.direction, LinearExpr(tuple(zip(ALIASES, form.objective)))))
        except IrError:
            pred.unparsed += 1
        for row in form.rows:
            try:
                lhs = LinearExpr(tuple(zip(ALIASES, row.coeffs)))
                pred.declarations.append(Constraint(lhs, row.op, LinearExpr.const(row.rhs)))
            except IrError:
                pred.unparsed += 1
        return pred


def score(preds: Mapping[str, Prediction | Sequence[IrDecl]], golds: Sequence[Problem]) -> ScoreReport:
    """Score predictions against gold problems.

    Problems without a prediction count every gold declaration as FN. Each
    unparseable predicted segment counts as one FP.
    """
    by_id = {p.id: p for p in golds}
    unknown = sorted(set(preds) - set(by_id))
    if unknown:
        raise ScoreError(f"predictions for unknown problem ids: {unknown}")
    rows = []
    for p in golds:
        pred = preds.get(p.id, Prediction())
        if not isinstance(pred, Prediction):
            pred = Prediction([normalize(d) for d in pred])
        gold = gold_canonical(p).declarations()
        matched, fp, fn = match_declarations(pred.declarations, gold)
        rows.append(ProblemScore(p.id, len(gold), fp + pred.unparsed, fn, matched, pred.unparsed))
    total_d = sum(r.D for r in rows)
    if total_d == 0:
        raise ScoreError("no gold declarations to score against")
    errors = sum(r.FP + r.FN for r in rows)
    return ScoreReport(tuple(rows), 1 - Fraction(errors, total_d))


def load_predictions(path: str | Path) -> dict[str, Prediction]:
    """Read ``{id, ir}`` or ``{id, canonical}`` records, one per line."""
    preds: dict[str, Prediction] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ScoreError(f"line {lineno}: invalid JSON: {exc.msg}") from None
            if not isinstance(rec, dict) or not isinstance(rec.get("id"), str):
                raise ScoreError(f"line {lineno}: record needs a string 'id'")
            if rec["id"] in preds:
                raise ScoreError(f"line {lineno}: duplicate prediction id {rec['id']!r}")
            if "ir" in rec:
                if not isinstance(rec["ir"], str):
                    raise ScoreError(f"line {lineno}: 'ir' must be a string")
                preds[rec["id"]] = Prediction.from_ir(rec["ir"])
            elif "canonical" in rec:
                preds[rec["id"]] = Prediction.from_canonical(CanonicalForm.from_record(rec["canonical"]))
            else:
                raise ScoreError(f"line {lineno}: record needs 'ir' or 'canonical'")
    return preds
