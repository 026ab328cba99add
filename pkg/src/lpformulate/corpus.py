"""Annotated LP word problems: data model plus line-delimited JSON I/O.

One record per line::

    {"id": "p1", "text": "...", "tags": [{"label": "VAR", "start": 4, "end": 9}],
     "variables": ["cakes", "pies"],
     "gold": [{"kind": "objective", "direction": "max", "coeffs": ["3", "4"]},
              {"kind": "constraint", "coeffs": ["3", "4"], "op": "<=", "rhs": "50"}],
     "order_hints": [0]}

Spans are half-open and count code points. Coefficients are rationals
written as strings (``"3/10"``, ``"0.3"``) or integers.
"""
from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field, replace
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Iterator

from .ir import (
    ALIASES,
    Constraint,
    IrDecl,
    IrError,
    LinearExpr,
    Objective,
    Op,
    Sense,
    normalize,
    rational_str,
    to_rational,
)


class Label(enum.Enum):
    VAR = "VAR"
    PARAM = "PARAM"
    LIMIT = "LIMIT"
    CONST_DIR = "CONST_DIR"
    OBJ_DIR = "OBJ_DIR"
    OBJ_NAME = "OBJ_NAME"


CONSTRAINT_TYPE_NAMES = ("lowerbound", "upperbound", "xy", "xby", "sum", "linear", "ratio")


class CorpusError(ValueError):
    def __init__(self, message: str, field: str | None = None, line: int | None = None):
        self.message = message
        self.field = field
        self.line = line
        prefix = []
        if line is not None:
            prefix.append(f"line {line}")
        if field is not None:
            prefix.append(f"field {field!r}")
        super().__init__(": ".join([", ".join(prefix), message]) if prefix else message)


class SpanOverlapError(CorpusError):
    pass


@dataclass(frozen=True)
class EntityTag:
    label: Label
    start: int
    end: int
    surface: str
    # index into the problem's gold constraints, when the annotation links one
    constraint: int | None = None

    @property
    def span(self) -> tuple[int, int]:
        return (self.start, self.end)


@dataclass(frozen=True)
class Problem:
    id: str
    text: str
    tags: tuple[EntityTag, ...]
    variables: tuple[str, ...]
    gold: tuple[IrDecl, ...]
    order_hints: tuple[int, ...] = ()
    declared_types: tuple[str | None, ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "tags", tuple(sorted(self.tags, key=lambda t: (t.start, t.end))))
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(self, "gold", tuple(self.gold))
        n_cons = sum(isinstance(d, Constraint) for d in self.gold)
        if not self.order_hints:
            object.__setattr__(self, "order_hints", tuple(range(n_cons)))
        else:
            object.__setattr__(self, "order_hints", tuple(self.order_hints))
        if not self.declared_types:
            object.__setattr__(self, "declared_types", (None,) * n_cons)
        else:
            object.__setattr__(self, "declared_types", tuple(self.declared_types))
        _validate(self)

    @property
    def objective(self) -> Objective:
        return next(d for d in self.gold if isinstance(d, Objective))

    @property
    def constraints(self) -> tuple[Constraint, ...]:
        return tuple(d for d in self.gold if isinstance(d, Constraint))

    @property
    def aliases(self) -> tuple[str, ...]:
        return ALIASES[: len(self.variables)]


def variable_alias(p: Problem, index: int) -> str:
    """Canonical alias (x, y, z, w) of the ``index``-th variable of ``p``."""
    if not 0 <= index < len(p.variables):
        raise IndexError(f"variable index {index} out of range for {len(p.variables)} variables")
    return ALIASES[index]


def _validate(p: Problem) -> None:
    if not isinstance(p.id, str) or not p.id:
        raise CorpusError("must be a non-empty string", "id")
    n_vars = len(p.variables)
    if not 1 <= n_vars <= len(ALIASES):
        raise CorpusError(f"expected 1 to {len(ALIASES)} variables, got {n_vars}", "variables")

    prev: EntityTag | None = None
    for tag in p.tags:
        if not 0 <= tag.start < tag.end <= len(p.text):
            raise CorpusError(
                f"span [{tag.start},{tag.end}) is not a non-empty range inside text of length {len(p.text)}",
                "tags",
            )
        if tag.surface != p.text[tag.start:tag.end]:
            raise CorpusError(
                f"surface {tag.surface!r} does not match text slice {p.text[tag.start:tag.end]!r}",
                "tags",
            )
        if prev is not None and tag.start < prev.end:
            raise SpanOverlapError(
                f"spans [{prev.start},{prev.end}) and [{tag.start},{tag.end}) overlap", "tags"
            )
        prev = tag

    objectives = [d for d in p.gold if isinstance(d, Objective)]
    if len(objectives) != 1:
        raise CorpusError(f"expected exactly one objective, got {len(objectives)}", "gold")
    allowed = set(p.aliases)
    n_cons = 0
    for decl in p.gold:
        if isinstance(decl, Constraint):
            n_cons += 1
            used = decl.lhs.aliases + decl.rhs.aliases
        else:
            used = decl.expr.aliases
        extra = sorted(set(used) - allowed)
        if extra:
            raise CorpusError(f"declaration uses undeclared variables {extra}", "gold")
    if len(p.order_hints) != n_cons:
        raise CorpusError(f"expected {n_cons} entries, got {len(p.order_hints)}", "order_hints")
    if any(not isinstance(h, int) or isinstance(h, bool) or h < 0 for h in p.order_hints):
        raise CorpusError("entries must be non-negative integers", "order_hints")
    if len(p.declared_types) != n_cons:
        raise CorpusError("expected one type per constraint", "gold")
    for tag in p.tags:
        if tag.constraint is not None and not 0 <= tag.constraint < n_cons:
            raise CorpusError(f"tag links constraint {tag.constraint}, only {n_cons} exist", "tags")


# --- record conversion -----------------------------------------------------

def _vector(value, n: int, field_name: str) -> tuple[Fraction, ...]:
    if not isinstance(value, list):
        raise CorpusError("coefficients must be an array", field_name)
    if len(value) != n:
        raise CorpusError(f"expected {n} coefficients, got {len(value)}", field_name)
    try:
        return tuple(to_rational(v) for v in value)
    except (TypeError, ValueError) as exc:
        raise CorpusError(str(exc), field_name) from None


def _expr(coeffs: Iterable[Fraction]) -> LinearExpr:
    return LinearExpr(tuple(zip(ALIASES, coeffs)))


def declaration_from_record(rec: dict, n_vars: int) -> tuple[IrDecl, str | None]:
    """Build one gold declaration; returns it with its declared type, if any."""
    if not isinstance(rec, dict):
        raise CorpusError("declaration must be an object", "gold")
    kind = rec.get("kind")
    try:
        if kind == "objective":
            try:
                sense = Sense(str(rec.get("direction", "")).lower())
            except ValueError:
                raise CorpusError(f"unknown direction {rec.get('direction')!r}", "gold.direction") from None
            return Objective(sense, _expr(_vector(rec.get("coeffs"), n_vars, "gold.coeffs"))), None
        if kind == "constraint":
            ops = {"<=": Op.LE, "≤": Op.LE, ">=": Op.GE, "≥": Op.GE}
            if rec.get("op") not in ops:
                raise CorpusError(f"unsupported operator {rec.get('op')!r}", "gold.op")
            try:
                rhs = to_rational(rec.get("rhs"))
            except (TypeError, ValueError) as exc:
                raise CorpusError(str(exc), "gold.rhs") from None
            ctype = rec.get("type")
            if ctype is not None and ctype not in CONSTRAINT_TYPE_NAMES:
                raise CorpusError(f"unknown constraint type {ctype!r}", "gold.type")
            decl = Constraint(
                _expr(_vector(rec.get("coeffs"), n_vars, "gold.coeffs")),
                ops[rec["op"]],
                LinearExpr.const(rhs),
                ratio=ctype == "ratio",
            )
            return decl, ctype
    except IrError as exc:
        raise CorpusError(str(exc), "gold") from None
    raise CorpusError(f"kind must be 'objective' or 'constraint', got {kind!r}", "gold.kind")


def declaration_to_record(decl: IrDecl, n_vars: int, declared_type: str | None = None) -> dict:
    if isinstance(decl, Objective):
        return {
            "kind": "objective",
            "direction": decl.sense.value,
            "coeffs": [rational_str(decl.expr.coeff(a)) for a in ALIASES[:n_vars]],
        }
    decl = normalize(decl)
    rec = {
        "kind": "constraint",
        "coeffs": [rational_str(decl.lhs.coeff(a)) for a in ALIASES[:n_vars]],
        "op": decl.op.value,
        "rhs": rational_str(decl.rhs.constant),
    }
    if declared_type is not None:
        rec["type"] = declared_type
    return rec


def problem_from_record(rec: dict) -> Problem:
    if not isinstance(rec, dict):
        raise CorpusError("record must be a JSON object")
    for key in ("id", "text", "tags", "variables", "gold"):
        if key not in rec:
            raise CorpusError("missing", key)
    text = rec["text"]
    if not isinstance(text, str):
        raise CorpusError("must be a string", "text")
    variables = rec["variables"]
    if not isinstance(variables, list) or not all(isinstance(v, str) for v in variables):
        raise CorpusError("must be an array of strings", "variables")
    if not 1 <= len(variables) <= len(ALIASES):
        raise CorpusError(f"expected 1 to {len(ALIASES)} variables, got {len(variables)}", "variables")

    tags = []
    if not isinstance(rec["tags"], list):
        raise CorpusError("must be an array", "tags")
    for t in rec["tags"]:
        if not isinstance(t, dict):
            raise CorpusError("tag must be an object", "tags")
        try:
            label = Label(t.get("label"))
        except ValueError:
            raise CorpusError(f"unknown label {t.get('label')!r}", "tags.label") from None
        start, end = t.get("start"), t.get("end")
        if not all(isinstance(v, int) and not isinstance(v, bool) for v in (start, end)):
            raise CorpusError("start and end must be integers", "tags")
        if not 0 <= start < end <= len(text):
            raise CorpusError(f"span [{start},{end}) is invalid for text of length {len(text)}", "tags")
        link = t.get("constraint")
        if link is not None and (not isinstance(link, int) or isinstance(link, bool)):
            raise CorpusError("constraint link must be an integer", "tags.constraint")
        tags.append(EntityTag(label, start, end, text[start:end], link))

    if not isinstance(rec["gold"], list):
        raise CorpusError("must be an array", "gold")
    gold, declared = [], []
    for g in rec["gold"]:
        decl, ctype = declaration_from_record(g, len(variables))
        gold.append(decl)
        if isinstance(decl, Constraint):
            declared.append(ctype)

    hints = rec.get("order_hints")
    if hints is not None and not isinstance(hints, list):
        raise CorpusError("must be an array", "order_hints")
    return Problem(
        id=rec["id"],
        text=text,
        tags=tuple(tags),
        variables=tuple(variables),
        gold=tuple(gold),
        order_hints=tuple(hints or ()),
        declared_types=tuple(declared),
    )


def problem_to_record(p: Problem) -> dict:
    tags = []
    for t in p.tags:
        rec = {"label": t.label.value, "start": t.start, "end": t.end}
        if t.constraint is not None:
            rec["constraint"] = t.constraint
        tags.append(rec)
    gold, k = [], 0
    for decl in p.gold:
        if isinstance(decl, Constraint):
            gold.append(declaration_to_record(decl, len(p.variables), p.declared_types[k]))
            k += 1
        else:
            gold.append(declaration_to_record(decl, len(p.variables)))
    return {
        "id": p.id,
        "text": p.text,
        "tags": tags,
        "variables": list(p.variables),
        "gold": gold,
        "order_hints": list(p.order_hints),
    }


def dumps_problem(p: Problem) -> str:
    return json.dumps(problem_to_record(p), ensure_ascii=False)


def iter_records(path: str | Path) -> Iterator[tuple[int, dict]]:
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                yield lineno, json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusError(f"invalid JSON: {exc.msg}", line=lineno) from None


def load_corpus(path: str | Path) -> list[Problem]:
    problems = []
    seen: set[str] = set()
    for lineno, rec in iter_records(path):
        try:
            p = problem_from_record(rec)
        except CorpusError as exc:
            raise type(exc)(exc.message, exc.field, lineno) from None
        if p.id in seen:
            raise CorpusError(f"duplicate id {p.id!r}", "id", lineno)
        seen.add(p.id)
        problems.append(p)
    return problems


def save_corpus(path: str | Path, problems: Iterable[Problem]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for p in problems:
            fh.write(dumps_problem(p))
            fh.write("\n")


def with_gold(p: Problem, gold: Iterable[IrDecl]) -> Problem:
    return replace(p, gold=tuple(gold))
