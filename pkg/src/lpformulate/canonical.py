"""Constraint typing, generation order, and conversion to matrix form.

Declarations are emitted objective first, then constraints ordered by

1. type: lowerbound, upperbound, xy, xby, sum, linear, ratio
2. source position (linear constraints only)
3. variables involved, compared as ascending alias-index sequences
4. operator, ``<=`` before ``>=``

Remaining ties fall back to source position and then to the coefficients
themselves, so the result does not depend on input order unless two
constraints are identical.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .corpus import Problem
from .ir import (
    ALIASES,
    Constraint,
    IrDecl,
    IrDocument,
    LinearExpr,
    Objective,
    Op,
    Sense,
    alias_index,
    normalize,
    rational_str,
    to_rational,
)


class ConstraintType(enum.IntEnum):
    LOWERBOUND = 0
    UPPERBOUND = 1
    XY = 2
    XBY = 3
    SUM = 4
    LINEAR = 5
    RATIO = 6

    @property
    def label(self) -> str:
        return self.name.lower()

    @classmethod
    def from_label(cls, label: str) -> "ConstraintType":
        return cls[label.upper()]


class CanonicalError(ValueError):
    pass


def classify(d: Constraint, ratio_origin: bool = False, source_position: int = 0) -> ConstraintType:
    """Assign one of the seven constraint types to a normalized constraint.

    ``source_position`` does not influence the type; it is accepted so the
    same metadata record can be passed to classification and sorting.
    """
    if not isinstance(d, Constraint):
        raise CanonicalError("only constraints have a type")
    if not d.is_normalized():
        raise CanonicalError("constraint must be normalized (terms OP constant)")
    if ratio_origin:
        return ConstraintType.RATIO
    coeffs = [c for _, c in d.lhs.terms]
    rhs = d.rhs.constant
    if len(coeffs) == 1 and coeffs[0] == 1:
        return ConstraintType.LOWERBOUND if d.op is Op.GE else ConstraintType.UPPERBOUND
    if len(coeffs) == 2 and rhs == 0:
        a, b = coeffs
        if sorted(coeffs) == [-1, 1]:
            return ConstraintType.XY
        if a * b < 0 and (abs(a) == 1 or abs(b) == 1):
            return ConstraintType.XBY
    if len(coeffs) >= 2 and all(c == 1 for c in coeffs):
        return ConstraintType.SUM
    return ConstraintType.LINEAR


def constraint_key(d: Constraint, ctype: ConstraintType, position: int) -> tuple:
    """Composite sort key for one constraint (objective keys sort first)."""
    d = normalize(d)
    variables = tuple(alias_index(a) for a in d.lhs.aliases)
    op_rank = 0 if d.op is Op.LE else 1
    linear_pos = position if ctype is ConstraintType.LINEAR else 0
    structure = (tuple(d.lhs.terms), d.rhs.constant)
    return (1, int(ctype), linear_pos, variables, op_rank, position, structure)


def sort_order(doc: IrDocument, types: Sequence[ConstraintType], positions: Sequence[int]) -> list[int]:
    """Indices into ``doc.declarations`` in generation order."""
    decls = doc.declarations
    cons_idx = [i for i, d in enumerate(decls) if isinstance(d, Constraint)]
    if len(types) != len(cons_idx) or len(positions) != len(cons_idx):
        raise CanonicalError(
            f"{len(cons_idx)} constraints but {len(types)} types and {len(positions)} positions"
        )
    keys: dict[int, tuple] = {}
    for i, d in enumerate(decls):
        if isinstance(d, Objective):
            keys[i] = (0,)
    for k, i in enumerate(cons_idx):
        keys[i] = constraint_key(decls[i], ConstraintType(types[k]), positions[k])
    return sorted(range(len(decls)), key=keys.__getitem__)


def sort_declarations(doc: IrDocument, types: Sequence[ConstraintType], positions: Sequence[int]) -> IrDocument:
    order = sort_order(doc, types, positions)
    return IrDocument(tuple(doc.declarations[i] for i in order))


@dataclass(frozen=True)
class Row:
    coeffs: tuple[Fraction, ...]
    op: Op
    rhs: Fraction


@dataclass(frozen=True)
class CanonicalForm:
    direction: Sense
    objective: tuple[Fraction, ...]
    rows: tuple[Row, ...]

    def __post_init__(self):
        n = len(self.objective)
        for row in self.rows:
            if len(row.coeffs) != n:
                raise CanonicalError(f"row has {len(row.coeffs)} coefficients, objective has {n}")

    @property
    def n_vars(self) -> int:
        return len(self.objective)

    def declarations(self) -> list[IrDecl]:
        """Back to normalized IR declarations (objective first)."""
        out: list[IrDecl] = [Objective(self.direction, _expr(self.objective))]
        for row in self.rows:
            out.append(Constraint(_expr(row.coeffs), row.op, LinearExpr.const(row.rhs)))
        return out

    def to_record(self) -> dict:
        return {
            "direction": self.direction.value,
            "objective": [rational_str(c) for c in self.objective],
            "rows": [
                {"coeffs": [rational_str(c) for c in r.coeffs], "op": r.op.value, "rhs": rational_str(r.rhs)}
                for r in self.rows
            ],
        }

    @classmethod
    def from_record(cls, rec: dict) -> "CanonicalForm":
        try:
            direction = Sense(rec["direction"])
            objective = tuple(to_rational(c) for c in rec["objective"])
            rows = tuple(
                Row(tuple(to_rational(c) for c in r["coeffs"]), Op(r["op"]), to_rational(r["rhs"]))
                for r in rec.get("rows", [])
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise CanonicalError(f"malformed canonical record: {exc}") from None
        return cls(direction, objective, rows)


def _expr(coeffs: Sequence[Fraction]) -> LinearExpr:
    return LinearExpr(tuple(zip(ALIASES, coeffs)))


def to_canonical(doc: IrDocument, variables: Sequence[str] | int) -> CanonicalForm:
    """Dense objective vector and constraint rows, in document order."""
    n = variables if isinstance(variables, int) else len(variables)
    allowed = ALIASES[:n]
    objective = doc.objective
    if objective is None:
        raise CanonicalError("document has no objective")

    def dense(expr: LinearExpr) -> tuple[Fraction, ...]:
        for alias in expr.aliases:
            if alias not in allowed:
                raise CanonicalError(f"alias {alias!r} exceeds the {n} declared variables")
        return tuple(expr.coeff(a) for a in allowed)

    rows = []
    for d in doc.constraints:
        nd = normalize(d)
        rows.append(Row(dense(nd.lhs), nd.op, nd.rhs.constant))
    return CanonicalForm(objective.sense, dense(objective.expr), tuple(rows))


def gold_types(p: Problem) -> list[ConstraintType]:
    return [classify(normalize(c), ratio_origin=c.ratio) for c in p.constraints]


def canonicalize_gold(p: Problem) -> IrDocument:
    """Gold declarations as an IR document in generation order."""
    doc = IrDocument(tuple(normalize(d) for d in p.gold))
    return sort_declarations(doc, gold_types(p), p.order_hints)


def gold_canonical(p: Problem) -> CanonicalForm:
    return to_canonical(canonicalize_gold(p), p.variables)


def type_disagreements(p: Problem) -> list[tuple[int, str, str]]:
    """Constraints whose annotated type differs from :func:`classify`."""
    out = []
    for k, (declared, computed) in enumerate(zip(p.declared_types, gold_types(p))):
        if declared is not None and declared != computed.label:
            out.append((k, declared, computed.label))
    return out
