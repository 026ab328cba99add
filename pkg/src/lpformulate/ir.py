"""Intermediate representation: LP declarations written as plain math.

A document is a ``;``-separated list of declarations::

    maximize 3x + 4y ; 3x + 4y <= 50 ; x >= 0.3(x + y)

Coefficients are exact :class:`fractions.Fraction` values from the lexer
onward. Parenthesized products are distributed while parsing, so every
expression comes out as a :class:`LinearExpr`.
"""
from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

ALIASES = ("x", "y", "z", "w")
_ALIAS_INDEX = {a: i for i, a in enumerate(ALIASES)}
MAX_NESTING = 64


class Sense(enum.Enum):
    MAX = "max"
    MIN = "min"


class Op(enum.Enum):
    LE = "<="
    GE = ">="

    def flipped(self) -> "Op":
        return Op.GE if self is Op.LE else Op.LE


class IrError(ValueError):
    """Base class for every IR failure; carries a 1-based column when known."""

    def __init__(self, message: str, column: int | None = None):
        self.column = column
        if column is not None:
            message = f"{message} (column {column})"
        super().__init__(message)


class IrLexError(IrError):
    pass


class IrSyntaxError(IrError):
    pass


class NonlinearityError(IrError):
    pass


class UnknownVariableError(IrError):
    pass


class EqualityConstraintError(IrError):
    pass


def alias_index(alias: str) -> int:
    return _ALIAS_INDEX[alias]


@dataclass(frozen=True)
class LinearExpr:
    """Sum of ``coef * alias`` terms plus a constant.

    ``terms`` is kept sorted in alias order with zero coefficients dropped,
    so structural equality is value equality.
    """

    terms: tuple[tuple[str, Fraction], ...] = ()
    constant: Fraction = Fraction(0)

    def __post_init__(self):
        merged: dict[str, Fraction] = {}
        for alias, coef in self.terms:
            if alias not in _ALIAS_INDEX:
                raise UnknownVariableError(f"unknown variable alias {alias!r}")
            merged[alias] = merged.get(alias, Fraction(0)) + Fraction(coef)
        terms = tuple(
            (a, merged[a]) for a in sorted(merged, key=_ALIAS_INDEX.__getitem__)
            if merged[a] != 0
        )
        object.__setattr__(self, "terms", terms)
        object.__setattr__(self, "constant", Fraction(self.constant))

    @classmethod
    def from_mapping(cls, coeffs: Mapping[str, Fraction | int | str], constant=0) -> "LinearExpr":
        return cls(tuple((a, Fraction(c)) for a, c in coeffs.items()), Fraction(constant))

    @classmethod
    def const(cls, value) -> "LinearExpr":
        return cls((), Fraction(value))

    def coeff(self, alias: str) -> Fraction:
        for a, c in self.terms:
            if a == alias:
                return c
        return Fraction(0)

    @property
    def mapping(self) -> dict[str, Fraction]:
        return dict(self.terms)

    @property
    def aliases(self) -> tuple[str, ...]:
        return tuple(a for a, _ in self.terms)

    def is_constant(self) -> bool:
        return not self.terms

    def __add__(self, other: "LinearExpr") -> "LinearExpr":
        return LinearExpr(self.terms + other.terms, self.constant + other.constant)

    def __neg__(self) -> "LinearExpr":
        return self.scaled(Fraction(-1))

    def __sub__(self, other: "LinearExpr") -> "LinearExpr":
        return self + (-other)

    def scaled(self, factor: Fraction) -> "LinearExpr":
        return LinearExpr(tuple((a, c * factor) for a, c in self.terms), self.constant * factor)

    def evaluate(self, values: Mapping[str, Fraction]) -> Fraction:
        return sum((c * values[a] for a, c in self.terms), self.constant)


@dataclass(frozen=True)
class Objective:
    sense: Sense
    expr: LinearExpr

    def __post_init__(self):
        if self.expr.is_constant():
            raise IrSyntaxError("objective has no variable terms")
        if self.expr.constant != 0:
            raise IrSyntaxError("objective must not carry a constant term")


@dataclass(frozen=True)
class Constraint:
    lhs: LinearExpr
    op: Op
    rhs: LinearExpr
    # set when the source wrote a parenthesized product; excluded from equality
    ratio: bool = field(default=False, compare=False)

    def __post_init__(self):
        if (self.lhs - self.rhs).is_constant():
            raise IrSyntaxError("constraint has no variable terms once both sides are combined")

    def holds(self, values: Mapping[str, Fraction]) -> bool:
        left, right = self.lhs.evaluate(values), self.rhs.evaluate(values)
        return left <= right if self.op is Op.LE else left >= right

    def is_normalized(self) -> bool:
        return self.lhs.constant == 0 and self.rhs.is_constant()

    def with_op(self, op: Op) -> "Constraint":
        return Constraint(self.lhs, op, self.rhs, ratio=self.ratio)


IrDecl = Objective | Constraint


@dataclass(frozen=True)
class IrDocument:
    declarations: tuple[IrDecl, ...]

    def __post_init__(self):
        decls = tuple(self.declarations)
        object.__setattr__(self, "declarations", decls)
        if not decls:
            raise IrSyntaxError("empty document")
        if sum(isinstance(d, Objective) for d in decls) > 1:
            raise IrSyntaxError("more than one objective")

    @property
    def objective(self) -> Objective | None:
        return next((d for d in self.declarations if isinstance(d, Objective)), None)

    @property
    def constraints(self) -> tuple[Constraint, ...]:
        return tuple(d for d in self.declarations if isinstance(d, Constraint))

    def __iter__(self):
        return iter(self.declarations)

    def __len__(self):
        return len(self.declarations)


def normalize(decl: IrDecl) -> IrDecl:
    """Move variable terms left and the constant right; the operator is kept."""
    if isinstance(decl, Objective) or decl.is_normalized():
        return decl
    moved = decl.lhs - decl.rhs
    return Constraint(
        LinearExpr(moved.terms),
        decl.op,
        LinearExpr.const(-moved.constant),
        ratio=decl.ratio,
    )


# --- lexer -----------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<num>\d+(?:\.\d+)?/\d+(?:\.\d+)? | \d+\.\d* | \.\d+ | \d+)
  | (?P<word>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op><=|>=|≤|≥|==|=<|=>|<|>|=)
  | (?P<punct>[;+\-*()])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Tok:
    kind: str  # num, var, kw, op, punct, end
    text: str
    col: int
    value: object = None


def _number(text: str, col: int) -> Fraction:
    try:
        if "/" in text:
            num, den = text.split("/")
            den_value = Fraction(den)
            if den_value == 0:
                raise IrLexError(f"zero denominator in {text!r}", col)
            return Fraction(num) / den_value
        return Fraction(text)
    except ValueError as exc:
        if isinstance(exc, IrLexError):
            raise
        raise IrLexError(f"malformed number {text!r}", col) from None


def _tokenize(s: str) -> list[_Tok]:
    toks: list[_Tok] = []
    pos = 0
    while pos < len(s):
        m = _TOKEN_RE.match(s, pos)
        col = pos + 1
        if m is None:
            raise IrLexError(f"unexpected character {s[pos]!r}", col)
        kind, text = m.lastgroup, m.group()
        pos = m.end()
        if kind == "ws":
            continue
        if kind == "num":
            toks.append(_Tok("num", text, col, _number(text, col)))
        elif kind == "word":
            low = text.lower()
            if low in ("maximize", "minimize"):
                toks.append(_Tok("kw", low, col, Sense.MAX if low == "maximize" else Sense.MIN))
            elif low in _ALIAS_INDEX:
                toks.append(_Tok("var", low, col))
            elif all(ch in _ALIAS_INDEX for ch in low):
                raise NonlinearityError(f"product of variables {text!r}", col)
            else:
                raise UnknownVariableError(f"unknown variable {text!r}", col)
        elif kind == "op":
            if text in ("<=", "≤", "=<"):
                toks.append(_Tok("op", text, col, Op.LE))
            elif text in (">=", "≥", "=>"):
                toks.append(_Tok("op", text, col, Op.GE))
            elif text in ("=", "=="):
                raise EqualityConstraintError("equality constraints are not supported", col)
            else:
                raise IrLexError(f"strict inequality {text!r} is not supported", col)
        else:
            toks.append(_Tok("punct", text, col))
    toks.append(_Tok("end", "", len(s) + 1))
    return toks


# --- parser ----------------------------------------------------------------

class _Parser:
    def __init__(self, toks: list[_Tok]):
        self.toks = toks
        self.i = 0
        self.saw_group = False

    @property
    def cur(self) -> _Tok:
        return self.toks[self.i]

    def take(self) -> _Tok:
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def accept(self, text: str) -> bool:
        if self.cur.kind == "punct" and self.cur.text == text:
            self.i += 1
            return True
        return False

    def fail(self, expected: str):
        tok = self.cur
        found = "end of input" if tok.kind == "end" else repr(tok.text)
        raise IrSyntaxError(f"expected {expected}, found {found}", tok.col)

    def declaration(self) -> IrDecl:
        self.saw_group = False
        start = self.cur
        if start.kind == "kw":
            self.take()
            expr = self.expr(0)
            if self.cur.kind == "op":
                raise IrSyntaxError("objective cannot contain a comparison", self.cur.col)
            try:
                return Objective(start.value, expr)
            except IrError as exc:
                raise type(exc)(str(exc), start.col) from None
        lhs = self.expr(0)
        if self.cur.kind != "op":
            self.fail("'<=' or '>='")
        op = self.take().value
        rhs = self.expr(0)
        if self.cur.kind == "op":
            raise IrSyntaxError("chained comparison", self.cur.col)
        try:
            return Constraint(lhs, op, rhs, ratio=self.saw_group)
        except IrError as exc:
            raise type(exc)(str(exc), start.col) from None

    def expr(self, depth: int) -> LinearExpr:
        if depth > MAX_NESTING:
            raise IrSyntaxError("parentheses nested too deeply", self.cur.col)
        sign = Fraction(1)
        if self.accept("-"):
            sign = Fraction(-1)
        else:
            self.accept("+")
        total = self.term(depth).scaled(sign)
        while True:
            if self.accept("+"):
                total = total + self.term(depth)
            elif self.accept("-"):
                total = total - self.term(depth)
            else:
                return total

    def term(self, depth: int) -> LinearExpr:
        tok = self.cur
        if tok.kind == "num":
            self.take()
            coef = tok.value
            self.accept("*")
            if self.cur.kind == "var":
                return self.var_term(coef)
            if self.cur.kind == "punct" and self.cur.text == "(":
                return self.group(depth).scaled(coef)
            return LinearExpr.const(coef)
        if tok.kind == "var":
            return self.var_term(Fraction(1))
        if tok.kind == "punct" and tok.text == "(":
            return self.group(depth)
        self.fail("number, variable or '('")

    def var_term(self, coef: Fraction) -> LinearExpr:
        var = self.take()
        nxt = self.cur
        if nxt.kind == "var" or (nxt.kind == "punct" and nxt.text in ("(", "*")):
            raise NonlinearityError(f"variable {var.text!r} multiplied by another factor", nxt.col)
        if nxt.kind == "num":
            self.fail("operator after variable")
        return LinearExpr(((var.text, coef),))

    def group(self, depth: int) -> LinearExpr:
        self.take()
        self.saw_group = True
        inner = self.expr(depth + 1)
        if not self.accept(")"):
            self.fail("')'")
        nxt = self.cur
        if nxt.kind == "var" or (nxt.kind == "punct" and nxt.text in ("(", "*")):
            if not inner.is_constant():
                raise NonlinearityError("parenthesized expression multiplied by a variable", nxt.col)
            self.accept("*")
            if self.cur.kind == "var":
                return self.var_term(inner.constant)
            return self.group(depth).scaled(inner.constant)
        return inner


def parse_declaration(s: str) -> IrDecl:
    parser = _Parser(_tokenize(s))
    decl = parser.declaration()
    if parser.cur.kind != "end":
        parser.fail("end of declaration")
    return decl


def parse_ir(s: str) -> IrDocument:
    """Parse a full IR document; raises a subclass of :class:`IrError`."""
    if not isinstance(s, str):
        raise IrSyntaxError(f"expected a string, got {type(s).__name__}")
    parser = _Parser(_tokenize(s))
    decls = [parser.declaration()]
    while parser.accept(";"):
        decls.append(parser.declaration())
    if parser.cur.kind != "end":
        parser.fail("';' or end of input")
    objectives = [d for d in decls if isinstance(d, Objective)]
    if len(objectives) > 1:
        raise IrSyntaxError("more than one objective")
    return IrDocument(tuple(decls))


def split_declarations(s: str) -> list[str]:
    """Split raw model output on the separator, dropping blank segments."""
    return [seg for seg in s.split(";") if seg.strip()]


# --- printer ---------------------------------------------------------------

def format_number(value: Fraction) -> str:
    """Shortest exact decimal when the denominator allows one, else ``a/b``."""
    value = Fraction(value)
    num, den = value.numerator, value.denominator
    if den == 1:
        return str(num)
    twos = fives = 0
    rest = den
    while rest % 2 == 0:
        rest //= 2
        twos += 1
    while rest % 5 == 0:
        rest //= 5
        fives += 1
    if rest != 1:
        return f"{num}/{den}"
    places = max(twos, fives)
    scaled = abs(num) * 10**places // den
    digits = str(scaled).rjust(places + 1, "0")
    text = f"{digits[:-places]}.{digits[-places:]}".rstrip("0")
    return ("-" if num < 0 else "") + text


def format_expr(expr: LinearExpr) -> str:
    parts: list[str] = []
    for alias, coef in expr.terms:
        mag = abs(coef)
        body = alias if mag == 1 else f"{format_number(mag)}{alias}"
        parts.append(("-" if coef < 0 else "+", body))
    if expr.constant != 0 or not parts:
        parts.append(("-" if expr.constant < 0 else "+", format_number(abs(expr.constant))))
    sign, body = parts[0]
    out = [("-" if sign == "-" else "") + body]
    out += [f"{s} {b}" for s, b in parts[1:]]
    return " ".join(out)


def format_declaration(decl: IrDecl) -> str:
    if isinstance(decl, Objective):
        keyword = "maximize" if decl.sense is Sense.MAX else "minimize"
        return f"{keyword} {format_expr(decl.expr)}"
    return f"{format_expr(decl.lhs)} {decl.op.value} {format_expr(decl.rhs)}"


def print_ir(doc: IrDocument | Iterable[IrDecl]) -> str:
    decls = doc.declarations if isinstance(doc, IrDocument) else tuple(doc)
    return " ; ".join(format_declaration(d) for d in decls)


def to_rational(value) -> Fraction:
    """Read a serialized rational: ``"3/10"``, ``"0.3"`` or an integer.

    Floats are refused; their binary value is rarely the number the
    annotator meant.
    """
    if isinstance(value, bool) or isinstance(value, float):
        raise TypeError(f"rational must be a string or integer, got {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        try:
            if "/" in text:
                num, den = text.split("/")
                return Fraction(num.strip()) / Fraction(den.strip())
            return Fraction(text)
        except (ValueError, ZeroDivisionError):
            raise ValueError(f"not a rational: {value!r}") from None
    raise TypeError(f"rational must be a string or integer, got {value!r}")


def rational_str(value: Fraction) -> str:
    return format_number(Fraction(value))
