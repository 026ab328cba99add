"""Entity-tag embedding composition.

Input embedding at position ``l``::

    tok[token_l] + pos[l] + lam * tag[tag_l]

The tag table starts at zero, so a freshly built table set reproduces the
plain token + position sum exactly. Tables are either float64 arrays (the
numba kernel, or numpy when numba is disabled) or object arrays of
:class:`fractions.Fraction` for exact checks.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Sequence

import numpy as np

from . import _accel
from .corpus import Label, Problem

DEFAULT_LAMBDA = 5
NULL_TAG = 0
TAG_IDS = {label: i + 1 for i, label in enumerate(Label)}
N_TAGS = len(TAG_IDS) + 1


class EmbeddingError(ValueError):
    pass


def _as_table(m, name: str) -> np.ndarray:
    arr = np.asarray(m)
    if arr.dtype != object:
        arr = arr.astype(np.float64)
    if arr.ndim != 2:
        raise EmbeddingError(f"{name} must be a 2-D matrix, got shape {arr.shape}")
    return arr


@dataclass(frozen=True, eq=False)
class EmbeddingTables:
    """Token, position and tag tables sharing width ``d``.

    The tag table is created all-zero with ``n_tags`` rows; row 0 is the
    null tag for untagged tokens.
    """

    tok: np.ndarray
    pos: np.ndarray
    n_tags: int = N_TAGS
    lam: float | Fraction = DEFAULT_LAMBDA
    tag: np.ndarray = field(init=False)

    def __post_init__(self):
        tok, pos = _as_table(self.tok, "tok"), _as_table(self.pos, "pos")
        if tok.shape[1] != pos.shape[1]:
            raise EmbeddingError(f"tok width {tok.shape[1]} != pos width {pos.shape[1]}")
        if (tok.dtype == object) != (pos.dtype == object):
            raise EmbeddingError("tok and pos must both be exact or both be float")
        if self.n_tags < 1:
            raise EmbeddingError("need at least the null tag row")
        if self.lam < 0:
            raise EmbeddingError(f"lambda must be non-negative, got {self.lam}")
        exact = tok.dtype == object
        if exact:
            tag = np.full((self.n_tags, tok.shape[1]), Fraction(0), dtype=object)
            lam = Fraction(self.lam)
        else:
            tag = np.zeros((self.n_tags, tok.shape[1]), dtype=np.float64)
            lam = float(self.lam)
        object.__setattr__(self, "tok", tok)
        object.__setattr__(self, "pos", pos)
        object.__setattr__(self, "tag", tag)
        object.__setattr__(self, "lam", lam)

    @property
    def d(self) -> int:
        return self.tok.shape[1]

    @property
    def max_len(self) -> int:
        return self.pos.shape[0]

    @property
    def exact(self) -> bool:
        return self.tok.dtype == object

    def with_tag(self, tag) -> "EmbeddingTables":
        """Copy with a given tag table (e.g. weights after finetuning)."""
        tag = _as_table(tag, "tag")
        if tag.shape != self.tag.shape:
            raise EmbeddingError(f"tag table must have shape {self.tag.shape}, got {tag.shape}")
        if self.exact and tag.dtype != object:
            raise EmbeddingError("exact tables need an exact tag table")
        out = EmbeddingTables(self.tok, self.pos, self.n_tags, self.lam)
        object.__setattr__(out, "tag", tag if self.exact else tag.astype(np.float64))
        return out

    def with_lambda(self, lam) -> "EmbeddingTables":
        return EmbeddingTables(self.tok, self.pos, self.n_tags, lam).with_tag(self.tag)


def _ids(seq, n_rows: int, name: str) -> np.ndarray:
    ids = np.asarray(seq, dtype=np.int64).reshape(-1)
    if ids.size and (ids.min() < 0 or ids.max() >= n_rows):
        raise EmbeddingError(f"{name} id out of range [0, {n_rows})")
    return ids


@_accel.njit(cache=True)
def _compose_kernel(tok, pos, tag, tokens, tags, lam, out):
    for l in range(tokens.shape[0]):
        t = tokens[l]
        g = tags[l]
        for j in range(tok.shape[1]):
            out[l, j] = tok[t, j] + pos[l, j] + lam * tag[g, j]


def compose_numpy(tok, pos, tag, tokens, tags, lam):
    n = tokens.shape[0]
    return tok[tokens] + pos[:n] + lam * tag[tags]


def compose_numba(tok, pos, tag, tokens, tags, lam):
    out = np.empty((tokens.shape[0], tok.shape[1]), dtype=np.float64)
    _compose_kernel(tok, pos, tag, tokens, tags, lam, out)
    return out


def compose(tables: EmbeddingTables, tokens: Sequence[int], tags: Sequence[int],
            lam: float | Fraction | None = None) -> np.ndarray:
    """``(L, d)`` encoder input embeddings for one sequence."""
    tokens = _ids(tokens, tables.tok.shape[0], "token")
    tags = _ids(tags, tables.tag.shape[0], "tag")
    if tokens.shape != tags.shape:
        raise EmbeddingError(f"{tokens.size} tokens but {tags.size} tags")
    if tokens.size > tables.max_len:
        raise EmbeddingError(f"sequence length {tokens.size} exceeds {tables.max_len} positions")
    if lam is None:
        lam = tables.lam
    elif lam < 0:
        raise EmbeddingError(f"lambda must be non-negative, got {lam}")
    if tables.exact:
        return compose_numpy(tables.tok, tables.pos, tables.tag, tokens, tags, Fraction(lam))
    if _accel.HAVE_NUMBA:
        return compose_numba(tables.tok, tables.pos, tables.tag, tokens, tags, float(lam))
    return compose_numpy(tables.tok, tables.pos, tables.tag, tokens, tags, float(lam))


def baseline_compose(tables: EmbeddingTables, tokens: Sequence[int]) -> np.ndarray:
    """Token plus position embeddings, without any tag term."""
    tokens = _ids(tokens, tables.tok.shape[0], "token")
    if tokens.size > tables.max_len:
        raise EmbeddingError(f"sequence length {tokens.size} exceeds {tables.max_len} positions")
    return tables.tok[tokens] + tables.pos[: tokens.size]


def tag_ids_for_spans(p: Problem, spans: Sequence[tuple[int, int]]) -> list[int]:
    """Tag id of each token span: the label of the entity it overlaps, else 0."""
    out = []
    for start, end in spans:
        tid = NULL_TAG
        for t in p.tags:
            if t.start < end and start < t.end:
                tid = TAG_IDS[t.label]
                break
        out.append(tid)
    return out


# --- matrix files ----------------------------------------------------------
# header line "rows cols", then rows*cols values in row-major order

def load_matrix(path: str | Path, exact: bool = False) -> np.ndarray:
    tokens = Path(path).read_text(encoding="utf-8").split()
    if len(tokens) < 2:
        raise EmbeddingError(f"{path}: missing 'rows cols' header")
    try:
        rows, cols = int(tokens[0]), int(tokens[1])
    except ValueError:
        raise EmbeddingError(f"{path}: header must be two integers") from None
    values = tokens[2:]
    if rows < 0 or cols < 0 or len(values) != rows * cols:
        raise EmbeddingError(f"{path}: expected {rows}x{cols} values, found {len(values)}")
    try:
        if exact:
            data = [Fraction(v) for v in values]
            return np.array(data, dtype=object).reshape(rows, cols)
        return np.array([float(Fraction(v)) if "/" in v else float(v) for v in values],
                        dtype=np.float64).reshape(rows, cols)
    except (ValueError, ZeroDivisionError):
        raise EmbeddingError(f"{path}: non-numeric value") from None


def save_matrix(path: str | Path, m: np.ndarray) -> None:
    m = np.asarray(m)
    if m.ndim != 2:
        raise EmbeddingError("only 2-D matrices can be saved")
    lines = [f"{m.shape[0]} {m.shape[1]}"]
    for row in m:
        lines.append(" ".join(str(v) if m.dtype == object else repr(float(v)) for v in row))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
