"""Constraint-direction augmentation.

A constraint-direction tag reading "must not", "can not" or "cannot" is
rewritten to "must" and the linked gold constraint gets its operator
flipped. Each eligible site draws one uniform number from a per-problem
stream and is rewritten when the draw falls below ``p``.
"""
from __future__ import annotations

import hashlib
import random
import re
from dataclasses import dataclass, replace
from typing import Iterable

from .corpus import EntityTag, Label, Problem
from .ir import Constraint

NEGATED_PHRASES = frozenset({"must not", "can not", "cannot"})
REPLACEMENT = "must"
DEFAULT_P = 0.3

_AUG_SUFFIX = re.compile(r"#aug\d+$")


class AugmentError(ValueError):
    pass


@dataclass(frozen=True)
class AugmentConfig:
    p: float = DEFAULT_P
    seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise AugmentError(f"p must lie in [0, 1], got {self.p}")
        if not -(2**63) <= self.seed < 2**64:
            raise AugmentError("seed must fit in 64 bits")


def _normalized_surface(surface: str) -> str:
    return " ".join(surface.casefold().split())


def _link_sites(p: Problem) -> dict[int, int]:
    """Map each CONST_DIR tag index to its gold constraint index.

    Explicit links win. Without any, the k-th direction tag in the text
    pairs with the constraint of k-th smallest source position, which is
    only defined when the two counts agree.
    """
    dir_tags = [i for i, t in enumerate(p.tags) if t.label is Label.CONST_DIR]
    links = {i: p.tags[i].constraint for i in dir_tags if p.tags[i].constraint is not None}
    if len(links) == len(dir_tags):
        return links
    n_cons = len(p.constraints)
    if links or len(dir_tags) != n_cons:
        return {i: links.get(i) for i in dir_tags}
    by_position = sorted(range(n_cons), key=lambda k: (p.order_hints[k], k))
    return dict(zip(dir_tags, by_position))


def find_eligible(p: Problem) -> list[tuple[int, int]]:
    """``(tag index, constraint index)`` for every negated direction phrase.

    Raises :class:`AugmentError` when an eligible tag cannot be linked to a
    constraint without guessing.
    """
    links = _link_sites(p)
    sites = []
    for i, tag in enumerate(p.tags):
        if tag.label is not Label.CONST_DIR or _normalized_surface(tag.surface) not in NEGATED_PHRASES:
            continue
        target = links.get(i)
        if target is None:
            raise AugmentError(
                f"problem {p.id!r}: direction tag {tag.surface!r} at [{tag.start},{tag.end}) "
                "has no unambiguous constraint link"
            )
        sites.append((i, target))
    targets = [c for _, c in sites]
    if len(set(targets)) != len(targets):
        raise AugmentError(f"problem {p.id!r}: two direction tags link the same constraint")
    return sites


def _splice(p: Problem, tag_index: int, replacement: str) -> tuple[str, tuple[EntityTag, ...]]:
    text, tags = p.text, p.tags
    tag = tags[tag_index]
    lo, hi = tag.start, tag.end
    # absorb adjacent whitespace runs; each non-empty run becomes one space
    while lo > 0 and text[lo - 1].isspace():
        lo -= 1
    while hi < len(text) and text[hi].isspace():
        hi += 1
    left = " " if lo < tag.start and lo > 0 else ""
    right = " " if hi > tag.end and hi < len(text) else ""
    new_text = text[:lo] + left + replacement + right + text[hi:]
    delta = len(new_text) - len(text)
    new_start = lo + len(left)

    out = []
    for j, t in enumerate(tags):
        if j == tag_index:
            out.append(replace(t, start=new_start, end=new_start + len(replacement), surface=replacement))
        elif t.end <= lo:
            out.append(t)
        elif t.start >= hi:
            out.append(replace(t, start=t.start + delta, end=t.end + delta))
        else:
            raise AugmentError(f"tag [{t.start},{t.end}) intersects the edit region [{lo},{hi})")
    for t in out:
        if new_text[t.start:t.end] != t.surface:
            raise AugmentError(f"span repair broke tag {t.surface!r}")
    return new_text, tuple(out)


def _variant_id(pid: str, variant: int) -> str:
    return f"{_AUG_SUFFIX.sub('', pid)}#aug{variant}"


def flip_constraint(p: Problem, constraint_index: int) -> Problem:
    k = -1
    gold = []
    for d in p.gold:
        if isinstance(d, Constraint):
            k += 1
            if k == constraint_index:
                d = d.with_op(d.op.flipped())
        gold.append(d)
    return replace(p, gold=tuple(gold))


def rewrite_site(p: Problem, site: tuple[int, int], variant: int = 1) -> Problem:
    """Unconditionally rewrite one site: text, spans, gold operator and id."""
    tag_index, constraint_index = site
    text, tags = _splice(p, tag_index, REPLACEMENT)
    flipped = flip_constraint(p, constraint_index)
    return replace(flipped, id=_variant_id(p.id, variant), text=text, tags=tags)


def reverse_constraint(p: Problem, site: tuple[int, int], rng: random.Random,
                       prob: float = DEFAULT_P, variant: int = 1) -> Problem:
    """Draw once from ``rng``; rewrite the site if the draw is below ``prob``."""
    if rng.random() < prob:
        return rewrite_site(p, site, variant)
    return p


def problem_rng(seed: int, problem_id: str) -> random.Random:
    digest = hashlib.sha256(f"{seed}\x00{problem_id}".encode("utf-8")).digest()
    return random.Random(int.from_bytes(digest[:8], "big"))


def augment_problem(p: Problem, config: AugmentConfig) -> Problem | None:
    """Augmented variant of ``p``, or None when no site was rewritten."""
    sites = find_eligible(p)
    if not sites:
        return None
    rng = problem_rng(config.seed, p.id)
    out = p
    for site in sites:
        out = reverse_constraint(out, site, rng, config.p)
    return None if out is p else out


def augment_corpus(corpus: Iterable[Problem], config: AugmentConfig) -> list[Problem]:
    """Originals in input order, followed by their augmented variants."""
    originals = list(corpus)
    variants = [v for v in (augment_problem(p, config) for p in originals) if v is not None]
    return originals + variants


def count_rewrites(original: Problem, variant: Problem) -> int:
    return sum(a.op is not b.op for a, b in zip(original.constraints, variant.constraints))
