"""``lpform`` command line.

Every subcommand reads and writes line-delimited JSON; ``--pretty``
switches standard output to a human-readable layout. Exit status is 0 on
success, 1 when the input fails validation, 2 on usage errors.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .augment import DEFAULT_P, AugmentConfig, AugmentError, augment_corpus
from .canonical import CanonicalError, canonicalize_gold, to_canonical, type_disagreements
from .corpus import CorpusError, dumps_problem, load_corpus
from .embed import DEFAULT_LAMBDA, EmbeddingError, EmbeddingTables, baseline_compose, compose, load_matrix
from .ir import ALIASES, IrDocument, IrError, alias_index, parse_ir, print_ir
from .scorer import ScoreError, load_predictions, score


class ValidationFailure(Exception):
    pass


def _emit(lines, out: str | None) -> None:
    text = "".join(line + "\n" for line in lines)
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _dump(obj, pretty: bool) -> str:
    return json.dumps(obj, ensure_ascii=False, indent=2 if pretty else None)


def _infer_nvars(doc: IrDocument) -> int:
    used = [alias_index(a) for d in doc for e in _exprs(d) for a in e.aliases]
    return max(used) + 1


def _exprs(decl):
    return (decl.expr,) if hasattr(decl, "expr") else (decl.lhs, decl.rhs)


def cmd_validate(args) -> int:
    problems = load_corpus(args.corpus)
    issues = []
    for p in problems:
        for k, declared, computed in type_disagreements(p):
            issues.append({"id": p.id, "constraint": k, "declared": declared, "computed": computed})
    report = {"problems": len(problems), "ok": not issues, "type_disagreements": issues}
    _emit([_dump(report, args.pretty)], args.out)
    if issues:
        print(f"{len(issues)} constraint type disagreement(s)", file=sys.stderr)
        return 1
    return 0


def cmd_parse(args) -> int:
    source = Path(args.ir)
    if source.is_file():
        texts = [ln for ln in source.read_text(encoding="utf-8").splitlines() if ln.strip()]
    else:
        texts = [args.ir]
    lines = []
    for text in texts:
        doc = parse_ir(text)
        n = args.nvars or _infer_nvars(doc)
        lines.append(_dump(to_canonical(doc, n).to_record(), args.pretty))
    _emit(lines, args.out)
    return 0


def cmd_canonicalize(args) -> int:
    lines = [_dump({"id": p.id, "ir": print_ir(canonicalize_gold(p))}, args.pretty)
             for p in load_corpus(args.corpus)]
    _emit(lines, args.out)
    return 0


def cmd_convert(args) -> int:
    nvars = {}
    if args.gold:
        nvars = {p.id: len(p.variables) for p in load_corpus(args.gold)}
    lines = []
    with open(args.ir_file, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            rec = json.loads(line)
            try:
                doc = parse_ir(rec["ir"])
                n = nvars.get(rec["id"]) or args.nvars or _infer_nvars(doc)
                form = to_canonical(doc, n)
            except (IrError, CanonicalError) as exc:
                raise ValidationFailure(f"{args.ir_file}: line {lineno}: {exc}") from None
            lines.append(_dump({"id": rec["id"], "canonical": form.to_record()}, args.pretty))
    _emit(lines, args.out)
    return 0


def cmd_score(args) -> int:
    report = score(load_predictions(args.pred), load_corpus(args.gold))
    _emit([report.table() if args.pretty else _dump(report.to_record(), False)], args.out)
    return 0


def cmd_augment(args) -> int:
    config = AugmentConfig(p=args.p, seed=args.seed)
    corpus = augment_corpus(load_corpus(args.corpus), config)
    _emit([dumps_problem(p) for p in corpus], args.out)
    print(f"{len(corpus)} problems written", file=sys.stderr)
    return 0


def _int_list(text: str) -> list[int]:
    return [int(v) for v in text.replace(",", " ").split()]


def cmd_embed_check(args) -> int:
    tok = load_matrix(args.tok, exact=args.exact)
    pos = load_matrix(args.pos, exact=args.exact)
    tables = EmbeddingTables(tok, pos, lam=args.lam)
    if args.tag:
        tables = tables.with_tag(load_matrix(args.tag, exact=args.exact))
    tokens = _int_list(args.tokens)
    tags = _int_list(args.tags) if args.tags is not None else [0] * len(tokens)
    out = compose(tables, tokens, tags)
    base = baseline_compose(tables, tokens)
    fmt = str if args.exact else float
    report = {
        "lambda": str(tables.lam) if args.exact else tables.lam,
        "embeddings": [[fmt(v) for v in row] for row in out],
        "equals_baseline": bool((out == base).all()),
    }
    _emit([_dump(report, args.pretty)], args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    fmt = argparse.ArgumentDefaultsHelpFormatter
    parser = argparse.ArgumentParser(
        prog="lpform",
        description="Parse, order, convert, score and augment LP word-problem formulations.",
        epilog=f"defaults: augment --p {DEFAULT_P}, embed-check --lambda {DEFAULT_LAMBDA}",
        formatter_class=fmt,
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write results here instead of stdout")
    common.add_argument("--pretty", action="store_true", help="human-readable output")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("validate", parents=[common], formatter_class=fmt,
                       help="check a corpus file and its constraint type labels")
    p.add_argument("corpus", type=Path)
    p.set_defaults(func=cmd_validate, files=["corpus"])

    p = sub.add_parser("parse", parents=[common], formatter_class=fmt,
                       help="parse an IR string (or a file of them) to canonical records")
    p.add_argument("ir", help="IR text, or a path to a file with one document per line")
    p.add_argument("--nvars", type=int, choices=range(1, len(ALIASES) + 1),
                   help="number of variables (default: highest alias used)")
    p.set_defaults(func=cmd_parse, files=[])

    p = sub.add_parser("canonicalize", parents=[common], formatter_class=fmt,
                       help="emit ordered IR targets for every gold problem")
    p.add_argument("corpus", type=Path)
    p.set_defaults(func=cmd_canonicalize, files=["corpus"])

    p = sub.add_parser("convert", parents=[common], formatter_class=fmt,
                       help="convert {id, ir} records to {id, canonical} records")
    p.add_argument("ir_file", type=Path)
    p.add_argument("--gold", type=Path, help="corpus supplying each problem's variable count")
    p.add_argument("--nvars", type=int, choices=range(1, len(ALIASES) + 1))
    p.set_defaults(func=cmd_convert, files=["ir_file", "gold"])

    p = sub.add_parser("score", parents=[common], formatter_class=fmt,
                       help="declaration-level mapping accuracy")
    p.add_argument("--pred", type=Path, required=True, help="{id, ir} or {id, canonical} records")
    p.add_argument("--gold", type=Path, required=True, help="gold corpus")
    p.set_defaults(func=cmd_score, files=["pred", "gold"])

    p = sub.add_parser("augment", parents=[common], formatter_class=fmt,
                       help="reverse negated constraint directions")
    p.add_argument("corpus", type=Path)
    p.add_argument("--p", type=float, default=DEFAULT_P, help="probability of reversing each eligible site")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_augment, files=["corpus"])

    p = sub.add_parser("embed-check", parents=[common], formatter_class=fmt,
                       help="compose token + position + lambda * tag embeddings")
    p.add_argument("--tok", type=Path, required=True, help="token table matrix file")
    p.add_argument("--pos", type=Path, required=True, help="position table matrix file")
    p.add_argument("--tag", type=Path, help="tag table matrix file (default: all zeros)")
    p.add_argument("--tokens", required=True, help="comma-separated token ids")
    p.add_argument("--tags", help="comma-separated tag ids (default: all 0)")
    p.add_argument("--lambda", dest="lam", type=float, default=DEFAULT_LAMBDA,
                   help="tag embedding scale")
    p.add_argument("--exact", action="store_true", help="rational arithmetic")
    p.set_defaults(func=cmd_embed_check, files=["tok", "pos", "tag"])
    for sp in sub.choices.values():
        sp.set_defaults(subparser=sp)
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    sub = args.subparser
    for name in args.files:
        path = getattr(args, name)
        if path is not None and not Path(path).is_file():
            sub.error(f"file not found: {path}")
    if args.command == "augment" and not 0.0 <= args.p <= 1.0:
        sub.error(f"--p must lie in [0, 1], got {args.p}")
    try:
        return args.func(args)
    except (CorpusError, IrError, CanonicalError, ScoreError, AugmentError, EmbeddingError,
            ValidationFailure, json.JSONDecodeError, KeyError) as exc:
        print(f"lpform {args.command}: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
