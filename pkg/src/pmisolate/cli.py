"""Command-line entry point: ``pmisolate <subcommand> ...``.

Exit status is 0 on success, 1 when a verification check fails, and 2 on
usage or input errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .corpus import corpus, groups
from .decider import decide_pm
from .generate import KINDS, generate
from .oracle import EnumerationLimitError, enumerate_pms
from .pipeline import PREPARED_LIMIT, prepare, verify_instance
from .planar import embed_planar_subgraph, to_dot, to_svg
from .psg import load_psg, serialize_psg
from .schema import SchemaError
from .weights import SIGMA_MODES, FKSBudgetExhausted, build_family

MODES = ("oracle-assisted", "constructive")


class UsageError(Exception):
    pass


def _value(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        pass
    if "," in text:
        return [_value(t) for t in text.split(",")]
    return text


def _params(pairs: list[str]) -> dict:
    out = {}
    for item in pairs:
        key, sep, val = item.partition("=")
        if not sep or not key:
            raise UsageError(f"expected key=value, got {item!r}")
        out[key.replace("-", "_")] = _value(val)
    return out


def _emit(text: str, path: str | None) -> None:
    if path:
        Path(path).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _enumerate(g):
    return enumerate_pms(g, limit=PREPARED_LIMIT)


def cmd_gen(args) -> int:
    params = _params(args.set)
    try:
        g = generate(args.kind, args.seed, **params)
    except TypeError as exc:
        raise UsageError(str(exc)) from None
    _emit(serialize_psg(g), args.output)
    return 0


def cmd_weigh(args) -> int:
    g = load_psg(args.file)
    prep = prepare(g, args.tight_scale, args.sigma)
    comb = prep.combined
    fam = build_family(prep.normalized, args.mode, tight=args.tight_scale,
                       sigma_mode=args.sigma, enumerate_fn=_enumerate)
    out = [f"# normalized {prep.graph.n} vertices {len(prep.graph.edges)} edges"]
    for w in (comb.w_pl, comb.w_side, comb.w_comb):
        out.append(f"# {w.name}")
        out.append(w.table().rstrip("\n"))
    out.append(f"# s_inner {comb.s_inner}")
    out.append(
        f"# family mode={fam.mode} members={len(fam.members)} "
        f"bit_budget={fam.bit_budget} doublings={fam.doublings}"
    )
    if fam.empty:
        out.append("# no perfect matching: family is empty")
    for mb in fam.members[: None if args.all_members else 1]:
        out.append(f"# {mb.weights.name} s_outer={mb.s_outer}")
        out.append(mb.weights.table().rstrip("\n"))
    _emit("\n".join(out) + "\n", args.output)
    return 0


def cmd_verify(args) -> int:
    if bool(args.files) == bool(args.corpus):
        raise UsageError("give instance files or --corpus GROUP, not both")
    if args.corpus:
        if args.corpus not in groups():
            raise UsageError(f"unknown corpus group {args.corpus!r}; known: {', '.join(groups())}")
        items = [(e.name, e.build) for e in corpus(args.corpus)]
    else:
        items = [(f, lambda f=f: load_psg(f)) for f in args.files]
    failed = False
    for name, build in items:
        for v in verify_instance(build(), args.tight_scale, args.sigma, args.mode, args.ablate):
            print(v.line(name))
            failed |= not v.passed
    return 1 if failed else 0


def cmd_decide(args) -> int:
    g = load_psg(args.file)
    prep = prepare(g, args.tight_scale, args.sigma)
    fam = build_family(prep.normalized, args.mode, tight=args.tight_scale,
                       sigma_mode=args.sigma, enumerate_fn=_enumerate)
    sys.stdout.write(decide_pm(prep.graph, fam).report())
    return 0


def cmd_enumerate(args) -> int:
    g = load_psg(args.file)
    prep = prepare(g, args.tight_scale, args.sigma)
    w = prep.combined.w_comb
    ms = _enumerate(prep.graph)
    for m in ms:
        ids = " ".join(map(str, sorted(m.edges)))
        print(f"pm {ids} sign={m.signature} {w.name}={w.total(m.edges)}")
    print(f"# {len(ms)} perfect matchings")
    return 0


def cmd_draw(args) -> int:
    g = load_psg(args.file)
    emb = embed_planar_subgraph(g)
    _emit(to_svg(emb) if args.format == "svg" else to_dot(emb), args.output)
    return 0


def _common(p: argparse.ArgumentParser, tight_default: bool = False) -> None:
    if tight_default:
        p.add_argument("--tight-scale", dest="tight_scale", action="store_true", default=True,
                       help="use the smallest dominating scales (default)")
        p.add_argument("--full-scale", dest="tight_scale", action="store_false",
                       help="use n^10 scales")
    else:
        p.add_argument("--tight-scale", action="store_true",
                       help="use the smallest dominating scales instead of n^10")
    p.add_argument("--sigma", choices=SIGMA_MODES, default="unprimed",
                   help="which sides index the crossing edges")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="pmisolate", description="Perfect-matching isolation on bounded-genus graphs.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate an instance")
    p.add_argument("kind", choices=KINDS)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                   help="generator parameter, e.g. n=12 or pairs=1,2")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("weigh", help="print weight tables and the weight family")
    p.add_argument("file")
    _common(p)
    p.add_argument("--mode", choices=MODES, default="oracle-assisted")
    p.add_argument("--all-members", action="store_true", help="print every family member's table")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_weigh)

    p = sub.add_parser("verify", help="run the brute-force checks")
    p.add_argument("files", nargs="*")
    p.add_argument("--corpus", help="pinned corpus group instead of files")
    p.add_argument("--ablate", action="store_true",
                   help="also run the per-class check with the side weight removed")
    _common(p)
    p.add_argument("--mode", choices=MODES, default="oracle-assisted")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("decide", help="decide perfect-matching existence by determinants")
    p.add_argument("file")
    _common(p, tight_default=True)
    p.add_argument("--mode", choices=MODES, default="oracle-assisted")
    p.set_defaults(func=cmd_decide)

    p = sub.add_parser("enumerate", help="list perfect matchings with signatures and weights")
    p.add_argument("file")
    _common(p)
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("draw", help="draw the planar subgraph")
    p.add_argument("file")
    p.add_argument("--format", choices=("svg", "dot"), default="svg")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_draw)
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except UsageError as exc:
        ap.print_usage(sys.stderr)
        print(f"pmisolate {args.command}: error: {exc}", file=sys.stderr)
    except (SchemaError, ValueError, OSError, EnumerationLimitError, FKSBudgetExhausted) as exc:
        print(f"pmisolate {args.command}: error: {exc}", file=sys.stderr)
    return 2


if __name__ == "__main__":
    sys.exit(main())
