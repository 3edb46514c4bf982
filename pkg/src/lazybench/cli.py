"""Command-line front end: ``lazybench eval|translate|tree|sim|check|corpus``."""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import List, Optional, Sequence

from .corpus import gen_corpus
from .inftree import label_at, prefix, tree_converges, tree_of
from .lcc import LetrecNotAllowed, evaluate_lcc
from .lr import evaluate_lr
from .name import evaluate_name
from .outcomes import Converged, Diverged, Stuck
from .parsing import ParseError, parse
from .simcheck import (SimBudgetExhausted, Refuted, SimConfig, bounded_le_Q, bounded_sim_iterates,
                       check_transformation, format_verdict, open_extension_check)
from .syntax import (STANDARD, Expr, SignatureError, SignatureTable, format_position, free_vars,
                     parse_position, pretty, pretty_canonical)
from .translate import translate_N, translate_Nprime, translate_W

EXIT_OK, EXIT_REFUTED, EXIT_ERROR, EXIT_STUCK, EXIT_BUDGET, EXIT_DIVERGED = 0, 1, 2, 3, 4, 5


class UsageError(Exception):
    """Reported on stderr with exit code 2."""


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _sig(args) -> SignatureTable:
    return SignatureTable.from_file(args.sig) if args.sig else STANDARD


def _load(path: str, sig: SignatureTable) -> Expr:
    try:
        return parse(_read(path), sig)
    except ParseError as exc:
        raise UsageError(f"{path}:{exc}") from None


def _emit(args, record: dict, text: str):
    print(json.dumps(record, ensure_ascii=False) if args.format == "json" else text)


# -- eval ---------------------------------------------------------------------

def cmd_eval(args) -> int:
    sig = _sig(args)
    e = _load(args.file, sig)
    if args.calculus == "tree":
        o = tree_converges(e, args.max_steps, args.descent_limit)
        verdict, code = (("Converged", EXIT_OK) if o.converged else
                         ("Stuck", EXIT_STUCK) if o.reason == "no-redex" else
                         ("Diverged", EXIT_DIVERGED) if o.reason == "omega" else ("Budget", EXIT_BUDGET))
        _emit(args, {"file": args.file, "calculus": "tree", "verdict": verdict, "reason": o.reason,
                     "steps": o.steps}, str(o))
        return code
    evaluate = {"lr": evaluate_lr, "name": evaluate_name, "lcc": evaluate_lcc}[args.calculus]

    def trace(n, rule, redex, cur):
        if args.format == "trace":
            print(f"{n} {rule} @{format_position(redex)} ; {pretty_canonical(cur)}")

    try:
        o = evaluate(e, max_steps=args.max_steps, detect_divergence=args.detect_divergence, trace=trace)
    except LetrecNotAllowed as exc:
        raise UsageError(str(exc)) from None
    record = {"file": args.file, "calculus": args.calculus, "steps": o.steps}
    if isinstance(o, Converged):
        record.update(verdict="Converged", kind=o.kind, whnf=pretty_canonical(o.whnf))
        text, code = f"Converged {o.kind} after {o.steps} steps: {pretty_canonical(o.whnf)}", EXIT_OK
    elif isinstance(o, Stuck):
        record.update(verdict="Stuck", reason=o.reason)
        text, code = f"Stuck after {o.steps} steps: {o.reason}", EXIT_STUCK
    elif isinstance(o, Diverged):
        record.update(verdict="Diverged", reason=o.reason)
        text, code = f"Diverged after {o.steps} steps ({o.reason})", EXIT_DIVERGED
    else:
        record.update(verdict="Budget", reason=o.reason)
        text, code = f"Budget exhausted after {o.steps} steps ({o.reason})", EXIT_BUDGET
    _emit(args, record, text)
    return code


# -- translate / tree ------------------------------------------------------------

def cmd_translate(args) -> int:
    e = translate_W(_load(args.file, _sig(args)))
    if args.to == "lcc":
        e = translate_N(e)
    elif args.to == "lcc-prime":
        e = translate_Nprime(e)
    out = pretty_canonical(e)
    _emit(args, {"file": args.file, "to": args.to, "expr": out}, out)
    return EXIT_OK


def cmd_tree(args) -> int:
    t = tree_of(_load(args.file, _sig(args)))
    if args.pos is not None:
        try:
            p = () if args.pos in ("", "ε", "e") else parse_position(args.pos)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        lab = label_at(t, p)
        text = f"{format_position(p)}: {lab if lab is not None else 'undefined'}"
        _emit(args, {"pos": format_position(p), "label": None if lab is None else str(lab)}, text)
        return EXIT_OK
    pre = prefix(t, args.depth)
    if args.format == "json":
        for p, lab in sorted(pre.labels.items(), key=lambda kv: (len(kv[0]), kv[0])):
            print(json.dumps({"pos": format_position(p), "label": str(lab)}, ensure_ascii=False))
    else:
        print(pre)
    return EXIT_OK


# -- sim / check / corpus ---------------------------------------------------------------

def _sim_cfg(args) -> SimConfig:
    try:
        return SimConfig(k=args.k, arg_size=args.arg_size, args_per_level=args.samples,
                         max_steps=args.max_steps, calculus=args.calculus, seed=args.seed,
                         sig=_sig(args))
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _verdict_record(v, cfg, **extra) -> dict:
    rec = dict(extra, verdict=str(v), k=cfg.k, args=cfg.args_per_level,
               witness=[str(q) for q in v.witness] if isinstance(v, Refuted) else None)
    if isinstance(v, Refuted) and v.substitution:
        rec["substitution"] = {x: pretty(r) for x, r in v.substitution}
    if isinstance(v, SimBudgetExhausted):
        rec["details"] = v.details
    return rec


def cmd_sim(args) -> int:
    cfg = _sim_cfg(args)
    a, b = _load(args.file_a, cfg.sig), _load(args.file_b, cfg.sig)
    if (free_vars(a) or free_vars(b)) and not args.open:
        raise UsageError("open expressions need --open")
    if args.open:
        check = lambda x, y: open_extension_check(x, y, cfg, args.substitutions)
    else:
        check = bounded_le_Q if args.method == "chains" else bounded_sim_iterates
        check = (lambda f: lambda x, y: f(x, y, cfg))(check)
    pairs = [("->", a, b)] if args.one_way else [("->", a, b), ("<-", b, a)]
    code = EXIT_OK
    for arrow, x, y in pairs:
        try:
            v = check(x, y)
        except (ValueError, LetrecNotAllowed) as exc:
            raise UsageError(str(exc)) from None
        _emit(args, _verdict_record(v, cfg, direction=arrow), f"{arrow} {format_verdict(v, cfg)}")
        if isinstance(v, Refuted):
            code = EXIT_REFUTED
    return code


def load_corpus(path: str, sig: SignatureTable) -> List[Expr]:
    """A directory of ``.l`` files (sorted by name) or a file with one
    expression per non-blank line."""
    if os.path.isdir(path):
        files = sorted(f for f in os.listdir(path) if f.endswith(".l"))
        return [_load(os.path.join(path, f), sig) for f in files]
    out = []
    for i, line in enumerate(_read(path).splitlines(), 1):
        if line.strip() and not line.lstrip().startswith("--"):
            try:
                out.append(parse(line, sig))
            except ParseError as exc:
                raise UsageError(f"{path}:{i}: {exc}") from None
    return out


def cmd_check(args) -> int:
    cfg = _sim_cfg(args)
    corpus = load_corpus(args.corpus, cfg.sig)
    try:
        report = check_transformation(args.rule, corpus, cfg, args.sim_sample)
    except KeyError as exc:
        raise UsageError(exc.args[0]) from None
    for c in report.counterexamples:
        _emit(args, {"rule": c.rule, "kind": c.kind, "expr": pretty(c.expr),
                     "pos": format_position(c.position), "result": pretty(c.result),
                     "before": c.before, "after": c.after, "witness": [str(q) for q in c.witness]},
              f"counterexample {c}")
    _emit(args, {"rule": report.rule, "expressions": report.expressions, "instances": report.instances,
                 "counterexamples": len(report.counterexamples), "inconclusive": report.inconclusive,
                 "sim_checked": report.sim_checked, "sim_inconclusive": report.sim_inconclusive},
          report.summary())
    return EXIT_OK if report.ok else EXIT_REFUTED


def cmd_corpus(args) -> int:
    sig = _sig(args)
    corpus = gen_corpus(sig, args.seed, args.count, args.size_bound, not args.open)
    width = len(str(len(corpus)))
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        for i, e in enumerate(corpus):
            with open(os.path.join(args.out, f"e{i:0{width}d}.l"), "w", encoding="utf-8") as fh:
                fh.write(pretty(e) + "\n")
        print(f"wrote {len(corpus)} expressions to {args.out}", file=sys.stderr)
    else:
        for i, e in enumerate(corpus):
            _emit(args, {"index": i, "expr": pretty(e)}, pretty(e))
    return EXIT_OK


# -- argument parsing ----------------------------------------------------------------

def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def _nonnegative(text: str) -> int:
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError("must be nonnegative")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--sig", metavar="PATH", help="data declarations (Bool is always present)")
    common.add_argument("--format", choices=("trace", "summary", "json"), default="trace",
                        help="json emits one record per line")

    sim = argparse.ArgumentParser(add_help=False)
    sim.add_argument("--k", type=_nonnegative, default=3, help="maximal context chain length")
    sim.add_argument("--arg-size", type=_positive, default=3)
    sim.add_argument("--samples", type=_positive, default=8, help="test arguments per level")
    sim.add_argument("--max-steps", type=_positive, default=2_000)
    sim.add_argument("--calculus", choices=("lr", "name", "lcc"), default="lr")
    sim.add_argument("--seed", type=int, default=0)

    ap = argparse.ArgumentParser(prog="lazybench", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", parents=[common], help="evaluate one expression")
    p.add_argument("file")
    p.add_argument("--calculus", choices=("lr", "name", "lcc", "tree"), default="lr")
    p.add_argument("--max-steps", type=_nonnegative, default=10_000)
    p.add_argument("--descent-limit", type=_positive, default=2_000)
    p.add_argument("--detect-divergence", action="store_true",
                   help="stop early on an exact loop or an Ω redex")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("translate", parents=[common], help="print a translated expression")
    p.add_argument("file")
    p.add_argument("--to", choices=("name", "lcc", "lcc-prime"), required=True)
    p.set_defaults(func=cmd_translate)

    p = sub.add_parser("tree", parents=[common], help="inspect the infinite tree")
    p.add_argument("file")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--depth", type=_nonnegative, default=3)
    g.add_argument("--pos", help="Dewey position such as 1.2 (ε for the root)")
    p.set_defaults(func=cmd_tree)

    p = sub.add_parser("sim", parents=[common, sim], help="bounded similarity of two expressions")
    p.add_argument("file_a")
    p.add_argument("file_b")
    p.add_argument("--method", choices=("chains", "iterates"), default="chains")
    p.add_argument("--one-way", action="store_true", help="only check A below B")
    p.add_argument("--open", action="store_true", help="sample closing substitutions")
    p.add_argument("--substitutions", type=_positive, default=12)
    p.set_defaults(func=cmd_sim)

    p = sub.add_parser("check", parents=[common, sim], help="test a transformation on a corpus")
    p.add_argument("rule", help="rule or family name (gc, lwas, gcp, lr, all, ...)")
    p.add_argument("corpus", help="directory of .l files or one expression per line")
    p.add_argument("--sim-sample", type=_nonnegative, default=10)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("corpus", help="corpus utilities")
    csub = p.add_subparsers(dest="action", required=True)
    g = csub.add_parser("gen", parents=[common], help="generate a seeded corpus")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--count", type=_positive, default=500)
    g.add_argument("--size-bound", type=_positive, default=40)
    g.add_argument("--open", action="store_true", help="allow free variables")
    g.add_argument("--out", metavar="DIR", help="write one .l file per expression")
    g.set_defaults(func=cmd_corpus)
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, SignatureError, OSError) as exc:
        print(f"lazybench: error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except Exception as exc:  # exit codes 0/1 are reserved for real verdicts
        print(f"lazybench: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
