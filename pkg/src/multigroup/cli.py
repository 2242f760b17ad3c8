"""Command line entry point: ``multigroup <command> ...``.

Exit status is 0 on success, 1 on invalid input and 2 when an exhaustive
computation would exceed its cap.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .bounds import BoundParams, alpha_n, foreach_bound, forall_bound, sample_size_cardinality, sample_size_vc
from .combinatorics import BinaryClassView, sauer_bound, vc_dimension
from .concepts import enumerate_concepts, find_consistent
from .errors import CapExceededError, ValidationError
from .harness import (
    LEARNERS,
    GeneratorSpec,
    child_rng,
    class_shatter_2n,
    conditional_errors,
    draw_sample,
    generate,
    learning_curve,
    lemma1_coverage,
    mistake_indicators,
    threshold_indicators,
)
from .improper import DEFAULT_ETA, improper_learn
from .reduction import build_reduction, parse_cnf, verify_reduction
from .textio import dumps_instance, format_label, read_instance, read_sample


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _read_text(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc.strerror}") from None


def _bool(v: bool) -> str:
    return "true" if v else "false"


def cmd_reduce(args) -> int:
    red = build_reduction(parse_cnf(_read_text(args.cnf)))
    _emit(dumps_instance(red.instance, red.sample), args.out)
    return 0


def cmd_verify_reduction(args) -> int:
    path = Path(args.path)
    if path.is_dir():
        files = sorted(p for p in path.iterdir() if p.suffix == ".cnf")
        if not files:
            raise ValidationError(f"no .cnf files in {path}")
    else:
        files = [path]
    lines = []
    agree = 0
    for f in files:
        r = verify_reduction(parse_cnf(_read_text(str(f))))
        agree += r["agree"]
        lines.append(f"{f.name} sat={_bool(r['sat'])} erm_consistent={_bool(r['erm_consistent'])} "
                     f"agree={_bool(r['agree'])}")
    lines.append(f"summary: {agree}/{len(files)} agree")
    _emit("\n".join(lines) + "\n", args.out)
    return 0 if agree == len(files) else 1


def _load(path: str):
    try:
        return read_instance(path)
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc.strerror}") from None


def cmd_solve_erm(args) -> int:
    inst, sample = _load(args.instance)
    if args.sample:
        sample = read_sample(args.sample)
    if sample is None:
        raise ValidationError("no sample given and none embedded in the instance")
    res = find_consistent(inst.groups, inst.hypotheses, sample, inst.domain)
    lines = [f"status: {res.status}"]
    if res.consistent:
        lines.append("[concept]")
        lines += [f"{x} {format_label(y)}" for x, y in res.concept.items()]
        lines.append("[witness]")
        lines += [f"{gid} {hid}" for gid, hid in res.witness.items()]
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def cmd_vc(args) -> int:
    inst, _ = _load(args.instance)
    if args.cls == "groups":
        view = BinaryClassView.from_groups(inst.groups, inst.domain)
    elif args.cls == "hypotheses":
        view = BinaryClassView.from_hypotheses(inst.hypotheses, inst.domain)
    else:
        view = BinaryClassView.from_concepts(
            enumerate_concepts(inst.groups, inst.hypotheses, inst.domain), inst.domain)
    _emit(f"class: {args.cls}\npatterns: {len(view)}\nvc_dimension: {vc_dimension(view)}\n", args.out)
    return 0


def cmd_bounds(args) -> int:
    p = BoundParams(n=args.n, delta=args.delta, epsilon=args.epsilon, gamma=args.gamma,
                    d_g=args.dg, d_G=args.dG, d_GH=args.dGH, d_H=args.dH, cardG=args.cardG,
                    bigC=args.bigC)
    lines = [
        f"alpha_n: {alpha_n(p.n, sauer_bound(2 * p.n, p.d_g), p.delta)!r}",
        f"foreach_bound: {foreach_bound(p.n, p.d_g, p.delta)!r}",
        f"forall_bound: {forall_bound(p.n, p.d_G, p.d_GH, p.delta)!r}",
        f"sample_size_vc: {sample_size_vc(p)}",
        f"sample_size_cardinality: {sample_size_cardinality(p)}",
    ]
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def cmd_improper(args) -> int:
    inst, sample = _load(args.instance)
    if args.n is not None:
        sample = draw_sample(inst, args.n, child_rng(args.seed, args.n))
    if sample is None:
        raise ValidationError("give --n or embed a [sample] in the instance")
    f = improper_learn(inst, sample, args.eta)
    lines = [f"examples: {len(sample)}", f"eta: {args.eta!r}", "[experts]"]
    lines += [f"{e.group_id} {e.hypothesis_id} {e.weight!r}" for e in f.experts]
    if inst.mass is not None and inst.deterministic:
        lines.append("[group_error]")
        lines += [f"{gid} {err!r}" for gid, err in conditional_errors(f, inst).items()]
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def _grid(text: str) -> list[int]:
    try:
        grid = [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise ValidationError(f"bad n grid {text!r}") from None
    if not grid or min(grid) < 1:
        raise ValidationError("n grid needs positive integers")
    return grid


def cmd_curve(args) -> int:
    table = learning_curve(args.learner, GeneratorSpec.parse(args.spec), _grid(args.n_grid),
                           args.trials, args.seed, args.eta)
    _emit(table.to_csv(), args.out)
    for n, trial, msg in table.failures:
        print(f"failed n={n} trial={trial}: {msg}", file=sys.stderr)
    return 0


def _function_class(text: str):
    """``thresholds[:m=..,count=..]`` or a generator spec (mistake indicators)."""
    kind, _, rest = text.partition(":")
    if kind != "thresholds":
        return mistake_indicators(generate(GeneratorSpec.parse(text)))
    opts = {"m": 32, "count": 16}
    for item in filter(None, rest.split(",")):
        key, _, value = item.partition("=")
        if key not in opts:
            raise ValidationError(f"bad thresholds option {item!r}")
        try:
            opts[key] = int(value)
        except ValueError:
            raise ValidationError(f"bad value in {item!r}") from None
    return threshold_indicators(opts["m"], opts["count"])


def cmd_lemma1(args) -> int:
    fc = _function_class(args.spec)
    shatter = class_shatter_2n(fc, args.n)
    frac = lemma1_coverage(fc, args.n, args.delta, args.trials, args.seed)
    lines = [f"functions: {len(fc.values)}", f"shatter_2n: {shatter}",
             f"alpha_n: {alpha_n(args.n, shatter, args.delta)!r}", f"violation_fraction: {frac!r}"]
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def cmd_generate(args) -> int:
    inst = generate(GeneratorSpec.parse(args.spec))
    sample = None
    if args.n is not None:
        sample = draw_sample(inst, args.n, np.random.default_rng(args.seed))
    _emit(dumps_instance(inst, sample), args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="multigroup", description="Multi-group learning toolkit.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help):
        p = sub.add_parser(name, help=help)
        p.set_defaults(func=func)
        p.add_argument("--out", help="write output here instead of stdout")
        return p

    p = add("reduce", cmd_reduce, "reduce a DIMACS 3-CNF formula to an instance file")
    p.add_argument("cnf")

    p = add("verify-reduction", cmd_verify_reduction, "check the reduction on a formula or a directory of .cnf files")
    p.add_argument("path")

    p = add("solve-erm", cmd_solve_erm, "find a concept of C(G, H) consistent with a sample")
    p.add_argument("instance")
    p.add_argument("sample", nargs="?", help="sample file (default: the instance's [sample])")

    p = add("vc", cmd_vc, "exact VC dimension of G, H or C(G, H)")
    p.add_argument("instance")
    p.add_argument("--class", dest="cls", choices=("groups", "hypotheses", "concepts"), default="hypotheses")

    p = add("bounds", cmd_bounds, "evaluate the generalization bounds and sample sizes")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--gamma", type=float, required=True)
    p.add_argument("--dg", type=int, required=True)
    p.add_argument("--dG", type=int, required=True)
    p.add_argument("--dGH", type=int, required=True)
    p.add_argument("--dH", type=int, default=None, help="VC dimension of H (default: --dGH)")
    p.add_argument("--cardG", type=int, required=True)
    p.add_argument("--bigC", type=float, default=4.0)

    p = add("improper", cmd_improper, "train the improper learner on a drawn or embedded sample")
    p.add_argument("instance")
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--eta", type=float, default=DEFAULT_ETA)
    p.add_argument("--seed", type=int, default=0)

    p = add("curve", cmd_curve, "learning curve as CSV")
    p.add_argument("--learner", choices=LEARNERS, required=True)
    p.add_argument("--spec", required=True, help="generator spec, e.g. threshold-line:m=64,groups=4")
    p.add_argument("--n-grid", required=True, help="comma separated sample sizes")
    p.add_argument("--trials", type=int, default=25)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--eta", type=float, default=DEFAULT_ETA)

    p = add("lemma1", cmd_lemma1, "Monte Carlo coverage of the relative deviation bound")
    p.add_argument("--spec", default="thresholds:m=32,count=16")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--trials", type=int, default=500)
    p.add_argument("--seed", type=int, default=0)

    p = add("generate", cmd_generate, "write a synthetic instance file")
    p.add_argument("--spec", required=True)
    p.add_argument("--n", type=int, default=None, help="also embed a sample of this size")
    p.add_argument("--seed", type=int, default=0)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CapExceededError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
