"""``aligned-xai`` command line: eval, query, reduce, bench, verify.

Exit codes: 0 ok, 1 verification mismatch, 2 schema/usage, 3 arity,
4 enumeration cap, 5 no fast path, 6 no constructor.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import bench as bench_mod
from .constructions import (
    SspInstance,
    embed_misaligned,
    indicator_reduction,
    model_class,
    self_align,
    ssp_solve,
    ssp_to_mcr,
    ReducedInstance,
)
from .core import BitVector, ConstantOne, FeatureSubset, evaluate
from .errors import (
    ConstructionError,
    DimensionError,
    EnumerationLimitError,
    FastPathUnavailable,
    SchemaError,
    StructuralError,
)
from .formats import load_model, model_to_dict, read_json, ssp_from_dict, write_bundle, write_json
from .queries import MODES, run_query

EXIT_OK, EXIT_MISMATCH, EXIT_SCHEMA, EXIT_ARITY, EXIT_CAP, EXIT_NO_FAST, EXIT_NO_CONSTRUCTOR = (
    0, 1, 2, 3, 4, 5, 6,
)


def _emit(doc, args, text: str | None = None):
    if getattr(args, "pretty", False):
        print(text if text is not None else _render(doc))
    else:
        print(json.dumps(doc, sort_keys=False))


def _render(doc, indent=0) -> str:
    pad = "  " * indent
    lines = []
    for key, value in doc.items():
        if isinstance(value, dict):
            lines.append(f"{pad}{key}:")
            lines.append(_render(value, indent + 1))
        else:
            lines.append(f"{pad}{key}: {value}")
    return "\n".join(lines)


def _input(args, n: int) -> BitVector:
    try:
        x = BitVector.parse(args.input)
    except ValueError as exc:
        raise SchemaError(str(exc)) from exc
    if x.n != n:
        raise DimensionError(f"input has {x.n} features, model expects {n}")
    return x


def _param(args, n: int):
    if getattr(args, "subset", None) is not None:
        try:
            return FeatureSubset.parse(args.subset, n)
        except DimensionError:
            raise
        except ValueError as exc:
            raise SchemaError(str(exc)) from exc
    k = getattr(args, "k", None)
    if k is not None and not 0 <= k <= n:
        raise DimensionError(f"k={k} outside 0..{n}")
    return k


def _indicator(args, n: int):
    if getattr(args, "indicator", None):
        pi = load_model(args.indicator)
        if pi.n != n:
            raise DimensionError(f"indicator arity {pi.n} differs from model arity {n}")
        return pi
    return ConstantOne(n)


def _threads(args) -> int:
    return args.threads if args.threads else (os.cpu_count() or 1)


# -- commands -----------------------------------------------------------------


def cmd_eval(args) -> int:
    f = load_model(args.model)
    x = _input(args, f.n)
    _emit({"value": evaluate(f, x)}, args)
    return EXIT_OK


def cmd_query(args) -> int:
    f = load_model(args.model)
    pi = _indicator(args, f.n)
    x = _input(args, f.n)
    if args.query == "cc" and args.subset is None:
        raise SchemaError("query cc needs --subset")
    param = _param(args, f.n)
    res = run_query(
        args.query, f, pi, x,
        k=param if isinstance(param, int) else None,
        subset=param if isinstance(param, FeatureSubset) else None,
        mode=args.mode, cap=args.cap, threads=_threads(args),
    )
    doc = res.to_json()
    if args.out:
        write_json(args.out, doc)
    _emit(doc, args)
    return EXIT_OK


_CONTRACT = {
    "embed": "aligned answers on (model, indicator, input) equal the misaligned answers of the source",
    "indicator": "aligned answers on (model, indicator, input) equal the misaligned answers of the source",
    "ssp": "aligned MCR with parameter k on the bundle equals the subset-sum answer",
    "selfalign": "misaligned answers of the model equal the aligned answers of the source pair",
}


def cmd_reduce(args) -> int:
    if not args.out:
        raise SchemaError("reduce needs --out DIR")
    kind = args.reduction
    if kind == "ssp":
        if args.ssp:
            inst = ssp_from_dict(read_json(args.ssp))
        else:
            if args.values is None or args.k is None or args.T is None:
                raise SchemaError("reduce ssp needs --ssp FILE or --values, --k and --T")
            try:
                values = tuple(int(v) for v in args.values.split(","))
                inst = SspInstance(values, args.k, args.T)
            except ValueError as exc:
                raise SchemaError(str(exc)) from exc
        red = ssp_to_mcr(inst, args.variant)
        red.provenance["expected_answer"] = ssp_solve(inst)
    else:
        f = load_model(args.model)
        x = _input(args, f.n)
        param = _param(args, f.n)
        if kind == "embed":
            red = embed_misaligned(f, x, param, args.target_class)
        elif kind == "indicator":
            red = indicator_reduction(f, x, param, args.target_class)
        else:
            if not args.indicator:
                raise SchemaError("reduce selfalign needs --indicator")
            pi = _indicator(args, f.n)
            g = self_align(f, pi, x)
            red = ReducedInstance(g, ConstantOne(f.n), x, param, {
                "reduction": "self_align", "source_class": model_class(f),
                "model_at_input": evaluate(f, x),
            })
    manifest = write_bundle(args.out, red, _CONTRACT[kind])
    _emit({"out": str(args.out), **manifest}, args)
    return EXIT_OK


def _sizes(text):
    return [int(v) for v in text.split(",")] if text else None


def cmd_bench(args) -> int:
    suites = args.suite or list(bench_mod.SUITES)
    sizes = {}
    if args.sizes:
        for s in suites:
            sizes[s] = _sizes(args.sizes)
    cfg = bench_mod.BenchConfig(suites, sizes, args.seed, args.reps, args.cap, _threads(args))
    rows = bench_mod.run_bench(cfg)
    text = bench_mod.to_csv(rows)
    if args.out:
        Path(args.out).write_text(text)
    sys.stdout.write(text)
    return EXIT_OK


def cmd_verify(args) -> int:
    from .verify import verify_instance

    f = load_model(args.model)
    pi = _indicator(args, f.n)
    x = _input(args, f.n)
    report = verify_instance(f, pi, x, cap=args.cap, seed=args.seed)
    _emit(report, args)
    return EXIT_OK if report["ok"] else EXIT_MISMATCH


# -- parser -------------------------------------------------------------------


def _common(p, model=True, indicator=True, param=True):
    if model:
        p.add_argument("--model", required=True, help="model JSON file")
    if indicator:
        p.add_argument("--indicator", help="indicator JSON file (default: constant one)")
    p.add_argument("--input", help="input bit string, feature 1 leftmost")
    if param:
        g = p.add_mutually_exclusive_group()
        g.add_argument("--k", type=int, help="cardinality bound")
        g.add_argument("--subset", help='feature subset, e.g. "{1,3}"')
    p.add_argument("--cap", type=int, help="enumeration cap (default 2^24 or $ALIGNED_XAI_CAP)")
    p.add_argument("--threads", type=int, default=0, help="worker threads (default: all cores)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="output path")
    p.add_argument("--pretty", action="store_true", help="human-readable output")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="aligned-xai", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="evaluate a model at an input")
    _common(p, indicator=False, param=False)
    p.set_defaults(func=cmd_eval, need_input=True)

    p = sub.add_parser("query", help="run an msr/mcr/cc query")
    _common(p)
    p.add_argument("--query", required=True, choices=("msr", "mcr", "cc"))
    p.add_argument("--mode", default="auto", choices=MODES)
    p.set_defaults(func=cmd_query, need_input=True)

    p = sub.add_parser("reduce", help="write a reduced instance bundle")
    p.add_argument("reduction", choices=("ssp", "embed", "indicator", "selfalign"))
    _common(p, model=False)
    p.add_argument("--model", help="source model JSON file")
    p.add_argument("--ssp", help="SSP instance JSON file")
    p.add_argument("--values", help="comma-separated SSP values")
    p.add_argument("--T", type=int, help="SSP target")
    p.add_argument("--variant", default="exact", choices=("exact", "paper"),
                   help="SSP construction: corrected (exact) or literal published parameters")
    p.add_argument("--target-class", choices=("fbdd", "perceptron", "mlp"),
                   help="class of the constructed indicator (embed) or model (indicator)")
    p.set_defaults(func=cmd_reduce, need_input=False)

    p = sub.add_parser("bench", help="runtime-scaling benchmark, CSV on stdout")
    p.add_argument("--suite", action="append", choices=bench_mod.SUITES)
    p.add_argument("--sizes", help="comma-separated sizes for every selected suite")
    p.add_argument("--reps", type=int, default=5)
    p.add_argument("--cap", type=int)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_bench, need_input=False)

    p = sub.add_parser("verify", help="oracle-equivalence checks on one instance")
    _common(p, param=False)
    p.set_defaults(func=cmd_verify, need_input=True)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "need_input", False) and not args.input:
        parser.error(f"{args.command} needs --input")
    if args.command == "reduce" and args.reduction != "ssp":
        if not args.model or not args.input:
            parser.error(f"reduce {args.reduction} needs --model and --input")
    try:
        return args.func(args)
    except (SchemaError, StructuralError, FileNotFoundError, IsADirectoryError) as exc:
        code, msg = EXIT_SCHEMA, str(exc)
    except DimensionError as exc:
        code, msg = EXIT_ARITY, str(exc)
    except EnumerationLimitError as exc:
        code, msg = EXIT_CAP, str(exc)
    except FastPathUnavailable as exc:
        code, msg = EXIT_NO_FAST, str(exc)
    except ConstructionError as exc:
        code, msg = EXIT_NO_CONSTRUCTOR, str(exc)
    print(json.dumps({"error": msg, "exit": code}), file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
