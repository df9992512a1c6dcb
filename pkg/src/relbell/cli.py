"""Command-line entry point.

    relbell run --input log.jsonl --output report.json [--oracle]
    relbell order-effects --input log.jsonl --doc D --dims topicality,reliability
    relbell schmidt --input log.jsonl --pair D1,D2 | --oracle | --state 0.8,0,0,0.6
    relbell oracle

Exit codes: 0 success, 1 input error, 2 internal invariant failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

from .composite import CompositeState, bell_state, schmidt_decompose, tensor_product
from .hilbert import DEFAULT_DIMENSIONS, InputError, order_effect
from .loglab import parse_log, prepare
from .pipeline import (
    RunConfig,
    dumps,
    invariant_failures,
    oracle_block,
    run_pipeline,
    write_atomic,
)

log = logging.getLogger("relbell")

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_INTERNAL = 2

_CASES = {"1": "I", "2": "II", "3": "III"}


class InvariantFailure(RuntimeError):
    pass


def _split(text: str) -> list[str]:
    return [t.strip() for t in text.split(",") if t.strip()]


def _cases(text: str) -> tuple[str, ...]:
    if text == "all":
        return ("I", "II", "III")
    out = []
    for part in _split(text):
        if part not in _CASES:
            raise argparse.ArgumentTypeError(f"case must be 1, 2, 3 or all, got {part!r}")
        out.append(_CASES[part])
    return tuple(dict.fromkeys(out))


def _read_lines(path: str) -> list[str]:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.readlines()
    except OSError as exc:
        raise InputError(f"cannot read input {path!r}: {exc.strerror}") from None


def _emit(text: str, output: str | None) -> None:
    if output:
        try:
            write_atomic(output, text)
        except OSError as exc:
            raise InputError(f"cannot write output {output!r}: {exc.strerror}") from None
    else:
        sys.stdout.write(text)


def _add_log_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--input", required=True, metavar="PATH", help="JSON-lines judgment log")
    p.add_argument(
        "--dimensions",
        type=_split,
        default=list(DEFAULT_DIMENSIONS),
        metavar="LIST",
        help="comma-separated relevance dimensions (default: the seven standard ones)",
    )
    p.add_argument("--standard", metavar="NAME", help="standard basis (default: first dimension)")


def _load_queries(args):
    dims = args.dimensions
    standard = args.standard or dims[0]
    RunConfig(dimensions=tuple(dims), standard_dimension=standard)
    groups = parse_log(_read_lines(args.input), dims, source=args.input)
    return prepare(groups, standard, dims)


def cmd_run(args) -> int:
    config = RunConfig(
        dimensions=tuple(args.dimensions),
        standard_dimension=args.standard,
        cases=args.case,
        forms=tuple(args.forms),
        min_cooccurrence=args.min_cooccurrence,
        half_tolerance=args.half_tolerance,
        oracle_mode=args.oracle,
        output_format=args.format,
    )
    groups = parse_log(_read_lines(args.input), config.dimensions, source=args.input)
    log.debug("parsed %d queries from %s", len(groups), args.input)
    report = run_pipeline(groups, config, workers=args.workers)
    problems = invariant_failures(report)
    if problems:
        raise InvariantFailure("; ".join(problems))
    _emit(dumps(report, config.output_format), args.output)
    agg = report["aggregates"]
    summary = (
        f"pairs tested: {agg['pairs_tested']}, violations found: {agg['violations_total']}"
    )
    print(summary, file=sys.stderr if not args.output else sys.stdout)
    return EXIT_OK


def cmd_order_effects(args) -> int:
    dims = _split(args.dims)
    if len(dims) != 2:
        raise InputError("--dims needs exactly two dimension names")
    queries = _load_queries(args)
    rows = []
    for q in queries:
        if args.query and q.query_id != args.query:
            continue
        doc = q.states.get(args.doc)
        if doc is None:
            continue
        eff = order_effect(doc, dims[0], dims[1])
        rows.append((q.query_id, doc.doc_id, eff))
    if not rows:
        where = f" in query {args.query!r}" if args.query else ""
        raise InputError(f"document {args.doc!r} not found{where}")
    a, b = dims
    print(f"query\tdoc\t{a}->{b}\t{b}->{a}\tratio")
    for qid, doc_id, eff in rows:
        ratio = "undefined" if eff.ratio is None else f"{eff.ratio:.6g}"
        print(f"{qid}\t{doc_id}\t{eff.forward:.6g}\t{eff.reverse:.6g}\t{ratio}")
    return EXIT_OK


def cmd_schmidt(args) -> int:
    if args.oracle:
        label, psi = "phi_plus", bell_state("phi_plus")
    elif args.state:
        values = [float(v) for v in _split(args.state)]
        label, psi = "state", CompositeState(values)
    else:
        if not args.input or not args.pair:
            raise InputError("schmidt needs --oracle, --state, or --input with --pair")
        ids = _split(args.pair)
        if len(ids) != 2:
            raise InputError("--pair needs two document ids")
        first, second = sorted(ids)
        queries = _load_queries(args)
        hits = [
            q
            for q in queries
            if first in q.states and second in q.states
            and (not args.query or q.query_id == args.query)
        ]
        if not hits:
            raise InputError(f"pair {first},{second} does not co-occur in any query")
        q = hits[-1]
        label = f"{q.query_id}:{first},{second}"
        psi = tensor_product(q.states[first].vector(), q.states[second].vector())
    s = schmidt_decompose(psi)
    s1, s2 = s.singular_values
    verdict = "separable" if s.separable else "entangled"
    print(f"{label}\tsingular_values={s1:.12g},{s2:.12g}\trank={s.rank}\t{verdict}")
    return EXIT_OK


def cmd_oracle(args) -> int:
    block = oracle_block()
    json_to_stdout = args.format == "json" and not args.output
    if args.output or args.format == "json":
        _emit(json.dumps(block, indent=2) + "\n", args.output)
    r = block["results"][0]
    print(
        f"phi_plus chsh_composite statistic={r['statistic']:.12g} "
        f"bound={r['bound_high']:g} violated={str(r['violated']).lower()}",
        file=sys.stderr if json_to_stdout else sys.stdout,
    )
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="relbell", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="full pipeline over a judgment log")
    _add_log_options(run)
    run.add_argument("--output", metavar="PATH", help="report path (default: stdout)")
    run.add_argument("--format", choices=("json", "csv"), default="json")
    run.add_argument("--case", type=_cases, default=("I", "II", "III"),
                     help="1, 2, 3, a comma list of them, or all")
    run.add_argument("--forms", type=_split,
                     default=["chsh_trace", "chsh_probability", "n_settings"], metavar="LIST")
    run.add_argument("--min-cooccurrence", type=int, default=2, metavar="N")
    run.add_argument("--half-tolerance", type=float, default=0.0, metavar="X")
    run.add_argument("--oracle", action="store_true", help="add the phi_plus oracle block")
    run.add_argument("--workers", type=int, default=1, metavar="N")
    run.set_defaults(func=cmd_run)

    oe = sub.add_parser("order-effects", help="forward/reverse judgment-order probabilities")
    _add_log_options(oe)
    oe.add_argument("--doc", required=True, metavar="DOC_ID")
    oe.add_argument("--query", metavar="QUERY_ID", help="restrict to one query")
    oe.add_argument("--dims", required=True, metavar="A,B")
    oe.set_defaults(func=cmd_order_effects)

    sch = sub.add_parser("schmidt", help="Schmidt decomposition of a document pair")
    sch.add_argument("--input", metavar="PATH")
    sch.add_argument("--dimensions", type=_split, default=list(DEFAULT_DIMENSIONS), metavar="LIST")
    sch.add_argument("--standard", metavar="NAME")
    sch.add_argument("--pair", metavar="D1,D2")
    sch.add_argument("--query", metavar="QUERY_ID")
    sch.add_argument("--oracle", action="store_true", help="use phi_plus instead of a pair")
    sch.add_argument("--state", metavar="C00,C01,C10,C11", help="explicit composite state")
    sch.set_defaults(func=cmd_schmidt)

    orc = sub.add_parser("oracle", help="CHSH on phi_plus with optimal observables")
    orc.add_argument("--output", metavar="PATH")
    orc.add_argument("--format", choices=("json", "text"), default="text")
    orc.set_defaults(func=cmd_oracle)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(name)s: %(levelname)s: %(message)s",
    )
    try:
        return args.func(args)
    except InputError as exc:
        print(f"relbell: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ValueError as exc:
        print(f"relbell: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except InvariantFailure as exc:
        print(f"relbell: internal invariant failure: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
