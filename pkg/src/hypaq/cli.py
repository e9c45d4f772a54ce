"""Command-line front end.

Subcommands: parse, generate, hypergraph, partition, compare, sweep.
Data goes to stdout (or ``-o FILE``); diagnostics go to stderr. Exit codes:
0 success, 1 input or validation error, 2 internal invariant violation.

Inputs are circuit text files, or generator specs like ``rus(n=8)`` (an
argument shaped ``name(...)`` is treated as a spec). The environment
variable ``HYPAQ_CONFIG`` supplies a default weight-model file.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import re
import sys
import time

from .builders import WeightModel, build_adaptive, build_static, load_weight_model
from .errors import HypaqError
from .generators import RANDOM_DEFAULT_PROBS
from .hypergraph import Hypergraph
from .ir import circuit_to_dict
from .parser import parse_circuit, serialize_circuit
from .partitioner import PartitionConfig, partition
from .report import (
    DEFAULT_SWEEP_SIZES,
    compare,
    parse_generator_spec,
    rows_to_csv,
    rows_to_jsonl,
    sweep,
)

_SPEC_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\(.*\)\Z")

PARTITION_CSV_COLUMNS = (
    "circuit",
    "mode",
    "k",
    "lambda",
    "epsilon",
    "heuristic",
    "cut_size",
    "cut_size_with_overhead",
    "balance",
    "moves_applied",
    "runtime_ms",
)


class _Parser(argparse.ArgumentParser):
    """argparse with the documented exit-code contract (1 on usage errors)."""

    def error(self, message: str):  # noqa: D102 - argparse hook
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _load_circuit(source: str):
    if _SPEC_RE.match(source):
        circuit = parse_generator_spec(source)
        return circuit, source
    try:
        with open(source, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise HypaqError(f"cannot read {source}: {exc.strerror}") from exc
    circuit = parse_circuit(text)
    return circuit, circuit.name


def _load_weight_model(path: str | None) -> WeightModel:
    path = path or os.environ.get("HYPAQ_CONFIG")
    if path:
        return load_weight_model(path)
    return WeightModel()


def _emit(data: str, output: str | None) -> None:
    if output and output != "-":
        with open(output, "w", encoding="utf-8") as fh:
            fh.write(data)
    else:
        sys.stdout.write(data)


def _config_from_args(args: argparse.Namespace) -> PartitionConfig:
    return PartitionConfig(
        k=args.k,
        lambda_=args.lambda_,
        epsilon=args.epsilon,
        max_passes=args.max_passes,
        seed=args.seed,
        heuristic=args.heuristic,
        comm_overhead_factor=args.comm_factor,
        repartition_after_overhead=getattr(args, "repartition_after_overhead", False),
    )


def _add_partition_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("-k", type=int, default=2, help="number of QPU blocks")
    p.add_argument(
        "--lambda", dest="lambda_", type=float, default=1.0,
        help="gain trade-off between cut size and balance",
    )
    p.add_argument("--epsilon", type=float, default=0.1, help="balance tolerance fraction")
    p.add_argument("--max-passes", type=int, default=20, help="refinement pass limit")
    p.add_argument("--seed", type=int, default=0, help="seed for stochastic behavior")
    p.add_argument(
        "--heuristic", choices=("fm", "kl"), default="fm", help="refinement heuristic"
    )
    p.add_argument(
        "--comm-factor", type=float, default=2.0,
        help="weight factor for cut conditional edges",
    )
    p.add_argument(
        "--weights", metavar="FILE", default=None,
        help="weight-model config file (default: $HYPAQ_CONFIG)",
    )
    p.add_argument(
        "--grouping", action=argparse.BooleanOptionalAction, default=True,
        help="aggregate control-flow blocks into super-group edges",
    )


def _build_graph(circuit, mode: str, wm: WeightModel, grouping: bool) -> Hypergraph:
    if mode == "static":
        return build_static(circuit, wm)
    return build_adaptive(circuit, wm, grouping=grouping)


def _cmd_parse(args: argparse.Namespace) -> None:
    circuit, _ = _load_circuit(args.source)
    if args.strict:
        circuit.validate(strict=True)
    if args.format == "json":
        _emit(json.dumps(circuit_to_dict(circuit), indent=2) + "\n", args.output)
    else:
        _emit(serialize_circuit(circuit), args.output)


def _cmd_generate(args: argparse.Namespace) -> None:
    circuit = parse_generator_spec(args.spec)
    if args.format == "json":
        _emit(json.dumps(circuit_to_dict(circuit), indent=2) + "\n", args.output)
    else:
        _emit(serialize_circuit(circuit), args.output)


def _cmd_hypergraph(args: argparse.Namespace) -> None:
    circuit, _ = _load_circuit(args.source)
    wm = _load_weight_model(args.weights)
    graph = _build_graph(circuit, args.mode, wm, args.grouping)
    if args.format == "json":
        _emit(json.dumps(graph.to_dict(), indent=2) + "\n", args.output)
    elif args.format == "hmetis":
        _emit(graph.export_hmetis(), args.output)
    elif args.format == "incidence":
        _emit(graph.incidence_matrix().to_csv(), args.output)
    else:  # csv: active edge list
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(["edge_id", "label", "kind", "weight", "pins", "layer"])
        for edge in graph.active_edges():
            from .hypergraph import kind_name

            writer.writerow(
                [
                    edge.id,
                    edge.label,
                    kind_name(edge.kind),
                    edge.weight,
                    " ".join(str(p) for p in sorted(edge.pins)),
                    "" if edge.layer is None else edge.layer,
                ]
            )
        _emit(buffer.getvalue(), args.output)


def _cmd_partition(args: argparse.Namespace) -> None:
    circuit, name = _load_circuit(args.source)
    wm = _load_weight_model(args.weights)
    cfg = _config_from_args(args)
    started = time.perf_counter() if args.timings else 0.0
    graph = _build_graph(circuit, args.mode, wm, args.grouping)
    result = partition(graph, cfg)
    runtime = (time.perf_counter() - started) * 1000.0 if args.timings else 0.0
    if args.format == "json":
        payload = result.to_dict()
        payload["circuit"] = name
        payload["mode"] = args.mode
        payload["runtime_ms"] = round(runtime, 3)
        _emit(json.dumps(payload, indent=2) + "\n", args.output)
    else:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(list(PARTITION_CSV_COLUMNS))
        writer.writerow(
            [
                name,
                args.mode,
                cfg.k,
                cfg.lambda_,
                cfg.epsilon,
                cfg.heuristic,
                result.cut_size,
                result.cut_size_with_overhead,
                result.balance,
                result.moves_applied,
                round(runtime, 3),
            ]
        )
        _emit(buffer.getvalue(), args.output)


def _cmd_compare(args: argparse.Namespace) -> None:
    circuit, name = _load_circuit(args.source)
    wm = _load_weight_model(args.weights)
    cfg = _config_from_args(args)
    static_row, adaptive_row = compare(
        circuit,
        wm,
        cfg,
        grouping=args.grouping,
        expected_iterations=args.expected_iterations,
        timings=args.timings,
        name=name,
    )
    rows = [static_row, adaptive_row]
    if args.format == "json":
        _emit(
            json.dumps([r.to_json_dict() for r in rows], indent=2) + "\n", args.output
        )
    else:
        _emit(rows_to_csv(rows), args.output)


def _parse_sizes(text: str) -> list[int]:
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise HypaqError(f"--sizes expects A:B:S or a comma list, got {text!r}")
        start, stop, step = (int(p) for p in parts)
        if step < 1:
            raise HypaqError("--sizes step must be >= 1")
        return list(range(start, stop + 1, step))
    return [int(p) for p in text.split(",") if p.strip()]


def _cmd_sweep(args: argparse.Namespace) -> None:
    suite = [s.strip() for s in args.suite.split(",") if s.strip()]
    wm = _load_weight_model(args.weights)
    cfg = _config_from_args(args)
    sizes = None
    if args.sizes:
        ladder = _parse_sizes(args.sizes)
        sizes = {family: ladder for family in suite}
    rows = sweep(
        suite,
        sizes=sizes,
        wm=wm,
        cfg=cfg,
        grouping=args.grouping,
        expected_iterations=args.expected_iterations,
        timings=args.timings,
    )
    if args.format == "jsonl":
        _emit(rows_to_jsonl(rows), args.output)
    else:
        _emit(rows_to_csv(rows), args.output)


def build_arg_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="hypaq",
        description=(
            "Parse quantum circuits with classical control flow, translate them "
            "into primal or extended hypergraphs, and partition across QPUs."
        ),
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, help_text: str) -> argparse.ArgumentParser:
        p = sub.add_parser(
            name, help=help_text, formatter_class=argparse.ArgumentDefaultsHelpFormatter
        )
        p.add_argument("-o", "--output", default=None, help="output file (default stdout)")
        return p

    p = add("parse", "parse circuit text and emit IR")
    p.add_argument("source", help="circuit file or generator spec like rus(n=8)")
    p.add_argument("--format", choices=("json", "text"), default="json",
                   help="IR JSON or canonical circuit text")
    p.add_argument(
        "--strict", action="store_true",
        help="treat conditions on unmeasured bits as errors",
    )
    p.set_defaults(func=_cmd_parse)

    p = add("generate", "emit a benchmark circuit")
    p.add_argument(
        "spec",
        help=(
            "generator spec: qpe(n=..), iqpe(iters=..), vqe(n=..,layers=..,iters=..), "
            f"rand(n=..,depth=..,seed=..,p_if=..), rus(n=..); "
            f"random draw defaults {RANDOM_DEFAULT_PROBS}"
        ),
    )
    p.add_argument("--format", choices=("text", "json"), default="text",
                   help="canonical circuit text or IR JSON")
    p.set_defaults(func=_cmd_generate)

    p = add("hypergraph", "translate a circuit into a hypergraph")
    p.add_argument("source", help="circuit file or generator spec")
    p.add_argument(
        "--mode", choices=("static", "adaptive"), default="adaptive",
        help="primal (static) or extended (adaptive) translation",
    )
    p.add_argument(
        "--format", choices=("json", "csv", "hmetis", "incidence"), default="json",
        help="output representation",
    )
    p.add_argument("--weights", metavar="FILE", default=None,
                   help="weight-model config file (default: $HYPAQ_CONFIG)")
    p.add_argument(
        "--grouping", action=argparse.BooleanOptionalAction, default=True,
        help="aggregate control-flow blocks into super-group edges",
    )
    p.set_defaults(func=_cmd_hypergraph)

    p = add("partition", "build a hypergraph and partition it")
    p.add_argument("source", help="circuit file or generator spec")
    p.add_argument(
        "--mode", choices=("static", "adaptive"), default="adaptive",
        help="primal (static) or extended (adaptive) translation",
    )
    _add_partition_flags(p)
    p.add_argument(
        "--repartition-after-overhead", action="store_true",
        help="rerun FM once with overhead-adjusted conditional weights",
    )
    p.add_argument("--format", choices=("json", "csv"), default="json",
                   help="result as JSON or one-line CSV summary")
    p.add_argument("--timings", action="store_true", help="report wall time (breaks byte-identical reruns)")
    p.set_defaults(func=_cmd_partition)

    p = add("compare", "static vs adaptive rows for one circuit")
    p.add_argument("source", help="circuit file or generator spec")
    _add_partition_flags(p)
    p.add_argument(
        "--expected-iterations", type=float, default=1.0,
        help="while-body gate multiplier for sensitivity runs",
    )
    p.add_argument("--format", choices=("csv", "json"), default="csv",
                   help="row output format")
    p.add_argument("--timings", action="store_true", help="report wall time (breaks byte-identical reruns)")
    p.set_defaults(func=_cmd_compare)

    p = add("sweep", "comparison table over benchmark families")
    p.add_argument(
        "--suite", default="rus,qpe,iqpe,rand",
        help="comma list of families (qpe,iqpe,vqe,rand,rus)",
    )
    p.add_argument(
        "--sizes", default=None,
        help=(
            "size ladder A:B:S (inclusive) or comma list applied to every family; "
            f"per-family defaults {DEFAULT_SWEEP_SIZES}"
        ),
    )
    _add_partition_flags(p)
    p.add_argument(
        "--expected-iterations", type=float, default=1.0,
        help="while-body gate multiplier for sensitivity runs",
    )
    p.add_argument("--format", choices=("csv", "jsonl"), default="csv",
                   help="table output format")
    p.add_argument("--timings", action="store_true", help="report wall time (breaks byte-identical reruns)")
    p.set_defaults(func=_cmd_sweep)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_arg_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        args.func(args)
    except HypaqError as exc:
        print(f"hypaq {args.command}: error: {exc}", file=sys.stderr)
        return 1
    except (AssertionError, RuntimeError) as exc:  # internal invariant violations
        print(f"hypaq {args.command}: internal error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":  # pragma: no cover
    raise SystemExit(main())
