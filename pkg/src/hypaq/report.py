"""Static-vs-adaptive comparison rows, benchmark sweeps, CSV/JSON-lines output.

Row timing is opt-in (``timings=True``); with it off, runtime_ms is reported
as 0 so repeated runs produce byte-identical files.
"""

from __future__ import annotations

import csv
import io
import json
import time
from dataclasses import dataclass, fields

from .builders import WeightModel, build_adaptive, build_static
from .errors import AdaptiveConstructInStaticModeError, HypaqError, InvalidSizeError
from .generators import gen_iqpe, gen_qpe, gen_random_adaptive, gen_rus, gen_vqe
from .ir import Circuit, ForBlock, GateOp, IfBlock, Sequence, WhileBlock
from .layering import compute_layering
from .partitioner import PartitionConfig, partition

CSV_COLUMNS = (
    "circuit",
    "num_qubits",
    "mode",
    "estimated_depth",
    "total_gates",
    "active_edges",
    "edges_by_kind",
    "total_edge_weight",
    "cut_size",
    "cut_size_with_overhead",
    "balance",
    "heuristic",
    "k",
    "lambda",
    "epsilon",
    "seed",
    "runtime_ms",
    "error",
)


@dataclass(frozen=True, slots=True)
class ComparisonRow:
    """One (circuit, mode) measurement; ``error`` marks skipped modes."""

    circuit: str
    num_qubits: int
    mode: str
    estimated_depth: int | None = None
    total_gates: float | None = None
    active_edges: int | None = None
    edges_by_kind: dict[str, int] | None = None
    total_edge_weight: float | None = None
    cut_size: float | None = None
    cut_size_with_overhead: float | None = None
    balance: int | None = None
    heuristic: str = "fm"
    k: int = 2
    lambda_: float = 1.0
    epsilon: float = 0.1
    seed: int = 0
    runtime_ms: float = 0.0
    error: str | None = None

    def to_csv_record(self) -> dict[str, str]:
        def cell(value) -> str:
            if value is None:
                return ""
            if isinstance(value, dict):
                return json.dumps(value, sort_keys=True, separators=(",", ":"))
            return str(value)

        record = {}
        for f in fields(self):
            column = "lambda" if f.name == "lambda_" else f.name
            record[column] = cell(getattr(self, f.name))
        return record

    def to_json_dict(self) -> dict:
        data = {}
        for f in fields(self):
            key = "lambda" if f.name == "lambda_" else f.name
            data[key] = getattr(self, f.name)
        return data


def count_gate_instances(circuit: Circuit, while_multiplier: float = 1.0) -> float:
    """Gate instances with for-bodies expanded and while-bodies counted once
    (scaled by ``while_multiplier`` for sensitivity runs)."""

    def walk(block: Sequence, scale: float) -> float:
        total = 0.0
        for stmt in block.items:
            if isinstance(stmt, GateOp):
                total += scale
            elif isinstance(stmt, IfBlock):
                total += walk(stmt.then_body, scale) + walk(stmt.else_body, scale)
            elif isinstance(stmt, WhileBlock):
                total += walk(stmt.body, scale * while_multiplier)
            elif isinstance(stmt, ForBlock):
                total += stmt.count * walk(stmt.body, scale)
        return total

    return walk(circuit.body, 1.0)


def _row_for_mode(
    name: str,
    circuit: Circuit,
    mode: str,
    wm: WeightModel,
    cfg: PartitionConfig,
    grouping: bool,
    expected_iterations: float,
    timings: bool,
) -> ComparisonRow:
    common = dict(
        circuit=name,
        num_qubits=circuit.num_qubits,
        mode=mode,
        heuristic=cfg.heuristic,
        k=cfg.k,
        lambda_=cfg.lambda_,
        epsilon=cfg.epsilon,
        seed=cfg.seed,
    )
    started = time.perf_counter() if timings else 0.0
    try:
        if mode == "static":
            graph = build_static(circuit, wm)
        else:
            graph = build_adaptive(circuit, wm, grouping=grouping)
        result = partition(graph, cfg)
        stats = graph.stats()
        depth = compute_layering(circuit).depth
        gates = count_gate_instances(circuit, expected_iterations)
        runtime = (time.perf_counter() - started) * 1000.0 if timings else 0.0
        return ComparisonRow(
            estimated_depth=depth,
            total_gates=gates if gates != int(gates) else int(gates),
            active_edges=stats.num_edges,
            edges_by_kind=stats.edges_by_kind,
            total_edge_weight=stats.total_weight,
            cut_size=result.cut_size,
            cut_size_with_overhead=result.cut_size_with_overhead,
            balance=result.balance,
            runtime_ms=round(runtime, 3),
            **common,
        )
    except AdaptiveConstructInStaticModeError as exc:
        return ComparisonRow(error=f"static mode skipped: {exc}", **common)


def compare(
    circuit: Circuit,
    wm: WeightModel | None = None,
    cfg: PartitionConfig | None = None,
    grouping: bool = True,
    expected_iterations: float = 1.0,
    timings: bool = False,
    name: str | None = None,
) -> tuple[ComparisonRow, ComparisonRow]:
    """(static row, adaptive row) for one circuit.

    The static row carries an error marker instead of metrics when the
    circuit contains if/while blocks. Identical inputs produce identical
    rows (modulo opt-in timings).
    """
    wm = wm or WeightModel()
    cfg = cfg or PartitionConfig()
    row_name = name if name is not None else circuit.name
    static_row = _row_for_mode(
        row_name, circuit, "static", wm, cfg, grouping, expected_iterations, timings
    )
    adaptive_row = _row_for_mode(
        row_name, circuit, "adaptive", wm, cfg, grouping, expected_iterations, timings
    )
    return static_row, adaptive_row


# -- generator specs and sweeps -------------------------------------------------

_FAMILIES = ("qpe", "iqpe", "vqe", "rand", "rus")

DEFAULT_SWEEP_SIZES: dict[str, list[int]] = {
    "rus": list(range(4, 49, 4)),
    "qpe": list(range(2, 11)),
    "iqpe": list(range(2, 11)),
    "rand": list(range(4, 17, 2)),
    "vqe": list(range(2, 11, 2)),
}

# Default seed for the rand sweep family: the default size ladder
# (n=4..16, depth=2n) shows the expected rising depth/edge trend under it.
DEFAULT_RAND_SEED = 3


def parse_generator_spec(spec: str) -> Circuit:
    """Build a circuit from a ``name(arg=value,...)`` spec string."""
    spec = spec.strip()
    name, _, rest = spec.partition("(")
    name = name.strip()
    if name not in _FAMILIES:
        raise InvalidSizeError(
            f"unknown generator {name!r}; expected one of {', '.join(_FAMILIES)}"
        )
    kwargs: dict[str, float] = {}
    if rest:
        if not rest.endswith(")"):
            raise InvalidSizeError(f"malformed generator spec {spec!r}")
        body = rest[:-1].strip()
        if body:
            for item in body.split(","):
                key, eq, value = item.partition("=")
                if not eq:
                    raise InvalidSizeError(
                        f"generator argument {item.strip()!r} must be key=value"
                    )
                key = key.strip()
                value = value.strip()
                try:
                    kwargs[key] = float(value) if ("." in value or "e" in value) else int(value)
                except ValueError as exc:
                    raise InvalidSizeError(
                        f"bad value {value!r} for generator argument {key!r}"
                    ) from exc

    def take(key: str, default=None):
        if key in kwargs:
            return kwargs.pop(key)
        if default is None:
            raise InvalidSizeError(f"generator {name!r} requires argument {key!r}")
        return default

    if name == "qpe":
        circuit = gen_qpe(int(take("n")))
    elif name == "iqpe":
        circuit = gen_iqpe(int(take("iters")))
    elif name == "vqe":
        circuit = gen_vqe(
            int(take("n")), int(take("layers", 2)), int(take("iters", 2))
        )
    elif name == "rus":
        circuit = gen_rus(int(take("n")))
    else:
        n = int(take("n"))
        depth = int(take("depth", 2 * n))
        seed = int(take("seed", DEFAULT_RAND_SEED))
        probs = {k[2:]: float(v) for k, v in list(kwargs.items()) if k.startswith("p_")}
        for key in list(kwargs):
            if key.startswith("p_"):
                kwargs.pop(key)
        circuit = gen_random_adaptive(n, depth, seed, probs=probs or None)
    if kwargs:
        raise InvalidSizeError(
            f"unknown arguments for generator {name!r}: {', '.join(sorted(kwargs))}"
        )
    return circuit


def spec_for(family: str, size: int) -> str:
    """Canonical spec string for one family at one sweep size."""
    if family == "qpe":
        return f"qpe(n={size})"
    if family == "iqpe":
        return f"iqpe(iters={size})"
    if family == "vqe":
        return f"vqe(n={size},layers=2,iters=2)"
    if family == "rus":
        return f"rus(n={size})"
    if family == "rand":
        return f"rand(n={size},depth={2 * size},seed={DEFAULT_RAND_SEED})"
    raise InvalidSizeError(f"unknown family {family!r}")


def sweep(
    suite: list[str],
    sizes: dict[str, list[int]] | None = None,
    wm: WeightModel | None = None,
    cfg: PartitionConfig | None = None,
    grouping: bool = True,
    expected_iterations: float = 1.0,
    timings: bool = False,
) -> list[ComparisonRow]:
    """Comparison rows for each (family, size, mode), sorted by suite order,
    size, then mode. Per-row failures land in the error column."""
    sizes = sizes or {}
    rows: list[ComparisonRow] = []
    for family in suite:
        if family not in _FAMILIES:
            raise InvalidSizeError(
                f"unknown family {family!r}; expected one of {', '.join(_FAMILIES)}"
            )
        ladder = sizes.get(family) or DEFAULT_SWEEP_SIZES[family]
        for size in ladder:
            spec = spec_for(family, size)
            try:
                circuit = parse_generator_spec(spec)
            except HypaqError as exc:
                rows.append(
                    ComparisonRow(
                        circuit=spec,
                        num_qubits=0,
                        mode="adaptive",
                        error=str(exc),
                    )
                )
                continue
            static_row, adaptive_row = compare(
                circuit,
                wm,
                cfg,
                grouping=grouping,
                expected_iterations=expected_iterations,
                timings=timings,
                name=spec,
            )
            rows.append(static_row)
            rows.append(adaptive_row)
    return rows


def rows_to_csv(rows: list[ComparisonRow]) -> str:
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=list(CSV_COLUMNS), lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow(row.to_csv_record())
    return buffer.getvalue()


def rows_to_jsonl(rows: list[ComparisonRow]) -> str:
    return (
        "\n".join(
            json.dumps(row.to_json_dict(), sort_keys=True, separators=(",", ":"))
            for row in rows
        )
        + "\n"
    )
