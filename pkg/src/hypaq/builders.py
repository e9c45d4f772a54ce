"""Circuit-to-hypergraph translation and the edge weight model.

``build_static`` maps a control-flow-free circuit onto a primal hypergraph
(qubit vertices, one standard edge per multi-qubit gate instance).

``build_adaptive`` maps any circuit onto an extended hypergraph: classical
bits that matter become vertices, conditioned gates become conditional edges
pinned to their guard bits, measurements feeding later conditions become
measurement edges, and (optionally) each outermost control-flow block is
aggregated into a super-group edge that absorbs its members.

Both builders are pure functions of (circuit, weight model) and safe to run
concurrently on distinct inputs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

from .errors import (
    AdaptiveConstructInStaticModeError,
    ConfigError,
    WhileInStaticModeError,
)
from .ir import (
    BitEquals,
    Circuit,
    Condition,
    ForBlock,
    GateOp,
    IfBlock,
    MeasureOp,
    RegisterEquals,
    ResetOp,
    Sequence,
    WhileBlock,
    condition_bits,
)
from .layering import FlatStatement, compute_layering, flatten
from .hypergraph import (
    Conditional,
    GraphMode,
    Hypergraph,
    MeasurementEdge,
    Standard,
    SuperGroup,
    VertexKind,
)

DEPENDENT_GATE_COUNT = "dependent_gate_count"


@dataclass(frozen=True)
class WeightModel:
    """Edge weight assignment rules.

    ``base_gate_weight`` maps gate arity to a base weight (unlisted arities
    weigh 1.0). ``measurement_impact`` is either the sentinel string
    ``dependent_gate_count`` (weight = number of downstream statements whose
    guard reads the written bit) or a constant float. Conditional edges weigh
    base x execution probability; probabilities come from pattern overrides
    or from the uniform-outcome default (0.5 per constrained bit).
    ``while_iteration_multiplier`` scales weights of edges inside while
    bodies (bodies are counted once by default).
    """

    base_gate_weight: Mapping[int, float] = field(default_factory=dict)
    measurement_impact: float | str = DEPENDENT_GATE_COUNT
    conditional_probability_default: float = 0.5
    probability_overrides: Mapping[str, float] = field(default_factory=dict)
    while_iteration_multiplier: float = 1.0

    def __post_init__(self) -> None:
        for arity, weight in self.base_gate_weight.items():
            if weight < 0:
                raise ConfigError(f"base weight for arity {arity} is negative")
        if isinstance(self.measurement_impact, str):
            if self.measurement_impact != DEPENDENT_GATE_COUNT:
                raise ConfigError(
                    f"measurement_impact must be a number or "
                    f"{DEPENDENT_GATE_COUNT!r}, got {self.measurement_impact!r}"
                )
        elif self.measurement_impact < 0:
            raise ConfigError("constant measurement impact is negative")
        if not 0.0 <= self.conditional_probability_default <= 1.0:
            raise ConfigError("default probability outside [0, 1]")
        for pattern, p in self.probability_overrides.items():
            if not 0.0 <= p <= 1.0:
                raise ConfigError(f"override {pattern!r} probability outside [0, 1]")
        if self.while_iteration_multiplier < 0:
            raise ConfigError("while multiplier is negative")

    def base_weight(self, arity: int) -> float:
        return float(self.base_gate_weight.get(arity, 1.0))


def load_weight_model(path: str) -> WeightModel:
    """Read a key/value config file.

    Keys: ``base_weight.arity.<n>``, ``measurement_impact`` (number or
    ``dependent_gate_count``), ``p_default``, ``p_override.<pattern>``,
    ``while_multiplier``. Lines split on the last ``=``; ``#`` and ``//``
    start comments.
    """
    base: dict[int, float] = {}
    overrides: dict[str, float] = {}
    impact: float | str = DEPENDENT_GATE_COUNT
    p_default = 0.5
    multiplier = 1.0
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#") or line.startswith("//"):
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
            key, _, value = line.rpartition("=")
            key, value = key.strip(), value.strip()
            try:
                if key.startswith("base_weight.arity."):
                    base[int(key.rsplit(".", 1)[1])] = float(value)
                elif key == "measurement_impact":
                    impact = (
                        value if value == DEPENDENT_GATE_COUNT else float(value)
                    )
                elif key == "p_default":
                    p_default = float(value)
                elif key.startswith("p_override."):
                    overrides[key[len("p_override."):]] = float(value)
                elif key == "while_multiplier":
                    multiplier = float(value)
                else:
                    raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
            except ValueError as exc:
                raise ConfigError(f"{path}:{lineno}: bad value {value!r}") from exc
    return WeightModel(
        base_gate_weight=base,
        measurement_impact=impact,
        conditional_probability_default=p_default,
        probability_overrides=overrides,
        while_iteration_multiplier=multiplier,
    )


def condition_pattern(cond: Condition, labels: tuple[str, ...] | None = None) -> str:
    """Canonical override-matching form of a condition.

    ``labels`` maps global clbit index to its rendered name (``mid[0]``);
    without labels, bits render as ``bit<i>``.
    """

    def label(i: int) -> str:
        if labels is not None and i < len(labels):
            return labels[i]
        return f"bit{i}"

    if isinstance(cond, BitEquals):
        return f"{label(cond.bit.index)}=={cond.expected}"
    reg = label(cond.bits[0].index)
    reg = reg.split("[", 1)[0]
    return f'{reg}=="{cond.expected}"'


def estimate_condition_probability(
    cond: Condition,
    wm: WeightModel,
    labels: tuple[str, ...] | None = None,
) -> float:
    """Execution probability of a condition under the weight model.

    Pattern overrides win; otherwise each constrained bit contributes one
    factor of the default probability (independence assumption).
    """
    pattern = condition_pattern(cond, labels)
    if pattern in wm.probability_overrides:
        return float(wm.probability_overrides[pattern])
    p = wm.conditional_probability_default
    if isinstance(cond, RegisterEquals):
        return p ** len(cond.bits)
    return p


def _reject_adaptive_blocks(block: Sequence) -> None:
    for stmt in block.items:
        if isinstance(stmt, IfBlock):
            where = f" at line {stmt.line}" if stmt.line is not None else ""
            raise AdaptiveConstructInStaticModeError(
                f"if-block{where} not allowed in static mode"
            )
        if isinstance(stmt, WhileBlock):
            where = f" at line {stmt.line}" if stmt.line is not None else ""
            raise WhileInStaticModeError(
                f"while-block{where} not allowed in static mode"
            )
        if isinstance(stmt, ForBlock):
            _reject_adaptive_blocks(stmt.body)


def _origin(entry: FlatStatement, index: int, circuit: Circuit) -> tuple[str, ...]:
    stmt = entry.statement
    if isinstance(stmt, GateOp):
        qubits = ",".join(str(q.index) for q in stmt.qubits)
        return (f"gate:{stmt.name}[{qubits}]@{index}",)
    if isinstance(stmt, MeasureOp):
        return (
            f"measure:q{stmt.qubit.index}->{circuit.clbit_label(stmt.clbit.index)}@{index}",
        )
    return (f"reset:q{stmt.qubit.index}@{index}",)


def build_static(circuit: Circuit, wm: WeightModel | None = None) -> Hypergraph:
    """Primal hypergraph of a static circuit.

    Vertices are the qubits. Each multi-qubit gate instance (for-blocks
    unrolled) becomes one standard edge weighted by gate arity; single-qubit
    gates, measurements and resets produce no edges (they can never be cut)
    but are tallied in graph metadata.
    """
    wm = wm or WeightModel()
    _reject_adaptive_blocks(circuit.body)
    graph = Hypergraph(GraphMode.PRIMAL)
    for q in range(circuit.num_qubits):
        graph.add_vertex(VertexKind.QUBIT, circuit.qubit_label(q))
    layering = compute_layering(circuit)
    layer_of = {}
    for layer_idx, bucket in enumerate(layering.layers):
        for entry_idx in bucket:
            layer_of[entry_idx] = layer_idx
    counts = {"single_qubit_gates": 0, "measurements": 0, "resets": 0}
    for index, entry in enumerate(layering.entries):
        stmt = entry.statement
        if isinstance(stmt, GateOp):
            if len(stmt.qubits) < 2:
                counts["single_qubit_gates"] += 1
                continue
            graph.add_edge(
                pins=[q.index for q in stmt.qubits],
                weight=wm.base_weight(len(stmt.qubits)),
                kind=Standard(),
                origin=_origin(entry, index, circuit),
                layer=layer_of[index],
            )
        elif isinstance(stmt, MeasureOp):
            counts["measurements"] += 1
        else:
            counts["resets"] += 1
    graph.metadata.update(counts)
    return graph


def build_adaptive(
    circuit: Circuit,
    wm: WeightModel | None = None,
    grouping: bool = True,
) -> Hypergraph:
    """Extended hypergraph of an adaptive circuit.

    Processes the ASAP layering in order: unconditioned multi-qubit gates
    yield standard edges; conditioned gates yield conditional edges pinned to
    the gate qubits plus the guard's clbits, weighted base x probability;
    measurements whose bit is read by a later guard yield measurement edges
    pinned {qubit, clbit}. With ``grouping``, each outermost control-flow
    block becomes a super-group edge (pins = union of member pins, weight =
    sum of member weights) absorbing its members from the active set.
    """
    wm = wm or WeightModel()
    labels = circuit.clbit_labels()
    layering = compute_layering(circuit)
    entries = layering.entries

    # Classical bits that matter: written by a measurement or read by a guard.
    written: dict[int, int] = {}  # clbit -> flat index of first writer
    read: set[int] = set()
    for index, entry in enumerate(entries):
        stmt = entry.statement
        if isinstance(stmt, MeasureOp) and stmt.clbit.index not in written:
            written[stmt.clbit.index] = index
        if entry.path_condition is not None:
            read.update(condition_bits(entry.path_condition))

    graph = Hypergraph(GraphMode.EXTENDED)
    for q in range(circuit.num_qubits):
        graph.add_vertex(VertexKind.QUBIT, circuit.qubit_label(q))
    clbit_vertex: dict[int, int] = {}
    for clbit in sorted(set(written) | read):
        clbit_vertex[clbit] = graph.add_vertex(
            VertexKind.CLBIT, circuit.clbit_label(clbit)
        )
    for clbit, writer_index in written.items():
        writer = entries[writer_index].statement
        assert isinstance(writer, MeasureOp)
        graph.clbit_writer[clbit_vertex[clbit]] = writer.qubit.index

    # Flat index -> downstream guard readers, for measurement-edge tests.
    readers_after: dict[int, list[int]] = {}
    for index, entry in enumerate(entries):
        if entry.path_condition is None:
            continue
        for clbit in condition_bits(entry.path_condition):
            readers_after.setdefault(clbit, []).append(index)

    def downstream_readers(clbit: int, index: int) -> int:
        return sum(1 for i in readers_after.get(clbit, ()) if i > index)

    layer_of: dict[int, int] = {}
    for layer_idx, bucket in enumerate(layering.layers):
        for entry_idx in bucket:
            layer_of[entry_idx] = layer_idx

    counts = {"single_qubit_gates": 0, "measurements": 0, "resets": 0}
    group_members: dict[str, list[int]] = {}

    def record_group(entry: FlatStatement, edge_id: int) -> None:
        if entry.group_id is not None:
            group_members.setdefault(entry.group_id, []).append(edge_id)

    def while_scale(entry: FlatStatement) -> float:
        return wm.while_iteration_multiplier if entry.in_while else 1.0

    for bucket in layering.layers:
        # Gates first, then measurements, following the layer-wise translation.
        for index in bucket:
            entry = entries[index]
            stmt = entry.statement
            if not isinstance(stmt, GateOp):
                continue
            if len(stmt.qubits) < 2 and entry.path_condition is None:
                counts["single_qubit_gates"] += 1
                continue
            base = wm.base_weight(len(stmt.qubits)) * while_scale(entry)
            if entry.path_condition is None:
                eid = graph.add_edge(
                    pins=[q.index for q in stmt.qubits],
                    weight=base,
                    kind=Standard(),
                    origin=_origin(entry, index, circuit),
                    layer=layer_of[index],
                )
            else:
                if len(stmt.qubits) < 2:
                    counts["single_qubit_gates"] += 1
                cond = entry.path_condition
                probability = estimate_condition_probability(cond, wm, labels)
                pins = {q.index for q in stmt.qubits}
                pins.update(clbit_vertex[c] for c in condition_bits(cond))
                eid = graph.add_edge(
                    pins=pins,
                    weight=base * probability,
                    kind=Conditional(condition=cond, probability=probability),
                    origin=_origin(entry, index, circuit),
                    layer=layer_of[index],
                )
            record_group(entry, eid)
        for index in bucket:
            entry = entries[index]
            stmt = entry.statement
            if isinstance(stmt, ResetOp):
                counts["resets"] += 1
                continue
            if not isinstance(stmt, MeasureOp):
                continue
            counts["measurements"] += 1
            dependents = downstream_readers(stmt.clbit.index, index)
            if dependents == 0:
                continue  # terminal measurement: influences no later gate
            if wm.measurement_impact == DEPENDENT_GATE_COUNT:
                weight = float(dependents)
            else:
                weight = float(wm.measurement_impact)
            eid = graph.add_edge(
                pins=[stmt.qubit.index, clbit_vertex[stmt.clbit.index]],
                weight=weight * while_scale(entry),
                kind=MeasurementEdge(),
                origin=_origin(entry, index, circuit),
                layer=layer_of[index],
            )
            record_group(entry, eid)

    if grouping:
        for group_id in sorted(group_members, key=lambda g: min(group_members[g])):
            members = group_members[group_id]
            pin_union: set[int] = set()
            total = 0.0
            for eid in members:
                pin_union.update(graph.edges[eid].pins)
                total += graph.edges[eid].weight
            graph.add_edge(
                pins=pin_union,
                weight=total,
                kind=SuperGroup(member_edge_ids=tuple(members), group_label=group_id),
                origin=(f"group:{group_id}",),
            )

    graph.metadata.update(counts)
    return graph
