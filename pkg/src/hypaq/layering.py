"""Linearization of circuit trees and ASAP layering.

``flatten`` turns the statement tree into program order, attaching to each
leaf statement the condition guarding it and the identity of its outermost
control-flow block. ``compute_layering`` schedules the flattened statements
as early as possible subject to resource conflicts.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import CircuitError
from .ir import (
    Circuit,
    Condition,
    ForBlock,
    GateOp,
    IfBlock,
    MeasureOp,
    ResetOp,
    Sequence,
    WhileBlock,
    condition_bits,
)

LeafStatement = GateOp | MeasureOp | ResetOp


@dataclass(frozen=True, slots=True)
class FlatStatement:
    """One leaf statement in program order.

    ``path_condition`` is the innermost enclosing if/while guard (for-blocks
    carry no condition of their own, so statements under a bare for-block
    inherit whatever guards the for-block itself). ``group_id`` names the
    outermost enclosing control-flow block; outermost grouping keeps groups
    disjoint. ``in_while`` marks statements inside any while body.
    """

    statement: LeafStatement
    path_condition: Condition | None = None
    group_id: str | None = None
    in_while: bool = False


def flatten(circuit: Circuit, unroll_for: bool = True) -> list[FlatStatement]:
    """Statements in program order with guards and group ids.

    For-bodies are repeated ``count`` times when ``unroll_for`` is true;
    otherwise for-blocks are rejected. While-bodies always appear exactly
    once (trip counts are unknowable statically).
    """
    entries: list[FlatStatement] = []
    counter = [0]

    def new_group(kind: str) -> str:
        gid = f"{kind}_{counter[0]}"
        counter[0] += 1
        return gid

    def walk(
        block: Sequence,
        guard: Condition | None,
        group: str | None,
        in_while: bool,
    ) -> None:
        for stmt in block.items:
            if isinstance(stmt, (GateOp, MeasureOp, ResetOp)):
                entries.append(FlatStatement(stmt, guard, group, in_while))
            elif isinstance(stmt, IfBlock):
                gid = group if group is not None else new_group("if")
                walk(stmt.then_body, stmt.cond, gid, in_while)
                walk(stmt.else_body, stmt.cond, gid, in_while)
            elif isinstance(stmt, WhileBlock):
                gid = group if group is not None else new_group("while")
                walk(stmt.body, stmt.cond, gid, True)
            elif isinstance(stmt, ForBlock):
                if not unroll_for:
                    raise CircuitError(
                        "flatten(unroll_for=False) requires a for-free circuit",
                        stmt.line,
                    )
                gid = group if group is not None else new_group("for")
                for _ in range(stmt.count):
                    walk(stmt.body, guard, gid, in_while)
            else:  # pragma: no cover - union is closed
                raise CircuitError(f"unknown statement {stmt!r}")

    walk(circuit.body, None, None, False)
    return entries


def statement_resources(entry: FlatStatement) -> tuple[tuple[int, ...], tuple[int, ...], tuple[int, ...]]:
    """(qubits touched, clbits read, clbits written) for one flat statement."""
    stmt = entry.statement
    if isinstance(stmt, GateOp):
        qubits = tuple(q.index for q in stmt.qubits)
        writes: tuple[int, ...] = ()
    elif isinstance(stmt, MeasureOp):
        qubits = (stmt.qubit.index,)
        writes = (stmt.clbit.index,)
    else:
        qubits = (stmt.qubit.index,)
        writes = ()
    reads = condition_bits(entry.path_condition) if entry.path_condition else ()
    return qubits, reads, writes


@dataclass(frozen=True, slots=True)
class Layering:
    """ASAP schedule over flattened statements.

    ``layers[i]`` holds indices into ``entries``; ``depth`` is the layer
    count. No layer contains two statements sharing a qubit, and clbit
    read-after-write, write-after-read and write-after-write hazards are
    ordered as well (read-read sharing is allowed).
    """

    layers: tuple[tuple[int, ...], ...]
    entries: tuple[FlatStatement, ...]

    @property
    def depth(self) -> int:
        return len(self.layers)


def compute_layering(circuit: Circuit) -> Layering:
    """Place each statement at 1 + the layer of its latest conflicting predecessor."""
    entries = flatten(circuit, unroll_for=True)
    qubit_time: dict[int, int] = {}
    clbit_write: dict[int, int] = {}
    clbit_read: dict[int, int] = {}
    layer_of: list[int] = []
    for entry in entries:
        qubits, reads, writes = statement_resources(entry)
        base = 0
        for q in qubits:
            base = max(base, qubit_time.get(q, 0))
        for c in reads:
            base = max(base, clbit_write.get(c, 0))
        for c in writes:
            base = max(base, clbit_write.get(c, 0), clbit_read.get(c, 0))
        layer = base + 1
        layer_of.append(layer)
        for q in qubits:
            qubit_time[q] = layer
        for c in reads:
            clbit_read[c] = max(clbit_read.get(c, 0), layer)
        for c in writes:
            clbit_write[c] = layer
    depth = max(layer_of, default=0)
    buckets: list[list[int]] = [[] for _ in range(depth)]
    for idx, layer in enumerate(layer_of):
        buckets[layer - 1].append(idx)
    return Layering(
        layers=tuple(tuple(b) for b in buckets),
        entries=tuple(entries),
    )
