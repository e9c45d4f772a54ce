"""Benchmark circuit generators.

Families: phase estimation (static), iterative phase estimation (adaptive,
two qubits), variational ansatz with a classical feedback loop (for-block),
seeded random adaptive circuits, and repeat-until-success rotation gadgets.

All generators are deterministic functions of their arguments; identical
arguments produce byte-identical serializations.
"""

from __future__ import annotations

import math
import random

from .errors import InvalidSizeError
from .ir import (
    BitEquals,
    Circuit,
    ClbitRef,
    Condition,
    ForBlock,
    GateOp,
    IfBlock,
    MeasureOp,
    QubitRef,
    ResetOp,
    Sequence,
    Statement,
    WhileBlock,
    condition_bits,
)

# Z-rotation angle for the repeat-until-success gadget: cos(theta - pi) = 3/5.
RUS_THETA = math.pi + math.acos(3.0 / 5.0)

# Default draw probabilities for gen_random_adaptive. Gate-dominated with
# occasional control flow; override per-key via the ``probs`` argument.
RANDOM_DEFAULT_PROBS: dict[str, float] = {
    "1q": 0.35,
    "2q": 0.35,
    "measure": 0.10,
    "reset": 0.05,
    "if": 0.07,
    "while": 0.04,
    "for": 0.04,
}


def _gate(name: str, *qubits: int, params: tuple[float, ...] = ()) -> GateOp:
    return GateOp(name=name, qubits=tuple(QubitRef(q) for q in qubits), params=params)


def _measure(qubit: int, clbit: int) -> MeasureOp:
    return MeasureOp(qubit=QubitRef(qubit), clbit=ClbitRef(clbit))


def gen_qpe(n_counting: int) -> Circuit:
    """Static phase-estimation circuit with ``n_counting`` counting qubits.

    Layout: Hadamard layer, controlled-phase ladder against the target
    qubit (one ``cp`` per counting qubit), inverse-QFT gate sequence
    (n Hadamards plus n(n-1)/2 controlled phases), final measurements.
    """
    if n_counting < 1:
        raise InvalidSizeError(f"n_counting must be >= 1, got {n_counting}")
    n = n_counting
    target = n
    stmts: list[Statement] = []
    for q in range(n):
        stmts.append(_gate("h", q))
    for j in range(n):
        angle = 2.0 * math.pi * (2.0**j) / (2.0**n)
        stmts.append(_gate("cp", j, target, params=(angle,)))
    # Inverse QFT over the counting register, swap-free form.
    for i in range(n - 1, -1, -1):
        for j in range(n - 1, i, -1):
            angle = -math.pi / (2.0 ** (j - i))
            stmts.append(_gate("cp", j, i, params=(angle,)))
        stmts.append(_gate("h", i))
    for q in range(n):
        stmts.append(_measure(q, q))
    circuit = Circuit(
        name=f"qpe_n{n}",
        num_qubits=n + 1,
        num_clbits=n,
        body=Sequence(tuple(stmts)),
        clbit_registers=(("c", n),),
    )
    circuit.validate()
    return circuit


def gen_iqpe(iterations: int) -> Circuit:
    """Iterative phase estimation on two qubits.

    Each iteration applies a Hadamard and a controlled phase, corrects the
    ancilla phase conditioned on the previously measured bit (iterations
    after the first), then measures and resets the ancilla.
    """
    if iterations < 1:
        raise InvalidSizeError(f"iterations must be >= 1, got {iterations}")
    ancilla, target = 0, 1
    stmts: list[Statement] = []
    for k in range(iterations):
        stmts.append(_gate("h", ancilla))
        angle = 2.0 * math.pi / (2.0 ** (iterations - k))
        stmts.append(_gate("cp", ancilla, target, params=(angle,)))
        if k > 0:
            correction = _gate("p", ancilla, params=(-math.pi / 2.0,))
            stmts.append(
                IfBlock(
                    cond=BitEquals(bit=ClbitRef(k - 1), expected=1),
                    then_body=Sequence((correction,)),
                )
            )
        stmts.append(_gate("h", ancilla))
        stmts.append(_measure(ancilla, k))
        stmts.append(ResetOp(QubitRef(ancilla)))
    circuit = Circuit(
        name=f"iqpe_i{iterations}",
        num_qubits=2,
        num_clbits=iterations,
        body=Sequence(tuple(stmts)),
        clbit_registers=(("c", iterations),),
    )
    circuit.validate()
    return circuit


def gen_vqe(n_qubits: int, ansatz_layers: int, feedback_iterations: int) -> Circuit:
    """Variational ansatz wrapped in a classical feedback loop.

    The feedback loop is modeled as a for-block with a fixed iteration count
    so the circuit stays statically analyzable; its body (rotation layers,
    a linear CZ entangler chain, measure-all, reset-all) forms one logical
    group.
    """
    if n_qubits < 1 or ansatz_layers < 1 or feedback_iterations < 1:
        raise InvalidSizeError("gen_vqe arguments must all be >= 1")
    body: list[Statement] = []
    for layer in range(ansatz_layers):
        for q in range(n_qubits):
            theta = 0.1 * (layer * n_qubits + q + 1)
            body.append(_gate("ry", q, params=(theta,)))
        for q in range(n_qubits - 1):
            body.append(_gate("cz", q, q + 1))
    for q in range(n_qubits):
        body.append(_measure(q, q))
    for q in range(n_qubits):
        body.append(ResetOp(QubitRef(q)))
    loop = ForBlock(count=feedback_iterations, body=Sequence(tuple(body)))
    circuit = Circuit(
        name=f"vqe_n{n_qubits}_l{ansatz_layers}_k{feedback_iterations}",
        num_qubits=n_qubits,
        num_clbits=n_qubits,
        body=Sequence((loop,)),
        clbit_registers=(("c", n_qubits),),
    )
    circuit.validate()
    return circuit


def gen_rus(n_qubits: int) -> Circuit:
    """Repeat-until-success Z-rotation gadgets over blocks of four qubits.

    Each block prepares two ancillas, entangles them with a target, applies
    the rotation (theta = pi + arccos(3/5)), measures an ancilla and retries
    the gadget in a while-loop until the measurement signals success.
    ``floor(n_qubits / 4)`` blocks are laid out; leftover qubits idle.
    """
    if n_qubits < 4:
        raise InvalidSizeError(f"gen_rus needs n_qubits >= 4, got {n_qubits}")
    n_blocks = n_qubits // 4
    stmts: list[Statement] = []
    for b in range(n_blocks):
        a0, a1, t, s = 4 * b, 4 * b + 1, 4 * b + 2, 4 * b + 3
        stmts.append(_gate("h", a0))
        stmts.append(_gate("h", a1))
        stmts.append(_gate("cx", a0, t))
        stmts.append(_gate("cx", a1, t))
        stmts.append(_gate("cx", t, s))
        stmts.append(_gate("rz", t, params=(RUS_THETA,)))
        stmts.append(_measure(a0, b))
        retry: list[Statement] = [
            ResetOp(QubitRef(a0)),
            _gate("h", a0),
            _gate("cx", a0, t),
            _gate("rz", t, params=(RUS_THETA,)),
            _measure(a0, b),
        ]
        stmts.append(
            WhileBlock(
                cond=BitEquals(bit=ClbitRef(b), expected=1),
                body=Sequence(tuple(retry)),
            )
        )
        stmts.append(ResetOp(QubitRef(a0)))
    circuit = Circuit(
        name=f"rus_n{n_qubits}",
        num_qubits=n_qubits,
        num_clbits=n_blocks,
        body=Sequence(tuple(stmts)),
        clbit_registers=(("c", n_blocks),),
    )
    circuit.validate()
    return circuit


class _DepthTracker:
    """Incremental ASAP depth mirroring compute_layering's conflict rules."""

    def __init__(self) -> None:
        self.qubit_time: dict[int, int] = {}
        self.clbit_write: dict[int, int] = {}
        self.clbit_read: dict[int, int] = {}
        self.depth = 0

    def clone(self) -> "_DepthTracker":
        other = _DepthTracker()
        other.qubit_time = dict(self.qubit_time)
        other.clbit_write = dict(self.clbit_write)
        other.clbit_read = dict(self.clbit_read)
        other.depth = self.depth
        return other

    def add(
        self,
        qubits: tuple[int, ...],
        reads: tuple[int, ...],
        writes: tuple[int, ...],
    ) -> None:
        base = 0
        for q in qubits:
            base = max(base, self.qubit_time.get(q, 0))
        for c in reads:
            base = max(base, self.clbit_write.get(c, 0))
        for c in writes:
            base = max(base, self.clbit_write.get(c, 0), self.clbit_read.get(c, 0))
        layer = base + 1
        for q in qubits:
            self.qubit_time[q] = layer
        for c in reads:
            self.clbit_read[c] = max(self.clbit_read.get(c, 0), layer)
        for c in writes:
            self.clbit_write[c] = layer
        self.depth = max(self.depth, layer)

    def add_statement(self, stmt: Statement, guard: Condition | None) -> None:
        reads = condition_bits(guard) if guard else ()
        if isinstance(stmt, GateOp):
            self.add(tuple(q.index for q in stmt.qubits), reads, ())
        elif isinstance(stmt, MeasureOp):
            self.add((stmt.qubit.index,), reads, (stmt.clbit.index,))
        elif isinstance(stmt, ResetOp):
            self.add((stmt.qubit.index,), reads, ())
        elif isinstance(stmt, IfBlock):
            for inner in stmt.then_body.items:
                self.add_statement(inner, stmt.cond)
            for inner in stmt.else_body.items:
                self.add_statement(inner, stmt.cond)
        elif isinstance(stmt, WhileBlock):
            for inner in stmt.body.items:
                self.add_statement(inner, stmt.cond)
        elif isinstance(stmt, ForBlock):
            for _ in range(stmt.count):
                for inner in stmt.body.items:
                    self.add_statement(inner, guard)


_ONE_QUBIT_GATES = ("h", "x", "t", "rz")
_TWO_QUBIT_GATES = ("cx", "cz", "cp")


def gen_random_adaptive(
    n_qubits: int,
    target_depth: int,
    seed: int,
    probs: dict[str, float] | None = None,
) -> Circuit:
    """Seeded random circuit mixing gates with if/else, while and for blocks.

    Statements are appended until the ASAP depth reaches ``target_depth``
    exactly. Conditions only read clbits that are measured on every earlier
    path; block nesting never exceeds two levels.
    """
    if n_qubits < 2:
        raise InvalidSizeError(f"gen_random_adaptive needs n_qubits >= 2, got {n_qubits}")
    if target_depth < 1:
        raise InvalidSizeError(f"target_depth must be >= 1, got {target_depth}")
    weights = dict(RANDOM_DEFAULT_PROBS)
    if probs:
        for key, value in probs.items():
            if key not in weights:
                raise InvalidSizeError(f"unknown draw kind {key!r}")
            weights[key] = float(value)
    rng = random.Random(seed)
    n_clbits = n_qubits
    tracker = _DepthTracker()
    written_sure: set[int] = set()
    stmts: list[Statement] = []
    kinds = sorted(weights)
    kind_weights = [weights[k] for k in kinds]

    def rand_1q() -> GateOp:
        name = rng.choice(_ONE_QUBIT_GATES)
        q = rng.randrange(n_qubits)
        params = (rng.uniform(0.0, 2.0 * math.pi),) if name == "rz" else ()
        return _gate(name, q, params=params)

    def rand_2q() -> GateOp:
        name = rng.choice(_TWO_QUBIT_GATES)
        a, b = rng.sample(range(n_qubits), 2)
        params = (rng.uniform(0.0, 2.0 * math.pi),) if name == "cp" else ()
        return _gate(name, a, b, params=params)

    def rand_cond() -> Condition:
        bit = rng.choice(sorted(written_sure))
        return BitEquals(bit=ClbitRef(bit), expected=rng.randint(0, 1))

    def rand_simple() -> Statement:
        roll = rng.random()
        if roll < 0.45:
            return rand_1q()
        if roll < 0.85:
            return rand_2q()
        if roll < 0.95:
            return _measure(rng.randrange(n_qubits), rng.randrange(n_clbits))
        return ResetOp(QubitRef(rng.randrange(n_qubits)))

    def rand_simple_body(length: int) -> Sequence:
        return Sequence(tuple(rand_simple() for _ in range(length)))

    def rand_nested() -> Statement:
        """Second-level block with a simple body."""
        if written_sure and rng.random() < 0.5:
            return IfBlock(
                cond=rand_cond(),
                then_body=rand_simple_body(rng.randint(1, 2)),
            )
        return ForBlock(count=2, body=rand_simple_body(rng.randint(1, 2)))

    def rand_if_body(length: int) -> Sequence:
        items: list[Statement] = []
        for _ in range(length):
            if rng.random() < 0.15:
                items.append(rand_nested())
            else:
                items.append(rand_simple())
        return Sequence(tuple(items))

    while tracker.depth < target_depth:
        kind = rng.choices(kinds, weights=kind_weights)[0]
        if kind in ("if", "while") and not written_sure:
            kind = "1q"
        stmt: Statement
        if kind == "1q":
            stmt = rand_1q()
        elif kind == "2q":
            stmt = rand_2q()
        elif kind == "measure":
            q = rng.randrange(n_qubits)
            c = rng.randrange(n_clbits)
            written_sure.add(c)
            stmt = _measure(q, c)
        elif kind == "reset":
            stmt = ResetOp(QubitRef(rng.randrange(n_qubits)))
        elif kind == "if":
            then_body = rand_if_body(rng.randint(1, 3))
            else_body = (
                rand_simple_body(rng.randint(1, 2))
                if rng.random() < 0.5
                else Sequence()
            )
            stmt = IfBlock(cond=rand_cond(), then_body=then_body, else_body=else_body)
        elif kind == "while":
            cond = rand_cond()
            bit = cond.bit.index  # type: ignore[union-attr]
            body = list(rand_simple_body(rng.randint(1, 3)).items)
            # Loop body re-measures its own condition bit.
            body.append(_measure(rng.randrange(n_qubits), bit))
            stmt = WhileBlock(cond=cond, body=Sequence(tuple(body)))
        else:  # for
            stmt = ForBlock(
                count=rng.randint(2, 3),
                body=rand_simple_body(rng.randint(1, 3)),
            )
        if isinstance(stmt, (IfBlock, WhileBlock, ForBlock)):
            # Blocks land whole; only take one that fits the remaining budget
            # so the final depth hits target_depth exactly.
            probe = tracker.clone()
            probe.add_statement(stmt, None)
            if probe.depth > target_depth:
                stmt = rand_1q()
            elif isinstance(stmt, ForBlock):
                # for-bodies run at least once, so their writes are sure
                for inner in stmt.body.items:
                    if isinstance(inner, MeasureOp):
                        written_sure.add(inner.clbit.index)
        stmts.append(stmt)
        tracker.add_statement(stmt, None)

    circuit = Circuit(
        name=f"rand_n{n_qubits}_d{target_depth}_s{seed}",
        num_qubits=n_qubits,
        num_clbits=n_clbits,
        body=Sequence(tuple(stmts)),
        clbit_registers=(("c", n_clbits),),
    )
    circuit.validate()
    return circuit
