"""Core circuit IR: immutable ops, control-flow blocks, conditions, JSON codec.

Every value here is a frozen dataclass. A constructed ``Circuit`` never
mutates, so instances can be shared freely across threads; all operations on
circuits elsewhere in the package are pure functions.
"""

from __future__ import annotations

import re
import warnings
from dataclasses import dataclass, field
from typing import Union

from .errors import (
    CircuitError,
    IndexOutOfRangeError,
    UnmeasuredConditionWarning,
)

IR_VERSION = 1

_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


@dataclass(frozen=True, slots=True)
class QubitRef:
    """Position in the circuit's qubit register."""

    index: int

    def __post_init__(self) -> None:
        if self.index < 0:
            raise CircuitError(f"negative qubit index {self.index}")


@dataclass(frozen=True, slots=True)
class ClbitRef:
    """Global position in the circuit's classical bits (declaration order)."""

    index: int

    def __post_init__(self) -> None:
        if self.index < 0:
            raise CircuitError(f"negative clbit index {self.index}")


@dataclass(frozen=True, slots=True)
class GateOp:
    """Named gate applied to one or more distinct qubits.

    Gate names are uninterpreted identifiers; the toolkit never evaluates
    unitaries, only connectivity and metadata.
    """

    name: str
    qubits: tuple[QubitRef, ...]
    params: tuple[float, ...] = ()

    def __post_init__(self) -> None:
        if not _IDENT_RE.match(self.name):
            raise CircuitError(f"gate name {self.name!r} is not an identifier")
        if not self.qubits:
            raise CircuitError(f"gate {self.name!r} has no qubits")
        if len({q.index for q in self.qubits}) != len(self.qubits):
            raise CircuitError(f"gate {self.name!r} repeats a qubit")


@dataclass(frozen=True, slots=True)
class MeasureOp:
    """Measurement of one qubit into one classical bit."""

    qubit: QubitRef
    clbit: ClbitRef


@dataclass(frozen=True, slots=True)
class ResetOp:
    """Reset of one qubit to its initial state."""

    qubit: QubitRef


@dataclass(frozen=True, slots=True)
class BitEquals:
    """Predicate on a single classical bit."""

    bit: ClbitRef
    expected: int

    def __post_init__(self) -> None:
        if self.expected not in (0, 1):
            raise CircuitError(f"bit predicate expects 0 or 1, got {self.expected}")


@dataclass(frozen=True, slots=True)
class RegisterEquals:
    """Predicate comparing a whole classical register against a bitstring.

    ``bits`` lists the register's clbits in declaration order and must have
    the same length as ``expected``.
    """

    bits: tuple[ClbitRef, ...]
    expected: str

    def __post_init__(self) -> None:
        if len(self.bits) != len(self.expected):
            raise CircuitError(
                f"register predicate over {len(self.bits)} bits compared "
                f"against {len(self.expected)}-char string"
            )
        if not self.bits:
            raise CircuitError("register predicate over zero bits")
        if any(ch not in "01" for ch in self.expected):
            raise CircuitError(f"bitstring {self.expected!r} must be over 0/1")


Condition = Union[BitEquals, RegisterEquals]


@dataclass(frozen=True, slots=True)
class Sequence:
    """Ordered list of statements."""

    items: tuple["Statement", ...] = ()


@dataclass(frozen=True, slots=True)
class IfBlock:
    """Conditional block with an optional else branch."""

    cond: Condition
    then_body: Sequence
    else_body: Sequence = Sequence()
    line: int | None = field(default=None, compare=False)


@dataclass(frozen=True, slots=True)
class WhileBlock:
    """Loop re-evaluating a classical predicate before each iteration."""

    cond: Condition
    body: Sequence
    line: int | None = field(default=None, compare=False)


@dataclass(frozen=True, slots=True)
class ForBlock:
    """Loop with a compile-time constant trip count (>= 1)."""

    count: int
    body: Sequence
    line: int | None = field(default=None, compare=False)

    def __post_init__(self) -> None:
        if self.count < 1:
            raise CircuitError(f"for-block count must be >= 1, got {self.count}")


Block = Union[Sequence, IfBlock, WhileBlock, ForBlock]
Statement = Union[GateOp, MeasureOp, ResetOp, IfBlock, WhileBlock, ForBlock]


def condition_bits(cond: Condition) -> tuple[int, ...]:
    """Global clbit indices read by a condition."""
    if isinstance(cond, BitEquals):
        return (cond.bit.index,)
    return tuple(b.index for b in cond.bits)


@dataclass(frozen=True, slots=True)
class Circuit:
    """A parsed or generated circuit.

    ``clbit_registers`` gives declared classical registers in order; clbit
    indices are global across them. The qubit register is single and named
    ``qubit_register``.
    """

    name: str
    num_qubits: int
    num_clbits: int
    body: Sequence
    clbit_registers: tuple[tuple[str, int], ...] = ()
    qubit_register: str = "q"

    def __post_init__(self) -> None:
        if not _IDENT_RE.match(self.name):
            raise CircuitError(f"circuit name {self.name!r} is not an identifier")
        if self.num_qubits < 1:
            raise CircuitError("circuit needs at least one qubit")
        if self.num_clbits < 0:
            raise CircuitError("negative clbit count")
        total = sum(size for _, size in self.clbit_registers)
        if total != self.num_clbits:
            raise CircuitError(
                f"clbit registers cover {total} bits, num_clbits is {self.num_clbits}"
            )
        seen: set[str] = set()
        for reg_name, size in self.clbit_registers:
            if not _IDENT_RE.match(reg_name):
                raise CircuitError(f"register name {reg_name!r} is not an identifier")
            if size < 1:
                raise CircuitError(f"register {reg_name!r} has size {size}")
            if reg_name in seen or reg_name == self.qubit_register:
                raise CircuitError(f"duplicate register name {reg_name!r}")
            seen.add(reg_name)

    # -- register helpers -------------------------------------------------

    def clbit_label(self, index: int) -> str:
        """Render a global clbit index as ``reg[i]``."""
        base = 0
        for reg_name, size in self.clbit_registers:
            if index < base + size:
                return f"{reg_name}[{index - base}]"
            base += size
        raise IndexOutOfRangeError(f"clbit {index} outside declared registers")

    def clbit_labels(self) -> tuple[str, ...]:
        return tuple(self.clbit_label(i) for i in range(self.num_clbits))

    def qubit_label(self, index: int) -> str:
        return f"q{index}"

    def register_span(self, reg_name: str) -> tuple[int, int]:
        """(first global index, size) of a classical register."""
        base = 0
        for name, size in self.clbit_registers:
            if name == reg_name:
                return base, size
            base += size
        raise IndexOutOfRangeError(f"unknown classical register {reg_name!r}")

    def register_of_bits(self, bits: tuple[ClbitRef, ...]) -> str | None:
        """Name of the register exactly covered by ``bits`` in order, if any."""
        base = 0
        for name, size in self.clbit_registers:
            if len(bits) == size and all(
                b.index == base + i for i, b in enumerate(bits)
            ):
                return name
            base += size
        return None

    # -- validation --------------------------------------------------------

    def validate(self, strict: bool = False) -> None:
        """Check reference bounds and condition dataflow.

        Bound violations always raise. A condition reading a clbit with no
        guaranteed earlier measurement is a warning by default and an error
        with ``strict=True``.
        """
        self._check_refs(self.body)
        issues: list[str] = []
        self._walk_dataflow(self.body, set(), issues)
        for msg in issues:
            if strict:
                raise CircuitError(msg)
            warnings.warn(msg, UnmeasuredConditionWarning, stacklevel=2)

    def _check_qubit(self, ref: QubitRef) -> None:
        if ref.index >= self.num_qubits:
            raise IndexOutOfRangeError(
                f"qubit {ref.index} outside register of size {self.num_qubits}"
            )

    def _check_clbit(self, ref: ClbitRef) -> None:
        if ref.index >= self.num_clbits:
            raise IndexOutOfRangeError(
                f"clbit {ref.index} outside declared {self.num_clbits} bits"
            )

    def _check_cond(self, cond: Condition) -> None:
        if isinstance(cond, BitEquals):
            self._check_clbit(cond.bit)
        else:
            for b in cond.bits:
                self._check_clbit(b)
            if self.register_of_bits(cond.bits) is None:
                raise CircuitError(
                    "register predicate does not cover a declared register exactly"
                )

    def _check_refs(self, block: Sequence) -> None:
        for stmt in block.items:
            if isinstance(stmt, GateOp):
                for q in stmt.qubits:
                    self._check_qubit(q)
            elif isinstance(stmt, MeasureOp):
                self._check_qubit(stmt.qubit)
                self._check_clbit(stmt.clbit)
            elif isinstance(stmt, ResetOp):
                self._check_qubit(stmt.qubit)
            elif isinstance(stmt, IfBlock):
                self._check_cond(stmt.cond)
                self._check_refs(stmt.then_body)
                self._check_refs(stmt.else_body)
            elif isinstance(stmt, WhileBlock):
                self._check_cond(stmt.cond)
                self._check_refs(stmt.body)
            elif isinstance(stmt, ForBlock):
                self._check_refs(stmt.body)
            else:  # pragma: no cover - union is closed
                raise CircuitError(f"unknown statement {stmt!r}")

    def _walk_dataflow(
        self, block: Sequence, written: set[int], issues: list[str]
    ) -> set[int]:
        """Forward walk collecting clbits written on every path.

        If-branch writes survive only when both branches write; while-body
        writes never survive (zero iterations possible); for-bodies run at
        least once, so their writes persist.
        """
        for stmt in block.items:
            if isinstance(stmt, MeasureOp):
                written.add(stmt.clbit.index)
            elif isinstance(stmt, IfBlock):
                self._require_written(stmt.cond, written, issues)
                then_w = self._walk_dataflow(stmt.then_body, set(written), issues)
                else_w = self._walk_dataflow(stmt.else_body, set(written), issues)
                written |= then_w & else_w
            elif isinstance(stmt, WhileBlock):
                self._require_written(stmt.cond, written, issues)
                self._walk_dataflow(stmt.body, set(written), issues)
            elif isinstance(stmt, ForBlock):
                written = self._walk_dataflow(stmt.body, written, issues)
        return written

    def _require_written(
        self, cond: Condition, written: set[int], issues: list[str]
    ) -> None:
        for idx in condition_bits(cond):
            if idx not in written:
                issues.append(
                    f"condition reads {self.clbit_label(idx)} with no measurement "
                    "guaranteed on every earlier path"
                )


# -- JSON codec -------------------------------------------------------------


def condition_to_dict(cond: Condition) -> dict:
    if isinstance(cond, BitEquals):
        return {"kind": "bit_equals", "bit": cond.bit.index, "expected": cond.expected}
    return {
        "kind": "register_equals",
        "bits": [b.index for b in cond.bits],
        "expected": cond.expected,
    }


def condition_from_dict(d: dict) -> Condition:
    kind = d.get("kind")
    if kind == "bit_equals":
        return BitEquals(bit=ClbitRef(d["bit"]), expected=d["expected"])
    if kind == "register_equals":
        return RegisterEquals(
            bits=tuple(ClbitRef(i) for i in d["bits"]), expected=d["expected"]
        )
    raise CircuitError(f"unknown condition kind {kind!r}")


def _stmt_to_dict(stmt: Statement) -> dict:
    if isinstance(stmt, GateOp):
        return {
            "op": "gate",
            "name": stmt.name,
            "params": list(stmt.params),
            "qubits": [q.index for q in stmt.qubits],
        }
    if isinstance(stmt, MeasureOp):
        return {"op": "measure", "qubit": stmt.qubit.index, "clbit": stmt.clbit.index}
    if isinstance(stmt, ResetOp):
        return {"op": "reset", "qubit": stmt.qubit.index}
    if isinstance(stmt, IfBlock):
        return {
            "op": "if",
            "cond": condition_to_dict(stmt.cond),
            "then": [_stmt_to_dict(s) for s in stmt.then_body.items],
            "else": [_stmt_to_dict(s) for s in stmt.else_body.items],
        }
    if isinstance(stmt, WhileBlock):
        return {
            "op": "while",
            "cond": condition_to_dict(stmt.cond),
            "body": [_stmt_to_dict(s) for s in stmt.body.items],
        }
    if isinstance(stmt, ForBlock):
        return {
            "op": "for",
            "count": stmt.count,
            "body": [_stmt_to_dict(s) for s in stmt.body.items],
        }
    raise CircuitError(f"unknown statement {stmt!r}")  # pragma: no cover


def _stmt_from_dict(d: dict) -> Statement:
    op = d.get("op")
    if op == "gate":
        return GateOp(
            name=d["name"],
            qubits=tuple(QubitRef(i) for i in d["qubits"]),
            params=tuple(float(p) for p in d.get("params", [])),
        )
    if op == "measure":
        return MeasureOp(qubit=QubitRef(d["qubit"]), clbit=ClbitRef(d["clbit"]))
    if op == "reset":
        return ResetOp(qubit=QubitRef(d["qubit"]))
    if op == "if":
        return IfBlock(
            cond=condition_from_dict(d["cond"]),
            then_body=Sequence(tuple(_stmt_from_dict(s) for s in d.get("then", []))),
            else_body=Sequence(tuple(_stmt_from_dict(s) for s in d.get("else", []))),
        )
    if op == "while":
        return WhileBlock(
            cond=condition_from_dict(d["cond"]),
            body=Sequence(tuple(_stmt_from_dict(s) for s in d.get("body", []))),
        )
    if op == "for":
        return ForBlock(
            count=int(d["count"]),
            body=Sequence(tuple(_stmt_from_dict(s) for s in d.get("body", []))),
        )
    raise CircuitError(f"unknown op {op!r} in circuit JSON")


def circuit_to_dict(circuit: Circuit) -> dict:
    """Version-tagged JSON tree mirroring the IR."""
    return {
        "ir_version": IR_VERSION,
        "name": circuit.name,
        "num_qubits": circuit.num_qubits,
        "num_clbits": circuit.num_clbits,
        "qubit_register": circuit.qubit_register,
        "clbit_registers": [[name, size] for name, size in circuit.clbit_registers],
        "body": [_stmt_to_dict(s) for s in circuit.body.items],
    }


def circuit_from_dict(d: dict) -> Circuit:
    version = d.get("ir_version")
    if version != IR_VERSION:
        raise CircuitError(f"unsupported ir_version {version!r}")
    circuit = Circuit(
        name=d["name"],
        num_qubits=d["num_qubits"],
        num_clbits=d["num_clbits"],
        body=Sequence(tuple(_stmt_from_dict(s) for s in d.get("body", []))),
        clbit_registers=tuple((r[0], r[1]) for r in d.get("clbit_registers", [])),
        qubit_register=d.get("qubit_register", "q"),
    )
    circuit.validate()
    return circuit
