"""Text parser and serializer for the circuit subset grammar.

Grammar (one statement per line, ``//`` comments)::

    circuit <name>;
    qubit[<n>] q;
    bit[<n>] <regname>;            // several classical registers allowed
    <id>(<real>{,<real>}) q[<i>]{, q[<i>]};
    <reg>[<i>] = measure q[<i>];
    reset q[<i>];
    if (<cond>) { ... } else { ... }
    while (<cond>) { ... }
    for <k> { ... }

    cond := <reg>[<i>] | <reg>[<i>] == <0|1> | <reg> == "<bitstring>"

``parse_circuit(serialize_circuit(c))`` returns a circuit structurally equal
to ``c``; serialization is canonical (explicit ``== 1`` for truthy bits,
``repr`` for float parameters so values round-trip exactly).
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import (
    CircuitSyntaxError,
    IndexOutOfRangeError,
    UndeclaredRegisterError,
    UnsupportedConstructError,
)
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
    RegisterEquals,
    ResetOp,
    Sequence,
    Statement,
    WhileBlock,
)

_KEYWORDS = {"circuit", "qubit", "bit", "measure", "reset", "if", "else", "while", "for"}

# Constructs that belong to the full language but not to this subset.
_UNSUPPORTED = {
    "OPENQASM", "include", "gate", "def", "defcal", "cal", "barrier", "delay",
    "box", "let", "input", "output", "const", "break", "continue", "return",
    "switch", "case", "default", "pragma", "extern", "array", "duration",
    "stretch", "ctrl", "inv", "pow", "gphase",
}

_SYMBOLS = ("==", ";", ",", "(", ")", "{", "}", "[", "]", "=", "-")


@dataclass(frozen=True, slots=True)
class _Token:
    kind: str  # 'ident' | 'int' | 'real' | 'string' | symbol literal | 'eof'
    text: str
    line: int
    col: int


def _tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    line, col = 1, 1
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if text.startswith("//", i):
            while i < n and text[i] != "\n":
                i += 1
            continue
        start_line, start_col = line, col
        if ch == '"':
            j = text.find('"', i + 1)
            if j < 0:
                raise CircuitSyntaxError("unterminated string", start_line, start_col)
            tokens.append(_Token("string", text[i + 1 : j], start_line, start_col))
            col += j + 1 - i
            i = j + 1
            continue
        if ch.isdigit() or (ch == "." and i + 1 < n and text[i + 1].isdigit()):
            j = i
            seen_dot = seen_exp = False
            while j < n:
                c = text[j]
                if c.isdigit():
                    j += 1
                elif c == "." and not seen_dot and not seen_exp:
                    seen_dot = True
                    j += 1
                elif c in "eE" and not seen_exp and j > i:
                    seen_exp = True
                    j += 1
                    if j < n and text[j] in "+-":
                        j += 1
                else:
                    break
            lexeme = text[i:j]
            kind = "real" if (seen_dot or seen_exp) else "int"
            tokens.append(_Token(kind, lexeme, start_line, start_col))
            col += j - i
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(_Token("ident", text[i:j], start_line, start_col))
            col += j - i
            i = j
            continue
        for sym in _SYMBOLS:
            if text.startswith(sym, i):
                tokens.append(_Token(sym, sym, start_line, start_col))
                i += len(sym)
                col += len(sym)
                break
        else:
            raise CircuitSyntaxError(f"unexpected character {ch!r}", start_line, start_col)
    tokens.append(_Token("eof", "", line, col))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.pos = 0
        self.qreg_name: str | None = None
        self.num_qubits = 0
        self.clbit_registers: list[tuple[str, int]] = []
        self.reg_base: dict[str, int] = {}

    # -- token stream ------------------------------------------------------

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def next(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, kind: str, what: str | None = None) -> _Token:
        tok = self.next()
        if tok.kind != kind:
            want = what or f"{kind!r}"
            raise CircuitSyntaxError(
                f"expected {want}, found {tok.text or tok.kind!r}", tok.line, tok.col
            )
        return tok

    def _fail_unsupported(self, tok: _Token) -> None:
        raise UnsupportedConstructError(
            f"unsupported construct {tok.text!r}", tok.line, tok.col
        )

    # -- grammar -----------------------------------------------------------

    def parse(self) -> Circuit:
        tok = self.expect("ident", "'circuit' header")
        if tok.text != "circuit":
            if tok.text in _UNSUPPORTED:
                self._fail_unsupported(tok)
            raise CircuitSyntaxError(
                f"program must start with 'circuit', found {tok.text!r}",
                tok.line,
                tok.col,
            )
        name = self.expect("ident", "circuit name").text
        self.expect(";")
        self._parse_declarations()
        if self.qreg_name is None:
            tok = self.peek()
            raise CircuitSyntaxError("missing qubit declaration", tok.line, tok.col)
        num_clbits = sum(size for _, size in self.clbit_registers)
        body = self._parse_statements(until="eof")
        circuit = Circuit(
            name=name,
            num_qubits=self.num_qubits,
            num_clbits=num_clbits,
            body=Sequence(tuple(body)),
            clbit_registers=tuple(self.clbit_registers),
            qubit_register=self.qreg_name,
        )
        circuit.validate(strict=False)
        return circuit

    def _parse_declarations(self) -> None:
        while True:
            tok = self.peek()
            if tok.kind != "ident" or tok.text not in ("qubit", "bit"):
                return
            self.next()
            self.expect("[")
            size_tok = self.expect("int", "register size")
            size = int(size_tok.text)
            if size < 1:
                raise CircuitSyntaxError(
                    f"register size must be >= 1, got {size}",
                    size_tok.line,
                    size_tok.col,
                )
            self.expect("]")
            name_tok = self.expect("ident", "register name")
            self.expect(";")
            if tok.text == "qubit":
                if self.qreg_name is not None:
                    raise CircuitSyntaxError(
                        "duplicate qubit declaration", name_tok.line, name_tok.col
                    )
                self.qreg_name = name_tok.text
                self.num_qubits = size
            else:
                if name_tok.text in self.reg_base or name_tok.text == self.qreg_name:
                    raise CircuitSyntaxError(
                        f"duplicate register {name_tok.text!r}",
                        name_tok.line,
                        name_tok.col,
                    )
                self.reg_base[name_tok.text] = sum(
                    s for _, s in self.clbit_registers
                )
                self.clbit_registers.append((name_tok.text, size))

    def _parse_statements(self, until: str) -> list[Statement]:
        stmts: list[Statement] = []
        while True:
            tok = self.peek()
            if until == "eof" and tok.kind == "eof":
                return stmts
            if until == "}" and tok.kind == "}":
                return stmts
            if tok.kind == "eof":
                raise CircuitSyntaxError("unexpected end of input", tok.line, tok.col)
            stmts.append(self._parse_statement())

    def _parse_statement(self) -> Statement:
        tok = self.peek()
        if tok.kind != "ident":
            raise CircuitSyntaxError(
                f"expected statement, found {tok.text!r}", tok.line, tok.col
            )
        if tok.text in _UNSUPPORTED:
            self._fail_unsupported(tok)
        if tok.text == "reset":
            return self._parse_reset()
        if tok.text == "if":
            return self._parse_if()
        if tok.text == "while":
            return self._parse_while()
        if tok.text == "for":
            return self._parse_for()
        if tok.text in ("circuit", "qubit", "bit", "measure", "else"):
            raise CircuitSyntaxError(
                f"misplaced keyword {tok.text!r}", tok.line, tok.col
            )
        # Either a measurement (reg[i] = measure ...) or a gate call.
        if self.tokens[self.pos + 1].kind == "[" and tok.text != self.qreg_name:
            return self._parse_measure()
        return self._parse_gate()

    def _parse_qubit_ref(self) -> QubitRef:
        tok = self.expect("ident", "qubit register")
        if tok.text != self.qreg_name:
            if tok.text in self.reg_base:
                raise CircuitSyntaxError(
                    f"expected qubit register, found classical register {tok.text!r}",
                    tok.line,
                    tok.col,
                )
            raise UndeclaredRegisterError(
                f"undeclared register {tok.text!r}", tok.line, tok.col
            )
        self.expect("[")
        idx_tok = self.expect("int", "qubit index")
        idx = int(idx_tok.text)
        if idx >= self.num_qubits:
            raise IndexOutOfRangeError(
                f"qubit index {idx} outside {self.qreg_name}[{self.num_qubits}]",
                idx_tok.line,
                idx_tok.col,
            )
        self.expect("]")
        return QubitRef(idx)

    def _parse_clbit_ref(self, reg_tok: _Token) -> ClbitRef:
        if reg_tok.text not in self.reg_base:
            raise UndeclaredRegisterError(
                f"undeclared register {reg_tok.text!r}", reg_tok.line, reg_tok.col
            )
        self.expect("[")
        idx_tok = self.expect("int", "bit index")
        idx = int(idx_tok.text)
        size = dict(self.clbit_registers)[reg_tok.text]
        if idx >= size:
            raise IndexOutOfRangeError(
                f"bit index {idx} outside {reg_tok.text}[{size}]",
                idx_tok.line,
                idx_tok.col,
            )
        self.expect("]")
        return ClbitRef(self.reg_base[reg_tok.text] + idx)

    def _parse_reset(self) -> ResetOp:
        self.next()  # 'reset'
        qubit = self._parse_qubit_ref()
        self.expect(";")
        return ResetOp(qubit)

    def _parse_measure(self) -> MeasureOp:
        reg_tok = self.next()
        clbit = self._parse_clbit_ref(reg_tok)
        self.expect("=")
        kw = self.expect("ident", "'measure'")
        if kw.text != "measure":
            raise CircuitSyntaxError(
                f"expected 'measure', found {kw.text!r}", kw.line, kw.col
            )
        qubit = self._parse_qubit_ref()
        self.expect(";")
        return MeasureOp(qubit=qubit, clbit=clbit)

    def _parse_gate(self) -> GateOp:
        name_tok = self.next()
        params: list[float] = []
        if self.peek().kind == "(":
            self.next()
            while True:
                params.append(self._parse_real())
                tok = self.next()
                if tok.kind == ")":
                    break
                if tok.kind != ",":
                    raise CircuitSyntaxError(
                        f"expected ',' or ')', found {tok.text!r}", tok.line, tok.col
                    )
        qubits = [self._parse_qubit_ref()]
        while self.peek().kind == ",":
            self.next()
            qubits.append(self._parse_qubit_ref())
        self.expect(";")
        if len({q.index for q in qubits}) != len(qubits):
            raise CircuitSyntaxError(
                f"gate {name_tok.text!r} repeats a qubit", name_tok.line, name_tok.col
            )
        return GateOp(name=name_tok.text, qubits=tuple(qubits), params=tuple(params))

    def _parse_real(self) -> float:
        sign = 1.0
        tok = self.next()
        if tok.kind == "-":
            sign = -1.0
            tok = self.next()
        if tok.kind not in ("int", "real"):
            raise CircuitSyntaxError(
                f"expected number, found {tok.text!r}", tok.line, tok.col
            )
        return sign * float(tok.text)

    def _parse_condition(self) -> Condition:
        reg_tok = self.expect("ident", "register in condition")
        if reg_tok.text == self.qreg_name:
            raise CircuitSyntaxError(
                "conditions read classical registers, not qubits",
                reg_tok.line,
                reg_tok.col,
            )
        if self.peek().kind == "[":
            bit = self._parse_clbit_ref(reg_tok)
            if self.peek().kind == "==":
                self.next()
                val_tok = self.expect("int", "0 or 1")
                val = int(val_tok.text)
                if val not in (0, 1):
                    raise CircuitSyntaxError(
                        f"bit compares against 0 or 1, got {val}",
                        val_tok.line,
                        val_tok.col,
                    )
                return BitEquals(bit=bit, expected=val)
            return BitEquals(bit=bit, expected=1)
        if reg_tok.text not in self.reg_base:
            raise UndeclaredRegisterError(
                f"undeclared register {reg_tok.text!r}", reg_tok.line, reg_tok.col
            )
        self.expect("==")
        str_tok = self.expect("string", "bitstring")
        base = self.reg_base[reg_tok.text]
        size = dict(self.clbit_registers)[reg_tok.text]
        if len(str_tok.text) != size:
            raise CircuitSyntaxError(
                f"bitstring length {len(str_tok.text)} does not match "
                f"{reg_tok.text}[{size}]",
                str_tok.line,
                str_tok.col,
            )
        if any(ch not in "01" for ch in str_tok.text):
            raise CircuitSyntaxError(
                f"bitstring {str_tok.text!r} must be over 0/1",
                str_tok.line,
                str_tok.col,
            )
        return RegisterEquals(
            bits=tuple(ClbitRef(base + i) for i in range(size)),
            expected=str_tok.text,
        )

    def _parse_braced_body(self) -> Sequence:
        self.expect("{")
        stmts = self._parse_statements(until="}")
        self.expect("}")
        return Sequence(tuple(stmts))

    def _parse_if(self) -> IfBlock:
        tok = self.next()  # 'if'
        self.expect("(")
        cond = self._parse_condition()
        self.expect(")")
        then_body = self._parse_braced_body()
        else_body = Sequence()
        nxt = self.peek()
        if nxt.kind == "ident" and nxt.text == "else":
            self.next()
            else_body = self._parse_braced_body()
        return IfBlock(cond=cond, then_body=then_body, else_body=else_body, line=tok.line)

    def _parse_while(self) -> WhileBlock:
        tok = self.next()  # 'while'
        self.expect("(")
        cond = self._parse_condition()
        self.expect(")")
        body = self._parse_braced_body()
        return WhileBlock(cond=cond, body=body, line=tok.line)

    def _parse_for(self) -> ForBlock:
        tok = self.next()  # 'for'
        count_tok = self.expect("int", "loop count")
        count = int(count_tok.text)
        if count < 1:
            raise CircuitSyntaxError(
                f"loop count must be >= 1, got {count}", count_tok.line, count_tok.col
            )
        body = self._parse_braced_body()
        return ForBlock(count=count, body=body, line=tok.line)


def parse_circuit(text: str) -> Circuit:
    """Parse circuit text, raising location-aware errors on bad input."""
    return _Parser(text).parse()


# -- serializer ---------------------------------------------------------------


def _format_param(value: float) -> str:
    text = repr(float(value))
    return text


def _render_cond(circuit: Circuit, cond: Condition) -> str:
    if isinstance(cond, BitEquals):
        return f"{circuit.clbit_label(cond.bit.index)} == {cond.expected}"
    reg = circuit.register_of_bits(cond.bits)
    if reg is None:
        raise CircuitSyntaxError(
            "register predicate does not cover a declared register exactly"
        )
    return f'{reg} == "{cond.expected}"'


def _render_stmt(circuit: Circuit, stmt: Statement, indent: int, out: list[str]) -> None:
    pad = "  " * indent
    q = circuit.qubit_register
    if isinstance(stmt, GateOp):
        params = ""
        if stmt.params:
            params = "(" + ", ".join(_format_param(p) for p in stmt.params) + ")"
        targets = ", ".join(f"{q}[{ref.index}]" for ref in stmt.qubits)
        out.append(f"{pad}{stmt.name}{params} {targets};")
    elif isinstance(stmt, MeasureOp):
        out.append(
            f"{pad}{circuit.clbit_label(stmt.clbit.index)} = measure "
            f"{q}[{stmt.qubit.index}];"
        )
    elif isinstance(stmt, ResetOp):
        out.append(f"{pad}reset {q}[{stmt.qubit.index}];")
    elif isinstance(stmt, IfBlock):
        out.append(f"{pad}if ({_render_cond(circuit, stmt.cond)}) {{")
        for inner in stmt.then_body.items:
            _render_stmt(circuit, inner, indent + 1, out)
        if stmt.else_body.items:
            out.append(f"{pad}}} else {{")
            for inner in stmt.else_body.items:
                _render_stmt(circuit, inner, indent + 1, out)
        out.append(f"{pad}}}")
    elif isinstance(stmt, WhileBlock):
        out.append(f"{pad}while ({_render_cond(circuit, stmt.cond)}) {{")
        for inner in stmt.body.items:
            _render_stmt(circuit, inner, indent + 1, out)
        out.append(f"{pad}}}")
    elif isinstance(stmt, ForBlock):
        out.append(f"{pad}for {stmt.count} {{")
        for inner in stmt.body.items:
            _render_stmt(circuit, inner, indent + 1, out)
        out.append(f"{pad}}}")
    else:  # pragma: no cover - union is closed
        raise CircuitSyntaxError(f"unknown statement {stmt!r}")


def serialize_circuit(circuit: Circuit) -> str:
    """Canonical text form; parses back to a structurally equal circuit."""
    out = [f"circuit {circuit.name};"]
    out.append(f"qubit[{circuit.num_qubits}] {circuit.qubit_register};")
    for name, size in circuit.clbit_registers:
        out.append(f"bit[{size}] {name};")
    for stmt in circuit.body.items:
        _render_stmt(circuit, stmt, 0, out)
    return "\n".join(out) + "\n"
