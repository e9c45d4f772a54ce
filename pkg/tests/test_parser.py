"""Parser, serializer and circuit JSON tests."""

import json

import pytest

from hypaq import (
    BitEquals,
    CircuitError,
    CircuitSyntaxError,
    ClbitRef,
    GateOp,
    IfBlock,
    IndexOutOfRangeError,
    MeasureOp,
    RegisterEquals,
    Sequence,
    UndeclaredRegisterError,
    UnmeasuredConditionWarning,
    UnsupportedConstructError,
    WhileBlock,
    circuit_from_dict,
    circuit_to_dict,
    gen_iqpe,
    gen_qpe,
    gen_random_adaptive,
    gen_rus,
    gen_vqe,
    parse_circuit,
    serialize_circuit,
)
from helpers import CHAIN3_TEXT, COND3_TEXT, MIDLOOP_TEXT


class TestParseBasics:
    def test_two_gate_chain(self):
        c = parse_circuit(CHAIN3_TEXT)
        assert c.name == "chain3"
        assert c.num_qubits == 3
        assert c.num_clbits == 0
        assert len(c.body.items) == 2
        g1, g2 = c.body.items
        assert isinstance(g1, GateOp) and g1.name == "g1"
        assert [q.index for q in g1.qubits] == [0, 1]
        assert [q.index for q in g2.qubits] == [1, 2]

    def test_declarations_only(self):
        c = parse_circuit("circuit empty;\nqubit[2] q;\nbit[1] c;\n")
        assert c.body == Sequence()
        assert c.num_qubits == 2
        assert c.num_clbits == 1

    def test_truthy_bit_condition_is_bit_equals_one(self):
        c = parse_circuit(COND3_TEXT)
        measure, = [s for s in c.body.items if isinstance(s, MeasureOp)]
        assert measure.clbit.index == 0
        block = c.body.items[-1]
        assert isinstance(block, IfBlock)
        assert block.cond == BitEquals(bit=ClbitRef(0), expected=1)
        assert block.else_body == Sequence()

    def test_register_condition_covers_whole_register(self):
        c = parse_circuit(MIDLOOP_TEXT)
        loop, = [s for s in c.body.items if isinstance(s, WhileBlock)]
        assert isinstance(loop.cond, RegisterEquals)
        assert loop.cond.expected == "00"
        assert [b.index for b in loop.cond.bits] == [0, 1]

    def test_global_clbit_indices_across_registers(self):
        c = parse_circuit(MIDLOOP_TEXT)
        assert c.clbit_registers == (("mid", 2), ("out", 3))
        # out[0] is global index 2
        outs = [s for s in c.body.items if isinstance(s, MeasureOp)]
        assert [m.clbit.index for m in outs] == [0, 1, 2, 3, 4]
        assert c.clbit_label(2) == "out[0]"

    def test_else_branch(self):
        text = (
            "circuit withelse;\nqubit[2] q;\nbit[1] c;\n"
            "c[0] = measure q[0];\n"
            "if (c[0] == 0) {\n  gx q[0];\n} else {\n  gy q[1];\n}\n"
        )
        c = parse_circuit(text)
        block = c.body.items[-1]
        assert isinstance(block, IfBlock)
        assert block.cond == BitEquals(bit=ClbitRef(0), expected=0)
        assert len(block.then_body.items) == 1
        assert len(block.else_body.items) == 1

    def test_gate_params_and_comments(self):
        text = (
            "circuit params; // header comment\n"
            "qubit[2] q;\n"
            "rz(-1.5, 0.25) q[0]; // negative and positive params\n"
            "cp(2e-3) q[0], q[1];\n"
        )
        c = parse_circuit(text)
        rz, cp = c.body.items
        assert rz.params == (-1.5, 0.25)
        assert cp.params == (0.002,)

    def test_for_block(self):
        c = parse_circuit("circuit f;\nqubit[2] q;\nfor 3 {\n  g q[0], q[1];\n}\n")
        loop = c.body.items[0]
        assert loop.count == 3
        assert len(loop.body.items) == 1


class TestParseErrors:
    def test_syntax_error_carries_location(self):
        with pytest.raises(CircuitSyntaxError) as err:
            parse_circuit("circuit bad;\nqubit[2] q;\ng q[0] ! q[1];\n")
        assert err.value.line == 3
        assert err.value.col is not None

    def test_missing_header(self):
        with pytest.raises(CircuitSyntaxError):
            parse_circuit("qubit[2] q;\n")

    def test_undeclared_register(self):
        with pytest.raises(UndeclaredRegisterError):
            parse_circuit("circuit bad;\nqubit[2] q;\nr[0] = measure q[0];\n")

    def test_qubit_index_out_of_range(self):
        with pytest.raises(IndexOutOfRangeError) as err:
            parse_circuit("circuit bad;\nqubit[2] q;\ng q[5];\n")
        assert err.value.line == 3

    def test_clbit_index_out_of_range(self):
        with pytest.raises(IndexOutOfRangeError):
            parse_circuit("circuit bad;\nqubit[2] q;\nbit[1] c;\nc[3] = measure q[0];\n")

    def test_unsupported_construct_is_named(self):
        with pytest.raises(UnsupportedConstructError) as err:
            parse_circuit("circuit bad;\nqubit[2] q;\nbarrier q[0];\n")
        assert "barrier" in str(err.value)

    def test_unsupported_gate_definition(self):
        with pytest.raises(UnsupportedConstructError) as err:
            parse_circuit("circuit bad;\nqubit[1] q;\ngate mine a { }\n")
        assert "gate" in str(err.value)

    def test_duplicate_qubit_in_gate(self):
        with pytest.raises(CircuitSyntaxError):
            parse_circuit("circuit bad;\nqubit[2] q;\ng q[0], q[0];\n")

    def test_bitstring_length_mismatch(self):
        with pytest.raises(CircuitSyntaxError):
            parse_circuit(
                'circuit bad;\nqubit[1] q;\nbit[2] c;\n'
                'c[0] = measure q[0];\nc[1] = measure q[0];\n'
                'while (c == "000") {\n  g q[0];\n}\n'
            )

    def test_condition_on_unmeasured_bit_warns(self):
        text = "circuit warny;\nqubit[1] q;\nbit[1] c;\nif (c[0]) {\n  g q[0];\n}\n"
        with pytest.warns(UnmeasuredConditionWarning):
            parse_circuit(text)

    def test_strict_validation_rejects_unmeasured_condition(self):
        text = "circuit warny;\nqubit[1] q;\nbit[1] c;\nif (c[0]) {\n  g q[0];\n}\n"
        import warnings

        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            c = parse_circuit(text)
        with pytest.raises(CircuitError):
            c.validate(strict=True)

    def test_while_body_measure_satisfies_dataflow(self):
        import warnings

        with warnings.catch_warnings():
            warnings.simplefilter("error", UnmeasuredConditionWarning)
            parse_circuit(MIDLOOP_TEXT)


class TestRoundTrip:
    @pytest.mark.parametrize("text", [CHAIN3_TEXT, COND3_TEXT, MIDLOOP_TEXT])
    def test_hand_written_corpus(self, text):
        c = parse_circuit(text)
        assert parse_circuit(serialize_circuit(c)) == c

    def test_empty_body_serializes_header_and_declarations(self):
        c = parse_circuit("circuit empty;\nqubit[2] q;\nbit[1] m;\n")
        assert serialize_circuit(c) == "circuit empty;\nqubit[2] q;\nbit[1] m;\n"

    def test_conditional_demo_serialization_shape(self):
        c = parse_circuit(COND3_TEXT)
        text = serialize_circuit(c)
        assert text.count("measure") == 1
        assert "if (c[0] == 1) {" in text
        assert text.count("gc") == 1

    @pytest.mark.parametrize("seed", range(0, 100, 7))
    def test_random_adaptive_round_trips(self, seed):
        c = gen_random_adaptive(5, 12, seed)
        assert parse_circuit(serialize_circuit(c)) == c

    @pytest.mark.parametrize(
        "circuit",
        [gen_qpe(4), gen_iqpe(5), gen_vqe(3, 2, 2), gen_rus(8)],
        ids=["qpe", "iqpe", "vqe", "rus"],
    )
    def test_generator_round_trips(self, circuit):
        assert parse_circuit(serialize_circuit(circuit)) == circuit

    def test_nested_blocks_round_trip(self):
        text = (
            "circuit nested;\nqubit[3] q;\nbit[2] c;\n"
            "c[0] = measure q[0];\n"
            "if (c[0]) {\n"
            "  for 2 {\n    g q[0], q[1];\n  }\n"
            "} else {\n"
            "  h q[2];\n"
            "}\n"
        )
        c = parse_circuit(text)
        assert parse_circuit(serialize_circuit(c)) == c


class TestCircuitJson:
    def test_json_round_trip(self):
        c = parse_circuit(MIDLOOP_TEXT)
        data = circuit_to_dict(c)
        assert data["ir_version"] == 1
        again = circuit_from_dict(json.loads(json.dumps(data)))
        assert again == c

    def test_json_rejects_unknown_version(self):
        c = parse_circuit(CHAIN3_TEXT)
        data = circuit_to_dict(c)
        data["ir_version"] = 99
        with pytest.raises(CircuitError):
            circuit_from_dict(data)

    def test_json_validates_refs(self):
        c = parse_circuit(CHAIN3_TEXT)
        data = circuit_to_dict(c)
        data["body"][0]["qubits"] = [0, 9]
        with pytest.raises(CircuitError):
            circuit_from_dict(data)
