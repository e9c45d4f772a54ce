"""Benchmark generator tests using the recursive IR walker oracle."""

import math
import warnings

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hypaq import (
    ForBlock,
    GateOp,
    IfBlock,
    InvalidSizeError,
    RUS_THETA,
    UnmeasuredConditionWarning,
    WhileBlock,
    compute_layering,
    gen_iqpe,
    gen_qpe,
    gen_random_adaptive,
    gen_rus,
    gen_vqe,
    parse_circuit,
    serialize_circuit,
)
from helpers import walk_circuit_stats


class TestQpe:
    def test_smallest_instance(self):
        c = gen_qpe(1)
        assert c.num_qubits == 2
        stats = walk_circuit_stats(c)
        cps = [s for s in c.body.items if isinstance(s, GateOp) and s.name == "cp"]
        assert len(cps) == 1
        assert stats["while_blocks"] == stats["if_blocks"] == 0

    def test_counting_register_three(self):
        c = gen_qpe(3)
        assert c.num_qubits == 4
        gates = [s for s in c.body.items if isinstance(s, GateOp)]
        ladder = [g for g in gates if g.name == "cp" and g.qubits[1].index == 3]
        assert len(ladder) == 3
        iqft_cp = [g for g in gates if g.name == "cp" and g.qubits[1].index != 3]
        assert len(iqft_cp) == 3 * 2 // 2  # n(n-1)/2
        hadamards = [g for g in gates if g.name == "h"]
        assert len(hadamards) == 3 + 3

    @pytest.mark.parametrize("n", [1, 2, 5, 8])
    def test_gate_count_formula_vs_walker(self, n):
        stats = walk_circuit_stats(gen_qpe(n))
        assert stats["gates"] == 2 * n + n + n * (n - 1) // 2
        assert stats["multi_qubit_gates"] == n + n * (n - 1) // 2
        assert stats["measures"] == n

    def test_static_structure(self):
        stats = walk_circuit_stats(gen_qpe(4))
        assert stats["if_blocks"] == stats["while_blocks"] == stats["for_blocks"] == 0


class TestIqpe:
    def test_single_iteration_has_no_conditionals(self):
        c = gen_iqpe(1)
        assert c.num_qubits == 2
        assert c.num_clbits == 1
        assert walk_circuit_stats(c)["if_blocks"] == 0

    def test_three_iterations_have_two_if_blocks(self):
        stats = walk_circuit_stats(gen_iqpe(3))
        assert stats["if_blocks"] == 2

    @pytest.mark.parametrize("iters", [1, 2, 4, 7])
    def test_reset_count_equals_iterations(self, iters):
        assert walk_circuit_stats(gen_iqpe(iters))["resets"] == iters

    def test_conditions_read_previous_bit(self):
        c = gen_iqpe(4)
        blocks = [s for s in c.body.items if isinstance(s, IfBlock)]
        bits = [b.cond.bit.index for b in blocks]
        assert bits == [0, 1, 2]

    def test_dataflow_clean(self):
        with warnings.catch_warnings():
            warnings.simplefilter("error", UnmeasuredConditionWarning)
            gen_iqpe(5).validate()


class TestVqe:
    def test_small_instance_counts(self):
        c = gen_vqe(2, 1, 1)
        loop = c.body.items[0]
        assert isinstance(loop, ForBlock) and loop.count == 1
        stats = walk_circuit_stats(c)
        assert stats["single_qubit_gates"] == 2
        assert stats["multi_qubit_gates"] == 1
        assert stats["measures"] == 2
        assert stats["resets"] == 2

    @pytest.mark.parametrize("n,l,k", [(2, 1, 1), (3, 2, 2), (4, 1, 3), (5, 3, 2)])
    def test_total_gate_closed_form(self, n, l, k):
        stats = walk_circuit_stats(gen_vqe(n, l, k))
        assert stats["gates"] == k * (n * l + (n - 1) * l)
        assert stats["gates"] + stats["measures"] + stats["resets"] == k * (
            n * l + (n - 1) * l + 2 * n
        )

    def test_body_is_one_group(self):
        from hypaq import flatten

        entries = flatten(gen_vqe(3, 2, 2))
        assert {e.group_id for e in entries} == {"for_0"}


class TestRus:
    def test_minimum_size_has_one_retry_loop(self):
        stats = walk_circuit_stats(gen_rus(4))
        assert stats["while_blocks"] == 1

    def test_full_ladder_top(self):
        c = gen_rus(48)
        assert c.num_qubits == 48
        assert walk_circuit_stats(c)["while_blocks"] == 12

    def test_rejects_too_small(self):
        with pytest.raises(InvalidSizeError):
            gen_rus(3)

    def test_rotation_angle(self):
        assert math.isclose(RUS_THETA, math.pi + math.acos(3 / 5))
        c = gen_rus(4)
        rotations = [
            s for s in c.body.items if isinstance(s, GateOp) and s.name == "rz"
        ]
        assert rotations and all(g.params == (RUS_THETA,) for g in rotations)

    def test_gate_total_strictly_increases_over_ladder(self):
        totals = [walk_circuit_stats(gen_rus(n))["gates"] for n in range(4, 49, 4)]
        assert all(a < b for a, b in zip(totals, totals[1:]))

    def test_leftover_qubits_allowed(self):
        c = gen_rus(7)
        assert c.num_qubits == 7
        assert walk_circuit_stats(c)["while_blocks"] == 1


class TestRandomAdaptive:
    def test_determinism(self):
        a = serialize_circuit(gen_random_adaptive(5, 12, seed=42))
        b = serialize_circuit(gen_random_adaptive(5, 12, seed=42))
        assert a == b

    def test_seed_variation_changes_structure(self):
        base = serialize_circuit(gen_random_adaptive(5, 12, seed=0))
        assert any(
            serialize_circuit(gen_random_adaptive(5, 12, seed=s)) != base
            for s in range(1, 101)
        )

    def test_depth_hits_target_exactly(self):
        for seed in range(12):
            c = gen_random_adaptive(6, 14, seed=seed)
            assert compute_layering(c).depth == 14

    def test_rejects_single_qubit(self):
        with pytest.raises(InvalidSizeError):
            gen_random_adaptive(1, 5, seed=0)

    def test_probability_overrides(self):
        c = gen_random_adaptive(4, 30, seed=2, probs={"while": 0.0, "if": 0.0, "for": 0.0})
        stats = walk_circuit_stats(c)
        assert stats["while_blocks"] == stats["if_blocks"] == stats["for_blocks"] == 0

    def test_unknown_probability_key_rejected(self):
        with pytest.raises(InvalidSizeError):
            gen_random_adaptive(4, 5, seed=0, probs={"bogus": 1.0})

    @settings(max_examples=60, deadline=None)
    @given(
        n=st.integers(min_value=2, max_value=8),
        depth=st.integers(min_value=1, max_value=25),
        seed=st.integers(min_value=0, max_value=2**63 - 1),
    )
    def test_outputs_satisfy_invariants(self, n, depth, seed):
        with warnings.catch_warnings():
            warnings.simplefilter("error", UnmeasuredConditionWarning)
            c = gen_random_adaptive(n, depth, seed)
            c.validate(strict=True)
        assert parse_circuit(serialize_circuit(c)) == c

    def test_nesting_depth_at_most_two(self):
        def max_nesting(block, depth=0):
            deepest = depth
            for stmt in block.items:
                if isinstance(stmt, IfBlock):
                    deepest = max(
                        deepest,
                        max_nesting(stmt.then_body, depth + 1),
                        max_nesting(stmt.else_body, depth + 1),
                    )
                elif isinstance(stmt, (WhileBlock, ForBlock)):
                    deepest = max(deepest, max_nesting(stmt.body, depth + 1))
            return deepest

        for seed in range(40):
            c = gen_random_adaptive(5, 25, seed=seed)
            assert max_nesting(c.body) <= 2
