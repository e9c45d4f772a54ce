"""Shared test fixtures and independent oracles.

Oracles here deliberately re-derive results through different mechanisms
than the package (pairwise-conflict DAG instead of timeline counters,
bitmask enumeration instead of heuristics, recursive tree walks instead of
flatten) so they can vouch for the implementation.
"""

from __future__ import annotations

import math
from itertools import combinations, product

from hypaq import (
    Circuit,
    Conditional,
    ForBlock,
    GateOp,
    Hypergraph,
    IfBlock,
    MeasureOp,
    ResetOp,
    Sequence,
    SuperGroup,
    VertexKind,
    WhileBlock,
    condition_bits,
    flatten,
)

# -- golden circuit texts -----------------------------------------------------

# Three qubits, two 2-qubit gates sharing the middle qubit.
CHAIN3_TEXT = """\
circuit chain3;
qubit[3] q;
g1 q[0], q[1];
g2 q[1], q[2];
"""

# A gate, a mid-circuit measurement, and a gate guarded by the outcome.
COND3_TEXT = """\
circuit cond3;
qubit[3] q;
bit[1] c;
g1 q[0], q[1];
c[0] = measure q[0];
if (c[0]) {
  gc q[1], q[2];
}
"""

# Three qubits, two mid-circuit bits driving a while loop and an if block,
# final measurements into a separate output register.
MIDLOOP_TEXT = """\
circuit midloop;
qubit[3] q;
bit[2] mid;
bit[3] out;
my_gate(1.2) q[0], q[1];
my_phase(0.6) q[1];
mid[0] = measure q[0];
mid[1] = measure q[1];
while (mid == "00") {
  my_gate(1.2) q[0], q[1];
  my_phase(0.6) q[1];
  mid[0] = measure q[0];
  mid[1] = measure q[1];
}
if (mid[0]) {
  my_gate(1.2) q[0];
}
reset q[0];
reset q[1];
reset q[2];
out[0] = measure q[0];
out[1] = measure q[1];
out[2] = measure q[2];
"""


# -- recursive IR walker (independent of flatten) ------------------------------


def walk_circuit_stats(circuit: Circuit) -> dict[str, int]:
    """Counts with for-bodies expanded and while-bodies counted once."""
    stats = {
        "gates": 0,
        "multi_qubit_gates": 0,
        "single_qubit_gates": 0,
        "measures": 0,
        "resets": 0,
        "if_blocks": 0,
        "while_blocks": 0,
        "for_blocks": 0,
    }

    def walk(block: Sequence, mult: int) -> None:
        for stmt in block.items:
            if isinstance(stmt, GateOp):
                stats["gates"] += mult
                if len(stmt.qubits) >= 2:
                    stats["multi_qubit_gates"] += mult
                else:
                    stats["single_qubit_gates"] += mult
            elif isinstance(stmt, MeasureOp):
                stats["measures"] += mult
            elif isinstance(stmt, ResetOp):
                stats["resets"] += mult
            elif isinstance(stmt, IfBlock):
                stats["if_blocks"] += 1
                walk(stmt.then_body, mult)
                walk(stmt.else_body, mult)
            elif isinstance(stmt, WhileBlock):
                stats["while_blocks"] += 1
                walk(stmt.body, mult)
            elif isinstance(stmt, ForBlock):
                stats["for_blocks"] += 1
                walk(stmt.body, mult * stmt.count)
    walk(circuit.body, 1)
    return stats


# -- depth oracle: pairwise-conflict DAG + longest path -------------------------


def depth_oracle(circuit: Circuit) -> int:
    """Longest path in the statement conflict DAG (1-based depth)."""
    entries = flatten(circuit, unroll_for=True)

    def resources(entry):
        stmt = entry.statement
        if isinstance(stmt, GateOp):
            qubits = {q.index for q in stmt.qubits}
            writes: set[int] = set()
        elif isinstance(stmt, MeasureOp):
            qubits = {stmt.qubit.index}
            writes = {stmt.clbit.index}
        else:
            qubits = {stmt.qubit.index}
            writes = set()
        reads = (
            set(condition_bits(entry.path_condition))
            if entry.path_condition
            else set()
        )
        return qubits, reads, writes

    res = [resources(e) for e in entries]

    def conflict(i: int, j: int) -> bool:
        qi, ri, wi = res[i]
        qj, rj, wj = res[j]
        return bool(qi & qj or (wi & rj) or (ri & wj) or (wi & wj))

    n = len(entries)
    longest = [1] * n
    for j in range(n):
        for i in range(j):
            if conflict(i, j):
                longest[j] = max(longest[j], longest[i] + 1)
    return max(longest, default=0)


# -- measurement influence oracle ------------------------------------------------


def influencing_measures(circuit: Circuit) -> dict[int, int]:
    """flat index of each influencing measure -> downstream reader count."""
    entries = flatten(circuit, unroll_for=True)
    result: dict[int, int] = {}
    for i, entry in enumerate(entries):
        if not isinstance(entry.statement, MeasureOp):
            continue
        clbit = entry.statement.clbit.index
        count = 0
        for j in range(i + 1, len(entries)):
            later = entries[j]
            if later.path_condition and clbit in condition_bits(later.path_condition):
                count += 1
        if count:
            result[i] = count
    return result


# -- hMETIS reader oracle ---------------------------------------------------------


def read_hmetis(text: str) -> tuple[list[tuple[int, frozenset[int]]], list[int]]:
    """(edges as (int weight, 0-based pin set), vertex weights)."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    n_edges, n_vertices, mode = (int(x) for x in lines[0].split())
    assert mode == 11, "expected weighted edges and vertices"
    edges = []
    for ln in lines[1 : 1 + n_edges]:
        parts = [int(x) for x in ln.split()]
        edges.append((parts[0], frozenset(p - 1 for p in parts[1:])))
    weights = [int(ln) for ln in lines[1 + n_edges : 1 + n_edges + n_vertices]]
    assert len(weights) == n_vertices
    return edges, weights


# -- brute-force partition oracle ---------------------------------------------------


def capacity(nq: int, k: int, epsilon: float) -> float:
    return max(float(math.ceil(nq / k)), (nq / k) * (1.0 + epsilon))


def _overhead_surcharge(graph: Hypergraph, blocks_of_edge) -> float:
    total = 0.0
    for edge in graph.active_edges():
        is_cond = isinstance(edge.kind, Conditional) or (
            isinstance(edge.kind, SuperGroup)
            and any(
                isinstance(graph.edges[m].kind, Conditional)
                for m in edge.kind.member_edge_ids
            )
        )
        if is_cond and blocks_of_edge(edge) >= 2:
            total += edge.weight
    return total


def brute_force_bisection(
    graph: Hypergraph,
    epsilon: float,
    overhead_factor: float = 1.0,
) -> tuple[float, list[dict[int, int]]]:
    """Exhaustive k=2 search over capacity-feasible assignments.

    Minimizes plain cut plus, when ``overhead_factor > 1``, the flat
    surcharge (factor - 1) x w per cut conditional edge. Returns the optimum
    value and every optimal assignment (vertex 0 fixed in block 0).
    """
    n = len(graph.vertices)
    assert n <= 20, "brute force oracle limited to small graphs"
    qubit_mask = 0
    nq = 0
    for v in graph.vertices:
        if v.kind is VertexKind.QUBIT:
            qubit_mask |= 1 << v.id
            nq += 1
    cap = capacity(nq, 2, epsilon)
    active = graph.active_edges()
    edge_masks = []
    for edge in active:
        mask = 0
        for pin in edge.pins:
            mask |= 1 << pin
        is_cond = isinstance(edge.kind, Conditional) or (
            isinstance(edge.kind, SuperGroup)
            and any(
                isinstance(graph.edges[m].kind, Conditional)
                for m in edge.kind.member_edge_ids
            )
        )
        edge_masks.append((mask, edge.weight, is_cond))
    best = math.inf
    optima: list[int] = []
    for assign in range(0, 1 << n, 2):  # vertex 0 pinned to block 0
        ones = bin(assign & qubit_mask).count("1")
        if ones > cap or (nq - ones) > cap:
            continue
        value = 0.0
        for mask, weight, is_cond in edge_masks:
            part = assign & mask
            if part != 0 and part != mask:
                value += weight
                if is_cond and overhead_factor > 1.0:
                    value += (overhead_factor - 1.0) * weight
        if value < best - 1e-12:
            best = value
            optima = [assign]
        elif abs(value - best) <= 1e-12:
            optima.append(assign)
    assignments = [
        {v: (mask >> v) & 1 for v in range(n)} for mask in optima
    ]
    return best, assignments


def brute_force_kway(
    graph: Hypergraph, k: int, epsilon: float
) -> tuple[float, list[dict[int, int]]]:
    """Exhaustive k-way search (tiny graphs only)."""
    n = len(graph.vertices)
    assert n <= 10
    qubits = [v.id for v in graph.vertices if v.kind is VertexKind.QUBIT]
    cap = capacity(len(qubits), k, epsilon)
    active = graph.active_edges()
    best = math.inf
    optima: list[tuple[int, ...]] = []
    for assign in product(range(k), repeat=n):
        counts = [0] * k
        for q in qubits:
            counts[assign[q]] += 1
        if any(c > cap for c in counts):
            continue
        value = 0.0
        for edge in active:
            spans = len({assign[p] for p in edge.pins})
            value += edge.weight * (spans - 1)
        if value < best - 1e-12:
            best = value
            optima = [assign]
        elif abs(value - best) <= 1e-12:
            optima.append(assign)
    return best, [dict(enumerate(a)) for a in optima]


def fold_cut(graph: Hypergraph, assignment: dict[int, int]) -> float:
    """Independent cut fold used to cross-check compute_cut_size."""
    total = 0.0
    for edge in graph.active_edges():
        blocks = {assignment[p] for p in edge.pins}
        total += edge.weight * (len(blocks) - 1)
    return total


def random_test_hypergraph(rng, max_vertices: int = 12) -> Hypergraph:
    """Random extended-mode hypergraph for oracle comparisons."""
    from hypaq import BitEquals, ClbitRef, GraphMode, MeasurementEdge, Standard

    n_qubits = rng.randint(4, max_vertices - 2)
    n_clbits = rng.randint(0, min(2, max_vertices - n_qubits))
    graph = Hypergraph(GraphMode.EXTENDED)
    for q in range(n_qubits):
        graph.add_vertex(VertexKind.QUBIT, f"q{q}")
    for c in range(n_clbits):
        graph.add_vertex(VertexKind.CLBIT, f"c[{c}]")
    n_vertices = n_qubits + n_clbits
    n_edges = rng.randint(3, 14)
    weights = [0.25, 0.5, 1.0, 1.0, 2.0]
    for _ in range(n_edges):
        size = rng.randint(2, min(4, n_vertices))
        pins = rng.sample(range(n_vertices), size)
        weight = rng.choice(weights)
        roll = rng.random()
        if roll < 0.7 or n_clbits == 0:
            graph.add_edge(pins, weight, Standard())
        elif roll < 0.9:
            cond = BitEquals(bit=ClbitRef(rng.randrange(max(1, n_clbits))), expected=1)
            graph.add_edge(pins, weight, Conditional(condition=cond, probability=0.5))
        else:
            graph.add_edge(pins[:2], weight, MeasurementEdge())
    return graph


def clique_pairs(graph: Hypergraph) -> dict[tuple[int, int], float]:
    """Independent clique expansion for cross-checking."""
    pairs: dict[tuple[int, int], float] = {}
    for edge in graph.active_edges():
        p = len(edge.pins)
        if p < 2:
            continue
        for a, b in combinations(sorted(edge.pins), 2):
            pairs[(a, b)] = pairs.get((a, b), 0.0) + edge.weight / (p - 1)
    return pairs
