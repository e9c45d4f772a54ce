"""k-way hypergraph partitioning for multi-QPU circuit cutting.

The refinement heuristic follows classic Fiduccia-Mattheyses discipline with
the gain formula ``G(v, Vi) = dCutSize(v, Vi) - lambda * dBalance(v, Vi)``
(positive gain = improvement): within a pass every vertex moves at most once,
the full move sequence is explored greedily by maximum gain, and the pass is
rolled back to its best prefix. A Kernighan-Lin bisection baseline operates
on the clique-expanded graph. Conditional hyperedges cut across blocks
receive communication records and a weight surcharge.

One partitioning run mutates only its own internal state; the input graph is
read-only throughout, so concurrent runs on the same graph are safe.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from itertools import combinations
from typing import Mapping

from .errors import (
    HypaqError,
    TooFewQubitsError,
    UnassignedVertexError,
    UnsupportedKError,
)
from .hypergraph import (
    Conditional,
    Hypergraph,
    SuperGroup,
    VertexKind,
)
from .ir import Condition, condition_to_dict

_TOL = 1e-12


@dataclass(frozen=True, slots=True)
class PartitionConfig:
    """Knobs for one partitioning run.

    ``epsilon`` sets the hard per-block qubit ceiling
    ``max(ceil(nq/k), (nq/k) * (1 + epsilon))``; ``lambda_`` trades cut size
    against the soft balance penalty inside gains. ``comm_overhead_factor``
    scales weights of cut conditional edges when accounting communication.
    """

    k: int = 2
    lambda_: float = 1.0
    epsilon: float = 0.1
    max_passes: int = 20
    seed: int = 0
    heuristic: str = "fm"
    comm_overhead_factor: float = 2.0
    repartition_after_overhead: bool = False

    def __post_init__(self) -> None:
        if self.k < 2:
            raise HypaqError(f"k must be >= 2, got {self.k}")
        if self.lambda_ < 0:
            raise HypaqError("lambda must be >= 0")
        if self.epsilon < 0:
            raise HypaqError("epsilon must be >= 0")
        if self.max_passes < 1:
            raise HypaqError("max_passes must be >= 1")
        if self.heuristic not in ("fm", "kl"):
            raise HypaqError(f"unknown heuristic {self.heuristic!r}")
        if self.comm_overhead_factor < 1.0:
            raise HypaqError("comm_overhead_factor must be >= 1")


@dataclass(frozen=True, slots=True)
class CommRecord:
    """Communication protocol required by one cut conditional edge."""

    edge_id: int
    blocks: tuple[int, ...]
    condition: Condition | None
    adjusted_weight: float
    protocol_note: str

    def to_dict(self) -> dict:
        return {
            "edge_id": self.edge_id,
            "blocks": list(self.blocks),
            "condition": condition_to_dict(self.condition) if self.condition else None,
            "adjusted_weight": self.adjusted_weight,
            "protocol_note": self.protocol_note,
        }


@dataclass(frozen=True, slots=True)
class PartitionResult:
    """Assignment plus quality metrics and the refinement trace.

    ``pass_history`` holds ``(pass index, cut after pass)`` in the metric the
    run optimized (plain cut normally; the adjusted metric for reruns after
    overhead adjustment) and never increases. ``cut_size`` is always the
    plain connectivity metric of the final assignment.
    """

    assignment: dict[int, int]
    cut_size: float
    balance: int
    comm_records: tuple[CommRecord, ...] = ()
    pass_history: tuple[tuple[int, float], ...] = ()
    moves_applied: int = 0
    cut_size_with_overhead: float | None = None
    heuristic: str = "fm"

    def to_dict(self) -> dict:
        return {
            "assignment": {str(v): b for v, b in sorted(self.assignment.items())},
            "cut_size": self.cut_size,
            "balance": self.balance,
            "cut_size_with_overhead": self.cut_size_with_overhead,
            "comm_records": [r.to_dict() for r in self.comm_records],
            "pass_history": [list(entry) for entry in self.pass_history],
            "moves_applied": self.moves_applied,
            "heuristic": self.heuristic,
        }


def compute_cut_size(graph: Hypergraph, assignment: Mapping[int, int]) -> float:
    """Connectivity cut: sum over active edges of weight x (blocks spanned - 1)."""
    total = 0.0
    for edge in graph.active_edges():
        blocks = set()
        for pin in edge.pins:
            if pin not in assignment:
                raise UnassignedVertexError(f"vertex {pin} has no block")
            blocks.add(assignment[pin])
        total += edge.weight * (len(blocks) - 1)
    return total


def compute_balance(graph: Hypergraph, assignment: Mapping[int, int], k: int) -> int:
    """Total qubit overflow above the ideal per-block capacity ceil(nq/k)."""
    counts = [0] * k
    nq = 0
    for vertex in graph.vertices:
        if vertex.kind is not VertexKind.QUBIT:
            continue
        nq += 1
        if vertex.id not in assignment:
            raise UnassignedVertexError(f"vertex {vertex.id} has no block")
        counts[assignment[vertex.id]] += 1
    ideal = math.ceil(nq / k)
    return sum(max(0, c - ideal) for c in counts)


def qubit_capacity(nq: int, k: int, epsilon: float) -> float:
    """Hard per-block qubit ceiling.

    The ideal split ceil(nq/k) is always admissible; epsilon adds slack
    above the fractional ideal nq/k.
    """
    return max(float(math.ceil(nq / k)), (nq / k) * (1.0 + epsilon))


def initial_partition(graph: Hypergraph, cfg: PartitionConfig) -> dict[int, int]:
    """Middle-cut start: contiguous qubit-index ranges of near-equal size.

    Classical bits follow the block of their first measurement writer;
    unwritten clbits go to block 0.
    """
    qubits = graph.qubit_vertex_ids
    nq = len(qubits)
    if nq < cfg.k:
        raise TooFewQubitsError(f"{nq} qubit vertices cannot fill {cfg.k} blocks")
    assignment: dict[int, int] = {}
    base, rem = divmod(nq, cfg.k)
    start = 0
    for block in range(cfg.k):
        size = base + (1 if block < rem else 0)
        for vid in qubits[start : start + size]:
            assignment[vid] = block
        start += size
    for vertex in graph.vertices:
        if vertex.kind is VertexKind.CLBIT:
            writer = graph.clbit_writer.get(vertex.id)
            assignment[vertex.id] = assignment[writer] if writer is not None else 0
    return assignment


class _FMEngine:
    """Mutable state for FM passes on one graph.

    Exploration may overshoot the commit ceiling by one qubit (the classic
    max-cell-size slack that lets swaps happen); committed prefixes must end
    in a state whose every block satisfies the ceiling, and must not increase
    the cut metric being optimized.
    """

    def __init__(
        self,
        graph: Hypergraph,
        cfg: PartitionConfig,
        assignment: Mapping[int, int],
        weight_overrides: Mapping[int, float] | None = None,
    ):
        self.cfg = cfg
        self.k = cfg.k
        active = graph.active_edges()
        overrides = weight_overrides or {}
        self.weights = [overrides.get(e.id, e.weight) for e in active]
        self.pins = [sorted(e.pins) for e in active]
        self.n_vertices = len(graph.vertices)
        self.is_qubit = [v.kind is VertexKind.QUBIT for v in graph.vertices]
        self.nq = sum(self.is_qubit)
        self.ideal = math.ceil(self.nq / self.k)
        self.cap_commit = qubit_capacity(self.nq, self.k, cfg.epsilon)
        self.cap_explore = self.cap_commit + 1.0
        self.block_of = [0] * self.n_vertices
        for vid, block in assignment.items():
            self.block_of[vid] = block
        self.incident: list[list[int]] = [[] for _ in range(self.n_vertices)]
        for eidx, pins in enumerate(self.pins):
            for pin in pins:
                self.incident[pin].append(eidx)
        self.pin_blocks = [[0] * self.k for _ in self.pins]
        for eidx, pins in enumerate(self.pins):
            for pin in pins:
                self.pin_blocks[eidx][self.block_of[pin]] += 1
        self.qcount = [0] * self.k
        for vid in range(self.n_vertices):
            if self.is_qubit[vid]:
                self.qcount[self.block_of[vid]] += 1
        self.edge_spans = [
            sum(1 for c in counts if c > 0) for counts in self.pin_blocks
        ]

    def cut(self) -> float:
        total = 0.0
        for eidx, counts in enumerate(self.pin_blocks):
            spans = sum(1 for c in counts if c > 0)
            total += self.weights[eidx] * (spans - 1)
        return total

    def _balance_delta(self, vid: int, dst: int) -> int:
        if not self.is_qubit[vid]:
            return 0
        src = self.block_of[vid]
        cs, cd = self.qcount[src], self.qcount[dst]
        ideal = self.ideal
        return (
            max(0, cd + 1 - ideal)
            - max(0, cd - ideal)
            + max(0, cs - 1 - ideal)
            - max(0, cs - ideal)
        )

    def gain(self, vid: int, dst: int) -> float:
        """Cut decrease minus lambda x balance increase for moving vid to dst."""
        src = self.block_of[vid]
        cut_change = 0.0
        for eidx in self.incident[vid]:
            counts = self.pin_blocks[eidx]
            delta = 0
            if counts[src] == 1:
                delta -= 1
            if counts[dst] == 0:
                delta += 1
            cut_change += self.weights[eidx] * delta
        return -cut_change - self.cfg.lambda_ * self._balance_delta(vid, dst)

    def cut_decrease(self, vid: int, dst: int) -> float:
        src = self.block_of[vid]
        cut_change = 0.0
        for eidx in self.incident[vid]:
            counts = self.pin_blocks[eidx]
            delta = 0
            if counts[src] == 1:
                delta -= 1
            if counts[dst] == 0:
                delta += 1
            cut_change += self.weights[eidx] * delta
        return -cut_change

    def apply(self, vid: int, dst: int) -> None:
        src = self.block_of[vid]
        for eidx in self.incident[vid]:
            counts = self.pin_blocks[eidx]
            counts[src] -= 1
            if counts[src] == 0:
                self.edge_spans[eidx] -= 1
            if counts[dst] == 0:
                self.edge_spans[eidx] += 1
            counts[dst] += 1
        if self.is_qubit[vid]:
            self.qcount[src] -= 1
            self.qcount[dst] += 1
        self.block_of[vid] = dst

    def on_boundary(self, vid: int) -> bool:
        return any(self.edge_spans[eidx] > 1 for eidx in self.incident[vid])

    def commit_valid(self) -> bool:
        return all(c <= self.cap_commit + 1e-9 for c in self.qcount)

    def run_pass(self) -> int:
        """One locked greedy pass; returns committed move count.

        The committed prefix maximizes cumulative gain over prefixes whose
        end state satisfies the qubit ceiling and whose cumulative cut
        decrease is non-negative (pass history must stay monotone).
        """
        locked: set[int] = set()
        trail: list[tuple[int, int]] = []  # (vertex, previous block)
        cum_gain = 0.0
        cum_cut_dec = 0.0
        best_gain = 0.0
        best_len = 0
        while len(locked) < self.n_vertices:
            best: tuple[float, int, int] | None = None
            best_key: tuple[float, bool, int, int] | None = None
            for vid in range(self.n_vertices):
                if vid in locked:
                    continue
                src = self.block_of[vid]
                boundary = self.on_boundary(vid)
                for dst in range(self.k):
                    if dst == src:
                        continue
                    if self.is_qubit[vid] and self.qcount[dst] + 1 > self.cap_explore:
                        continue
                    g = self.gain(vid, dst)
                    # Equal gains: cut-incident vertices first, then low ids.
                    key = (g, boundary, -vid, -dst)
                    if best_key is None or key > best_key:
                        best_key = key
                        best = (g, vid, dst)
            if best is None:
                break
            g, vid, dst = best
            cum_cut_dec += self.cut_decrease(vid, dst)
            src = self.block_of[vid]
            self.apply(vid, dst)
            locked.add(vid)
            trail.append((vid, src))
            cum_gain += g
            if (
                self.commit_valid()
                and cum_cut_dec >= -_TOL
                and cum_gain > best_gain + _TOL
            ):
                best_gain = cum_gain
                best_len = len(trail)
        for vid, prev in reversed(trail[best_len:]):
            self.apply(vid, prev)
        return best_len

    def assignment(self) -> dict[int, int]:
        return {vid: self.block_of[vid] for vid in range(self.n_vertices)}


def _fm_run(
    graph: Hypergraph,
    cfg: PartitionConfig,
    start: Mapping[int, int],
    weight_overrides: Mapping[int, float] | None = None,
) -> PartitionResult:
    engine = _FMEngine(graph, cfg, start, weight_overrides)
    history: list[tuple[int, float]] = [(0, engine.cut())]
    moves = 0
    for pass_index in range(1, cfg.max_passes + 1):
        committed = engine.run_pass()
        if committed == 0:
            break
        moves += committed
        history.append((pass_index, engine.cut()))
    assignment = engine.assignment()
    return PartitionResult(
        assignment=assignment,
        cut_size=compute_cut_size(graph, assignment),
        balance=compute_balance(graph, assignment, cfg.k),
        pass_history=tuple(history),
        moves_applied=moves,
        heuristic="fm",
    )


def fm_refine(graph: Hypergraph, cfg: PartitionConfig) -> PartitionResult:
    """Middle-cut start plus FM passes until no pass improves."""
    return _fm_run(graph, cfg, initial_partition(graph, cfg))


# -- Kernighan-Lin baseline ---------------------------------------------------


def clique_expansion(graph: Hypergraph) -> dict[tuple[int, int], float]:
    """Pairwise weights: each p-pin active edge becomes a clique with
    per-pair weight w/(p-1); single-pin edges are ignored."""
    pair_w: dict[tuple[int, int], float] = {}
    for edge in graph.active_edges():
        p = len(edge.pins)
        if p < 2:
            continue
        share = edge.weight / (p - 1)
        for a, b in combinations(sorted(edge.pins), 2):
            pair_w[(a, b)] = pair_w.get((a, b), 0.0) + share
    return pair_w


def kl_partition(graph: Hypergraph, cfg: PartitionConfig) -> PartitionResult:
    """Classic KL pair-swap bisection on the clique-expanded graph.

    Swaps act on qubit vertices only; classical bits are re-assigned to
    their writer's block after each pass, and all reported cuts use the
    original hypergraph metric. A pass that would worsen that metric is
    reverted (the expansion is only an approximation of it).
    """
    if cfg.k != 2:
        raise UnsupportedKError(f"Kernighan-Lin supports k=2 only, got k={cfg.k}")
    start = initial_partition(graph, cfg)
    qubits = graph.qubit_vertex_ids
    pair_w_all = clique_expansion(graph)
    pair_w: dict[tuple[int, int], float] = {}
    qubit_set = set(qubits)
    for (a, b), w in pair_w_all.items():
        if a in qubit_set and b in qubit_set:
            pair_w[(a, b)] = w

    def w(a: int, b: int) -> float:
        return pair_w.get((a, b) if a < b else (b, a), 0.0)

    qblock = {v: start[v] for v in qubits}

    def with_clbits(qassign: dict[int, int]) -> dict[int, int]:
        full = dict(qassign)
        for vertex in graph.vertices:
            if vertex.kind is VertexKind.CLBIT:
                writer = graph.clbit_writer.get(vertex.id)
                full[vertex.id] = qassign[writer] if writer is not None else 0
        return full

    history: list[tuple[int, float]] = [
        (0, compute_cut_size(graph, with_clbits(qblock)))
    ]
    moves = 0
    for pass_index in range(1, cfg.max_passes + 1):
        side_a = [v for v in qubits if qblock[v] == 0]
        side_b = [v for v in qubits if qblock[v] == 1]
        d_val: dict[int, float] = {}
        for v in qubits:
            ext = sum(w(v, u) for u in qubits if u != v and qblock[u] != qblock[v])
            internal = sum(w(v, u) for u in qubits if u != v and qblock[u] == qblock[v])
            d_val[v] = ext - internal
        locked: set[int] = set()
        trail: list[tuple[int, int]] = []
        cum = 0.0
        best_gain = 0.0
        best_len = 0
        for _ in range(min(len(side_a), len(side_b))):
            best: tuple[float, int, int] | None = None
            best_key: tuple[float, int, int] | None = None
            for a in side_a:
                if a in locked:
                    continue
                for b in side_b:
                    if b in locked:
                        continue
                    g = d_val[a] + d_val[b] - 2.0 * w(a, b)
                    key = (g, -a, -b)
                    if best_key is None or key > best_key:
                        best_key = key
                        best = (g, a, b)
            if best is None:
                break
            g, a, b = best
            locked.add(a)
            locked.add(b)
            trail.append((a, b))
            cum += g
            for x in qubits:
                if x in locked:
                    continue
                if qblock[x] == qblock[a]:
                    d_val[x] += 2.0 * w(x, a) - 2.0 * w(x, b)
                else:
                    d_val[x] += 2.0 * w(x, b) - 2.0 * w(x, a)
            if cum > best_gain + _TOL:
                best_gain = cum
                best_len = len(trail)
        if best_len == 0:
            break
        prev_cut = history[-1][1]
        for a, b in trail[:best_len]:
            qblock[a], qblock[b] = qblock[b], qblock[a]
        new_cut = compute_cut_size(graph, with_clbits(qblock))
        if new_cut > prev_cut + _TOL:
            for a, b in trail[:best_len]:
                qblock[a], qblock[b] = qblock[b], qblock[a]
            break
        moves += 2 * best_len
        history.append((pass_index, new_cut))
    assignment = with_clbits(qblock)
    return PartitionResult(
        assignment=assignment,
        cut_size=compute_cut_size(graph, assignment),
        balance=compute_balance(graph, assignment, cfg.k),
        pass_history=tuple(history),
        moves_applied=moves,
        heuristic="kl",
    )


# -- conditional-cut handling ---------------------------------------------------


def _conditional_like(graph: Hypergraph, edge) -> Condition | None:
    """Representative condition if the edge is conditional or a super-group
    containing a conditional member."""
    if isinstance(edge.kind, Conditional):
        return edge.kind.condition
    if isinstance(edge.kind, SuperGroup):
        for member in edge.kind.member_edge_ids:
            kind = graph.edges[member].kind
            if isinstance(kind, Conditional):
                return kind.condition
    return None


def handle_conditional_cuts(
    graph: Hypergraph, result: PartitionResult, cfg: PartitionConfig
) -> PartitionResult:
    """Record communication protocols for cut conditional edges.

    Each cut conditional edge (or super-group with conditional members) gets
    one record with adjusted weight w x factor; the overhead metric adds the
    flat surcharge (factor - 1) x w per such edge. The assignment and plain
    cut are unchanged.
    """
    records: list[CommRecord] = []
    surcharge = 0.0
    for edge in graph.active_edges():
        condition = _conditional_like(graph, edge)
        if condition is None:
            continue
        blocks = {result.assignment[pin] for pin in edge.pins}
        if len(blocks) < 2:
            continue
        adjusted = edge.weight * cfg.comm_overhead_factor
        surcharge += (cfg.comm_overhead_factor - 1.0) * edge.weight
        records.append(
            CommRecord(
                edge_id=edge.id,
                blocks=tuple(sorted(blocks)),
                condition=condition,
                adjusted_weight=adjusted,
                protocol_note=(
                    f"edge {edge.label} spans blocks {sorted(blocks)}; broadcast "
                    "measurement outcome before conditional execution"
                ),
            )
        )
    return replace(
        result,
        comm_records=tuple(records),
        cut_size_with_overhead=result.cut_size + surcharge,
    )


def partition(graph: Hypergraph, cfg: PartitionConfig) -> PartitionResult:
    """Full pipeline: middle-cut start, FM or KL refinement, conditional-cut
    accounting, and (optionally) one FM rerun with overhead-adjusted weights."""
    if cfg.heuristic == "kl":
        result = kl_partition(graph, cfg)
    else:
        result = fm_refine(graph, cfg)
    result = handle_conditional_cuts(graph, result, cfg)
    if cfg.repartition_after_overhead and result.comm_records:
        overrides = {r.edge_id: r.adjusted_weight for r in result.comm_records}
        rerun = _fm_run(graph, cfg, result.assignment, weight_overrides=overrides)
        rerun = replace(
            rerun,
            moves_applied=result.moves_applied + rerun.moves_applied,
            heuristic=result.heuristic,
        )
        result = handle_conditional_cuts(graph, rerun, cfg)
    return result
