"""Weighted typed hypergraph with incidence-matrix and hMETIS export.

Build phase is single-writer (``add_vertex`` / ``add_edge``); afterwards the
graph is treated as immutable and may be shared across concurrent readers.
Exports and statistics are pure.

Super-group edges absorb their members: absorbed edges stay in storage for
reporting, but are excluded from the *active* edge set used by the incidence
matrix, statistics and partitioning.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Iterable, Union

import numpy as np

from .errors import (
    DuplicateLabelError,
    EmptyPinsError,
    HypaqError,
    ModeViolationError,
    UnknownVertexError,
)
from .ir import Condition, condition_from_dict, condition_to_dict


class VertexKind(enum.Enum):
    QUBIT = "qubit"
    CLBIT = "clbit"


class GraphMode(enum.Enum):
    PRIMAL = "primal"
    EXTENDED = "extended"


@dataclass(frozen=True, slots=True)
class Vertex:
    id: int
    kind: VertexKind
    label: str


@dataclass(frozen=True, slots=True)
class Standard:
    """Unconditional gate edge."""


@dataclass(frozen=True, slots=True)
class Conditional:
    """Gate edge guarded by a classical predicate."""

    condition: Condition
    probability: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.probability <= 1.0:
            raise HypaqError(f"probability {self.probability} outside [0, 1]")


@dataclass(frozen=True, slots=True)
class MeasurementEdge:
    """Edge linking a measured qubit to its classical bit."""


@dataclass(frozen=True, slots=True)
class SuperGroup:
    """Aggregate of a control-flow group's member edges."""

    member_edge_ids: tuple[int, ...]
    group_label: str

    def __post_init__(self) -> None:
        if not self.member_edge_ids:
            raise HypaqError("super-group with no member edges")


HyperedgeKind = Union[Standard, Conditional, MeasurementEdge, SuperGroup]


def kind_name(kind: HyperedgeKind) -> str:
    if isinstance(kind, Standard):
        return "standard"
    if isinstance(kind, Conditional):
        return "conditional"
    if isinstance(kind, MeasurementEdge):
        return "measurement"
    return "super_group"


@dataclass(frozen=True, slots=True)
class Hyperedge:
    id: int
    pins: frozenset[int]
    weight: float
    kind: HyperedgeKind
    origin: tuple[str, ...] = ()
    layer: int | None = field(default=None, compare=False)

    @property
    def label(self) -> str:
        if isinstance(self.kind, SuperGroup):
            return self.kind.group_label
        return f"e{self.id}"


@dataclass(frozen=True, slots=True)
class GraphStats:
    num_vertices: int
    num_qubit_vertices: int
    num_edges: int
    edges_by_kind: dict[str, int]
    total_pin_count: int
    total_weight: float

    def as_dict(self) -> dict:
        return {
            "num_vertices": self.num_vertices,
            "num_qubit_vertices": self.num_qubit_vertices,
            "num_edges": self.num_edges,
            "edges_by_kind": dict(self.edges_by_kind),
            "total_pin_count": self.total_pin_count,
            "total_weight": self.total_weight,
        }


@dataclass(frozen=True, slots=True)
class IncidenceMatrix:
    """Vertices x active edges, entries in {-1, 0, 1}.

    1 marks ordinary pin membership; -1 marks pins of super-group edges
    (grouping constraint); 0 marks no connection.
    """

    entries: np.ndarray
    vertex_labels: tuple[str, ...]
    edge_labels: tuple[str, ...]
    edge_ids: tuple[int, ...]

    @property
    def rows(self) -> int:
        return self.entries.shape[0]

    @property
    def cols(self) -> int:
        return self.entries.shape[1]

    def to_csv(self) -> str:
        lines = ["," + ",".join(self.edge_labels)]
        for i, label in enumerate(self.vertex_labels):
            row = ",".join(str(int(v)) for v in self.entries[i])
            lines.append(f"{label},{row}")
        return "\n".join(lines) + "\n"


HYPERGRAPH_VERSION = 1


class Hypergraph:
    """Vertices plus typed weighted hyperedges, in primal or extended mode."""

    def __init__(self, mode: GraphMode):
        self.mode = mode
        self.vertices: list[Vertex] = []
        self.edges: list[Hyperedge] = []
        self._label_to_id: dict[str, int] = {}
        # First measurement writer of each clbit vertex (qubit vertex id);
        # used to co-assign classical bits during partitioning.
        self.clbit_writer: dict[int, int] = {}
        self.metadata: dict[str, float] = {}

    # -- construction -------------------------------------------------------

    def add_vertex(self, kind: VertexKind, label: str) -> int:
        if label in self._label_to_id:
            raise DuplicateLabelError(f"duplicate vertex label {label!r}")
        if self.mode is GraphMode.PRIMAL and kind is VertexKind.CLBIT:
            raise ModeViolationError("classical vertices not allowed in primal mode")
        vid = len(self.vertices)
        self.vertices.append(Vertex(id=vid, kind=kind, label=label))
        self._label_to_id[label] = vid
        return vid

    def add_edge(
        self,
        pins: Iterable[int],
        weight: float,
        kind: HyperedgeKind,
        origin: tuple[str, ...] = (),
        layer: int | None = None,
    ) -> int:
        pin_set = frozenset(pins)
        if not pin_set:
            raise EmptyPinsError("hyperedge needs at least one pin")
        for pin in pin_set:
            if not 0 <= pin < len(self.vertices):
                raise UnknownVertexError(f"pin {pin} is not a declared vertex")
        if weight < 0:
            raise HypaqError(f"negative edge weight {weight}")
        if self.mode is GraphMode.PRIMAL and not isinstance(kind, Standard):
            raise ModeViolationError(
                f"{kind_name(kind)} edge not allowed in primal mode"
            )
        if isinstance(kind, SuperGroup):
            for member in kind.member_edge_ids:
                if not 0 <= member < len(self.edges):
                    raise UnknownVertexError(f"super-group member edge {member} unknown")
        eid = len(self.edges)
        self.edges.append(
            Hyperedge(id=eid, pins=pin_set, weight=weight, kind=kind, origin=origin, layer=layer)
        )
        return eid

    # -- views ---------------------------------------------------------------

    def vertex_by_label(self, label: str) -> Vertex:
        return self.vertices[self._label_to_id[label]]

    @property
    def qubit_vertex_ids(self) -> list[int]:
        return [v.id for v in self.vertices if v.kind is VertexKind.QUBIT]

    def absorbed_edge_ids(self) -> frozenset[int]:
        absorbed: set[int] = set()
        for edge in self.edges:
            if isinstance(edge.kind, SuperGroup):
                absorbed.update(edge.kind.member_edge_ids)
        return frozenset(absorbed)

    def active_edges(self) -> list[Hyperedge]:
        absorbed = self.absorbed_edge_ids()
        return [e for e in self.edges if e.id not in absorbed]

    # -- exports ---------------------------------------------------------------

    def incidence_matrix(self) -> IncidenceMatrix:
        active = self.active_edges()
        entries = np.zeros((len(self.vertices), len(active)), dtype=np.int8)
        for col, edge in enumerate(active):
            value = -1 if isinstance(edge.kind, SuperGroup) else 1
            for pin in edge.pins:
                entries[pin, col] = value
        return IncidenceMatrix(
            entries=entries,
            vertex_labels=tuple(v.label for v in self.vertices),
            edge_labels=tuple(e.label for e in active),
            edge_ids=tuple(e.id for e in active),
        )

    def export_hmetis(self) -> str:
        """hMETIS text: header ``|E| |V| 11``, weighted edge lines with
        1-based pins, then one weight line per vertex (1 qubit, 0 clbit).

        Edge weights are scaled by 100 and rounded half-up to keep two
        decimals in the integer format.
        """
        active = self.active_edges()
        lines = [f"{len(active)} {len(self.vertices)} 11"]
        for edge in active:
            scaled = int(math.floor(edge.weight * 100 + 0.5))
            pins = " ".join(str(pin + 1) for pin in sorted(edge.pins))
            lines.append(f"{scaled} {pins}")
        for vertex in self.vertices:
            lines.append("1" if vertex.kind is VertexKind.QUBIT else "0")
        return "\n".join(lines) + "\n"

    def stats(self) -> GraphStats:
        active = self.active_edges()
        by_kind: dict[str, int] = {}
        for edge in active:
            name = kind_name(edge.kind)
            by_kind[name] = by_kind.get(name, 0) + 1
        return GraphStats(
            num_vertices=len(self.vertices),
            num_qubit_vertices=len(self.qubit_vertex_ids),
            num_edges=len(active),
            edges_by_kind=dict(sorted(by_kind.items())),
            total_pin_count=sum(len(e.pins) for e in active),
            total_weight=sum(e.weight for e in active),
        )

    # -- JSON codec -------------------------------------------------------------

    def to_dict(self) -> dict:
        def kind_dict(kind: HyperedgeKind) -> dict:
            if isinstance(kind, Standard):
                return {"type": "standard"}
            if isinstance(kind, Conditional):
                return {
                    "type": "conditional",
                    "condition": condition_to_dict(kind.condition),
                    "probability": kind.probability,
                }
            if isinstance(kind, MeasurementEdge):
                return {"type": "measurement"}
            return {
                "type": "super_group",
                "members": list(kind.member_edge_ids),
                "label": kind.group_label,
            }

        absorbed = self.absorbed_edge_ids()
        return {
            "hypergraph_version": HYPERGRAPH_VERSION,
            "mode": self.mode.value,
            "vertices": [
                {"id": v.id, "kind": v.kind.value, "label": v.label}
                for v in self.vertices
            ],
            "edges": [
                {
                    "id": e.id,
                    "pins": sorted(e.pins),
                    "weight": e.weight,
                    "kind": kind_dict(e.kind),
                    "origin": list(e.origin),
                    "layer": e.layer,
                    "absorbed": e.id in absorbed,
                }
                for e in self.edges
            ],
            "clbit_writer": {str(k): v for k, v in sorted(self.clbit_writer.items())},
            "metadata": dict(sorted(self.metadata.items())),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Hypergraph":
        if data.get("hypergraph_version") != HYPERGRAPH_VERSION:
            raise HypaqError(
                f"unsupported hypergraph_version {data.get('hypergraph_version')!r}"
            )
        graph = cls(GraphMode(data["mode"]))
        for v in data["vertices"]:
            graph.add_vertex(VertexKind(v["kind"]), v["label"])
        for e in data["edges"]:
            kd = e["kind"]
            kind: HyperedgeKind
            if kd["type"] == "standard":
                kind = Standard()
            elif kd["type"] == "conditional":
                kind = Conditional(
                    condition=condition_from_dict(kd["condition"]),
                    probability=kd["probability"],
                )
            elif kd["type"] == "measurement":
                kind = MeasurementEdge()
            elif kd["type"] == "super_group":
                kind = SuperGroup(
                    member_edge_ids=tuple(kd["members"]), group_label=kd["label"]
                )
            else:
                raise HypaqError(f"unknown edge kind {kd['type']!r}")
            graph.add_edge(
                pins=e["pins"],
                weight=e["weight"],
                kind=kind,
                origin=tuple(e.get("origin", ())),
                layer=e.get("layer"),
            )
        graph.clbit_writer = {int(k): v for k, v in data.get("clbit_writer", {}).items()}
        graph.metadata = dict(data.get("metadata", {}))
        return graph
