"""hypaq: hypergraph partitioning toolkit for adaptive quantum circuits.

Pipeline: parse or generate a circuit with classical control flow, translate
it into a primal (static) or extended (adaptive) hypergraph, partition the
hypergraph across k logical QPUs, and report comparison metrics.
"""

from .builders import (
    DEPENDENT_GATE_COUNT,
    WeightModel,
    build_adaptive,
    build_static,
    condition_pattern,
    estimate_condition_probability,
    load_weight_model,
)
from .errors import (
    AdaptiveConstructInStaticModeError,
    CircuitError,
    CircuitSyntaxError,
    ConfigError,
    DuplicateLabelError,
    EmptyPinsError,
    HypaqError,
    IndexOutOfRangeError,
    InvalidSizeError,
    ModeViolationError,
    TooFewQubitsError,
    UnassignedVertexError,
    UndeclaredRegisterError,
    UnknownVertexError,
    UnmeasuredConditionWarning,
    UnsupportedConstructError,
    UnsupportedKError,
    WhileInStaticModeError,
)
from .generators import (
    RANDOM_DEFAULT_PROBS,
    RUS_THETA,
    gen_iqpe,
    gen_qpe,
    gen_random_adaptive,
    gen_rus,
    gen_vqe,
)
from .hypergraph import (
    Conditional,
    GraphMode,
    GraphStats,
    Hyperedge,
    HyperedgeKind,
    Hypergraph,
    IncidenceMatrix,
    MeasurementEdge,
    Standard,
    SuperGroup,
    Vertex,
    VertexKind,
    kind_name,
)
from .ir import (
    BitEquals,
    Block,
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
    circuit_from_dict,
    circuit_to_dict,
    condition_bits,
)
from .layering import FlatStatement, Layering, compute_layering, flatten
from .parser import parse_circuit, serialize_circuit
from .partitioner import (
    CommRecord,
    PartitionConfig,
    PartitionResult,
    clique_expansion,
    compute_balance,
    compute_cut_size,
    fm_refine,
    handle_conditional_cuts,
    initial_partition,
    kl_partition,
    partition,
    qubit_capacity,
)
from .report import (
    ComparisonRow,
    compare,
    count_gate_instances,
    parse_generator_spec,
    rows_to_csv,
    rows_to_jsonl,
    sweep,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
