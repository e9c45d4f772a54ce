"""Exception types shared across the toolkit."""

from __future__ import annotations


class HypaqError(Exception):
    """Base class for all toolkit errors."""


class CircuitError(HypaqError):
    """IR-level error, optionally carrying a source location."""

    def __init__(self, message: str, line: int | None = None, col: int | None = None):
        self.line = line
        self.col = col
        if line is not None:
            message = f"{line}:{col if col is not None else 0}: {message}"
        super().__init__(message)


class CircuitSyntaxError(CircuitError):
    """Malformed circuit text."""


class UndeclaredRegisterError(CircuitError):
    """Reference to a register that was never declared."""


class IndexOutOfRangeError(CircuitError):
    """Qubit or clbit index outside its declared register."""


class UnsupportedConstructError(CircuitError):
    """Recognized language construct outside the supported subset."""


class AdaptiveConstructInStaticModeError(CircuitError):
    """If/while block encountered where static semantics were requested."""


class WhileInStaticModeError(AdaptiveConstructInStaticModeError):
    """While block encountered where static semantics were requested."""


class InvalidSizeError(HypaqError):
    """Generator argument outside its supported range."""


class DuplicateLabelError(HypaqError):
    """Vertex label already present in the hypergraph."""


class EmptyPinsError(HypaqError):
    """Hyperedge with no pins."""


class UnknownVertexError(HypaqError):
    """Hyperedge pin referring to an undeclared vertex."""


class ModeViolationError(HypaqError):
    """Edge or vertex kind not permitted by the hypergraph mode."""


class UnassignedVertexError(HypaqError):
    """Partition metric requested with an incomplete assignment."""


class TooFewQubitsError(HypaqError):
    """Fewer qubit vertices than requested blocks."""


class UnsupportedKError(HypaqError):
    """Heuristic restricted to a block count it does not support."""


class ConfigError(HypaqError):
    """Malformed weight-model or CLI configuration."""


class UnmeasuredConditionWarning(UserWarning):
    """A condition reads a classical bit with no guaranteed earlier write."""
