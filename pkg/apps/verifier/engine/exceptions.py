"""
Error hierarchy for the model checking engine.
Input-format problems also subclass ValueError so callers can treat them as bad input.
"""


class EngineError(Exception):
    """Base class for every error raised by the engine package."""


class FormatError(EngineError, ValueError):
    """A text artifact could not be parsed; ``line`` is 1-based (0 when unknown)."""

    def __init__(self, message, line=0):
        self.line = line
        if line:
            message = f"line {line}: {message}"
        super().__init__(message)


class AigerFormatError(FormatError):
    pass


class PairingFormatError(FormatError):
    pass


class WitnessFormatError(FormatError):
    pass


class CertificateFormatError(FormatError):
    pass


class SymmetryMapError(EngineError, ValueError):
    """A SymmetryMap violates involution, classification or group consistency."""


class SelfCompositionError(EngineError, ValueError):
    pass


class BenchmarkError(EngineError, ValueError):
    pass


class DimensionError(EngineError, ValueError):
    """Stimulus or initial assignment does not match the circuit."""


class ExplicitLimitExceeded(EngineError):
    pass


class ResourceLimitReached(EngineError):
    """Time, frame, obligation or conflict budget exhausted during a run."""

    def __init__(self, reason):
        self.reason = reason
        super().__init__(f"resource limit reached: {reason}")


class FrameAuditError(EngineError, AssertionError):
    pass


class SymmetryAuditError(EngineError, AssertionError):
    pass


class SolverCheckError(EngineError, AssertionError):
    """A SAT model or unsat core failed its debug re-check."""


class VerdictDisagreement(EngineError):
    pass
