"""Exception hierarchy shared by every module."""


class BlockadeError(Exception):
    """Base class for all errors raised by this package."""


class PreconditionViolated(BlockadeError):
    """An operation was called on input outside its contract.

    ``witness`` carries whatever object demonstrates the violation (an
    oversized anticomponent, a vertex with too few neighbours, an induced
    copy of a forbidden pattern, ...).
    """

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class DegenerateInput(PreconditionViolated):
    """The input is too small for the operation to say anything."""


class InternalInvariantViolated(BlockadeError):
    """A combinatorial fact that must hold on in-class input failed.

    On valid input this always indicates a bug in the implementation.
    """

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class SamplingBudgetExhausted(BlockadeError):
    """Seeded random sampling ran out of retries."""


class RejectionBudgetExhausted(BlockadeError):
    """A rejection-sampling generator gave up."""


class FinderContractBreach(BlockadeError):
    """A blockade finder handed back something that does not meet its contract."""

    def __init__(self, message, provenance=None):
        super().__init__(message)
        self.provenance = provenance


class CertificateStructureError(BlockadeError):
    """A certificate is malformed (bad schema, out-of-range vertex, hash mismatch)."""


class GraphFormatError(BlockadeError):
    """A graph file could not be parsed."""


class ScaleShortfall(BlockadeError):
    """An inequality the construction relies on fails at this graph size.

    The asymptotic arguments need graphs far larger than desk scale; callers
    catch this and fall back to whatever they have already certified.
    """
