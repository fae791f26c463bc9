"""Certified blockades and restricted induced subgraphs in house-free graphs."""

from .certificates import Certificate, Verdict, verify_certificate
from .errors import (
    BlockadeError,
    CertificateStructureError,
    DegenerateInput,
    FinderContractBreach,
    GraphFormatError,
    InternalInvariantViolated,
    PreconditionViolated,
    RejectionBudgetExhausted,
    SamplingBudgetExhausted,
    ScaleShortfall,
)
from .graph import Graph, complement
from .graphio import read_graph, write_graph
from .patterns import HOUSE, P4, P5, find_induced_copy
from .profile import get_profile
from .round2 import eh_extract, polynomial_rodl

__all__ = [
    "BlockadeError", "Certificate", "CertificateStructureError", "DegenerateInput",
    "FinderContractBreach", "Graph", "GraphFormatError", "HOUSE", "InternalInvariantViolated",
    "P4", "P5", "PreconditionViolated", "RejectionBudgetExhausted", "SamplingBudgetExhausted",
    "ScaleShortfall", "Verdict", "complement", "eh_extract", "find_induced_copy", "get_profile",
    "polynomial_rodl", "read_graph", "verify_certificate", "write_graph",
]
