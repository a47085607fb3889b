"""Feasibility of inequality systems over the open positive orthant."""

from .bnb import InvalidBoxError, bnb_region, ladder_box
from .certificate import find_certificate, search_certificate, verify_certificate
from .decide import STRATEGIES, decide
from .types import (
    FEASIBLE,
    INFEASIBLE,
    UNKNOWN,
    BnBResult,
    BnBTrace,
    OrthantCertificate,
    SearchConfig,
    Verdict,
)
from .witness import search_witness, verify_witness

__all__ = [
    "FEASIBLE",
    "INFEASIBLE",
    "UNKNOWN",
    "STRATEGIES",
    "BnBResult",
    "BnBTrace",
    "InvalidBoxError",
    "OrthantCertificate",
    "SearchConfig",
    "Verdict",
    "bnb_region",
    "decide",
    "find_certificate",
    "ladder_box",
    "search_certificate",
    "search_witness",
    "verify_certificate",
    "verify_witness",
]
