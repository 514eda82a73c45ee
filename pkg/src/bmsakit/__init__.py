"""Exact and heuristic nonstabilizerness measures for pure qubit states."""

__version__ = "0.1.0"

from .bmsa import StabBasisKey, bmsa_branch_bound, bmsa_bruteforce  # noqa: E402
from .measures import sre  # noqa: E402

__all__ = ["StabBasisKey", "bmsa_branch_bound", "bmsa_bruteforce", "sre", "__version__"]
