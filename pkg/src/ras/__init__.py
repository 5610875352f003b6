"""Finite atom structures of nonassociative relation algebras: cycles, counts,
sampling, first-order sentences and amalgamation."""

__version__ = "0.1.0"

from .config import GUARDS, GuardError, Guards
from .core import AtomStructure, EStructure, canonicalize, check_axioms, cycle_table
from .enumeration import count_unlabelled, enumerate_fas, enumerate_fsiase, labelled_count
from .probability import estimate

__all__ = [
    "GUARDS", "GuardError", "Guards", "AtomStructure", "EStructure", "canonicalize",
    "check_axioms", "cycle_table", "count_unlabelled", "enumerate_fas", "enumerate_fsiase",
    "labelled_count", "estimate", "__version__",
]
