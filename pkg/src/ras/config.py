"""Size guards shared by the exhaustive searches.

Guards are configuration, not hard limits: every search that would exceed
one raises :class:`GuardError` unless the caller passes ``unsafe=True``.
"""

from __future__ import annotations

import os
from dataclasses import dataclass


class GuardError(ValueError):
    """A configured size guard was exceeded."""


@dataclass(frozen=True)
class Guards:
    canonicalize_n: int = 7
    automorphisms_n: int = 8
    na_axioms_n: int = 8
    enumerate_fsiase_n: int = 5
    enumerate_fas_n: int = 4
    fas_formula_n: int = 4  # largest n at which the FAS formula was checked by enumeration
    homogeneity_n: int = 4
    eval_log2_work: int = 32  # depth * log2(n) bound for naive FO evaluation
    generic_atoms: int = 400


GUARDS = Guards()


def check_guard(value: int, limit: int, what: str, unsafe: bool = False) -> None:
    if value > limit and not unsafe:
        raise GuardError(f"{what}: {value} exceeds guard {limit} (pass unsafe=True to override)")


def default_threads() -> int:
    try:
        return max(1, int(os.environ.get("RAS_THREADS", "1")))
    except ValueError:
        return 1
