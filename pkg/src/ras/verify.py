"""Oracle and formula cross-checks behind ``ras verify``."""

from __future__ import annotations

from typing import Iterator

from .algebra import atom_structure_of, complex_algebra, verify_na_axioms
from .core import AtomStructure, convert_from_e_form
from .enumeration import (Q, cycle_census, enumerate_fas, enumerate_fsiase, fas_count_formula,
                          frame, count_unlabelled)
from .oracles import brute_census, burnside_fsiase, tier0_fas, tier1_fas


def _rec(check: str, n: int, ok: bool, **extra) -> dict:
    return {"check": check, "n": n, "ok": bool(ok), **extra}


def run_checks(max_n: int = 3) -> Iterator[dict]:
    """Yield one record per check for sizes up to ``max_n`` (census checks go to 2*max_n)."""
    for n in range(1, 2 * max_n + 1):
        for s in range(n % 2 or 2, n + 1, 2):
            if s == 0:
                continue
            got = cycle_census(n, s).row()
            ref = brute_census(n, frame(n, s))
            yield _rec("census", n, all(ref[k] == got[k] for k in ref), s=s)

    for n in range(1, max_n + 1):
        fsiase = list(enumerate_fsiase(n))
        yield _rec("fsiase-count", n, len(fsiase) == 2 ** Q(n, n), count=len(fsiase))

        fas = set(enumerate_fas(n, unsafe=True))
        if n <= 2:
            oracle, tier = tier0_fas(n), "tier0"
        elif n <= 3:
            oracle, tier = tier1_fas(n), "tier1"
        else:
            oracle, tier = None, None
        if oracle is not None:
            yield _rec(f"fas-{tier}", n, fas == oracle, count=len(fas))
        yield _rec("fas-formula", n, fas_count_formula(n) == len(fas), count=len(fas))

        unl = count_unlabelled(n, "all", "FSIASe").unlabelled
        yield _rec("burnside", n, burnside_fsiase(n) == unl, count=unl)

        structures: list[AtomStructure] = list(fas) + [convert_from_e_form(E) for E in fsiase]
        bad = 0
        for A in structures:
            C = complex_algebra(A)
            r = verify_na_axioms(C, unsafe=True)
            if not (r.boolean_ok and r.identity_ok and r.triangle_ok) or atom_structure_of(C) != A:
                bad += 1
        yield _rec("complex-algebra", n, bad == 0, structures=len(structures), failures=bad)
