"""Independent brute-force oracles used to validate the fast paths.

Nothing here calls the closed-form formulas or the structured enumerators.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

from .core import AtomStructure, check_axioms, cycle_table, frame_automorphisms, peircean_transforms


def all_involutions(n: int) -> list[tuple[int, ...]]:
    return [p for p in itertools.permutations(range(n)) if all(p[p[a]] == a for a in range(n))]


def nonempty_subsets(n: int) -> list[frozenset[int]]:
    return [frozenset(c) for k in range(1, n + 1) for c in itertools.combinations(range(n), k)]


def brute_census(n: int, f) -> dict:
    """Diversity-cycle census and frame automorphism count by orbit enumeration (e = 0)."""
    seen = set()
    sizes = {1: 0, 2: 0, 3: 0, 6: 0}
    for t in itertools.product(range(n), repeat=3):
        if t in seen:
            continue
        orbit = {t}
        frontier = [t]
        while frontier:
            u = frontier.pop()
            for v in peircean_transforms(u, f):
                if v not in orbit:
                    orbit.add(v)
                    frontier.append(v)
        seen |= orbit
        if not any(0 in u for u in orbit):
            sizes[len(orbit)] += 1
    autos = frame_automorphisms(n, f, 0, unsafe=True)
    return {"c1": sizes[1], "c2": sizes[2], "c3": sizes[3], "c6": sizes[6],
            "Q": sum(sizes.values()), "P": len(autos)}


def tier0_fas(n: int) -> set[AtomStructure]:
    """Every (involution, identity set, relation) triple filtered by (P) and (I)."""
    assert n <= 2, "tier-0 scans all 2^(n^3) relations"
    out = set()
    slots = list(itertools.product(range(n), repeat=3))
    for f in all_involutions(n):
        for I in nonempty_subsets(n):
            for mask in range(1 << len(slots)):
                triples = [t for k, t in enumerate(slots) if mask >> k & 1]
                A = AtomStructure.from_triples(n, f, I, triples)
                if check_axioms(A).ok:
                    out.add(A)
    return out


def _I_holds(n: int, I, T: bytes) -> bool:
    for a in range(n):
        for b in range(n):
            if any(T[(a * n + i) * n + b] for i in I) != (a == b):
                return False
    return True


def tier1_fas(n: int) -> set[AtomStructure]:
    """Unions of cycles for every (involution, identity set), filtered by (I).

    Justified by the exhaustive tier-0 check that (P) holds exactly for unions of cycles.
    """
    out = set()
    for f in all_involutions(n):
        for I in nonempty_subsets(n):
            table = cycle_table(n, f, I)
            slots = table.slot_lists()
            k = len(table.cycles)
            for mask in range(1 << k):
                buf = bytearray(n**3)
                for c in range(k):
                    if mask >> c & 1:
                        for s in slots[c]:
                            buf[s] = 1
                T = bytes(buf)
                if _I_holds(n, I, T):
                    out.add(AtomStructure(n, f, I, T))
    return out


def burnside_fsiase(n: int) -> Fraction:
    """Orbits of the permutations fixing e = 0 acting on labelled e-form structures.

    A permutation fixes a structure iff it maps each consistent diversity cycle to
    a consistent one, so ``|Fix(g)| = 2^(number of g-orbits on diversity cycles)``.
    """
    table = cycle_table(n, None, 0)
    div = table.diversity
    total = 0
    count = 0
    for rest in itertools.permutations(range(1, n)):
        g = (0,) + rest
        seen = set()
        orbits = 0
        for k in div:
            if k in seen:
                continue
            orbits += 1
            cur = k
            while cur not in seen:
                seen.add(cur)
                a, b, c = table.cycles[cur].representative
                cur = table.index_of((g[a], g[b], g[c]))
        total += 2**orbits
        count += 1
    return Fraction(total, count)
