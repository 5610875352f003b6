"""Exhaustive enumeration, exact counting formulas and asymptotic-ratio reports."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial
from typing import Callable, Iterator, Sequence

import numpy as np

from .algebra import is_associative
from .config import GUARDS, GuardError, check_guard
from .core import (AtomStructure, EStructure, Structure, canonicalize, cycle_table,
                   is_rigid)

CLASSES = ("FAS", "FSIAS", "FSIASe")


# -- closed forms ------------------------------------------------------------

def Q(n: int, s: int) -> int:
    """Number of diversity cycles of a frame with ``n`` atoms, ``s`` of them fixed by ``f``."""
    num = (n - 1) * ((n - 1) ** 2 + 3 * s - 1)
    assert num % 6 == 0
    return num // 6


def S(m: int) -> int:
    return Q(m, m)


def P(n: int, s: int) -> int:
    """Number of automorphisms of ``<U; f, {e}>``."""
    half = (n - s) // 2
    return factorial(s - 1) * factorial(half) * 2**half


def involution_count(m: int, p: int) -> int:
    """Involutions of an ``m``-set with exactly ``p`` transpositions."""
    return factorial(m) // (2**p * factorial(p) * factorial(m - 2 * p))


@dataclass(frozen=True)
class CycleCensus:
    n: int
    s: int
    c1: int
    c2: int
    c3: int
    c6: int
    Q: int
    P: int
    S: int | None

    def row(self) -> dict:
        return {"n": self.n, "s": self.s, "c1": self.c1, "c2": self.c2, "c3": self.c3,
                "c6": self.c6, "Q": self.Q, "P": self.P}


def _valid_ns(n: int, s: int) -> None:
    if not (1 <= s <= n) or (n - s) % 2:
        raise ValueError(f"need 1 <= s <= n and n - s even, got n={n}, s={s}")


def cycle_census(n: int, s: int) -> CycleCensus:
    _valid_ns(n, s)
    c6 = Fraction((n - 1) * ((n - 1) ** 2 - 3 * s + 2), 6) + Fraction(s - 1, 2)
    assert c6.denominator == 1
    return CycleCensus(n, s, s - 1, (n - s) // 2, (s - 1) * (n - 2), int(c6),
                       Q(n, s), P(n, s), S(n) if s == n else None)


def frame(n: int, s: int) -> tuple[int, ...]:
    """Standard involution with fixed points ``0..s-1`` and pairs ``(s, s+1), ...``."""
    _valid_ns(n, s)
    f = list(range(n))
    for a in range(s, n, 2):
        f[a], f[a + 1] = a + 1, a
    return tuple(f)


def fas_count_formula(n: int) -> int:
    """Exact number of labelled members of FAS on ``{0..n-1}``.

    Sums over the number ``i`` of identity atoms and the number ``p`` of
    transposed diversity pairs: each diversity atom picks a nonempty set of
    identity atoms ``j`` with ``[a,j,a]`` consistent, and the diversity cycles
    are free.
    """
    total = 0
    for i in range(1, n + 1):
        m = n - i
        for p in range(m // 2 + 1):
            total += (comb(n, i) * involution_count(m, p) * (2**i - 1) ** m
                      * 2 ** Q(m + 1, m + 1 - 2 * p))
    return total


def fas_weights(n: int) -> list[tuple[int, int, int]]:
    """``(i, p, weight)`` terms of :func:`fas_count_formula`."""
    out = []
    for i in range(1, n + 1):
        m = n - i
        for p in range(m // 2 + 1):
            out.append((i, p, comb(n, i) * involution_count(m, p) * (2**i - 1) ** m
                        * 2 ** Q(m + 1, m + 1 - 2 * p)))
    return out


# -- enumeration -------------------------------------------------------------

def _cycle_matrix(table, cycles: Sequence[int]) -> np.ndarray:
    n3 = table.n**3
    M = np.zeros((len(cycles), n3), dtype=np.uint8)
    slots = table.slot_lists()
    for r, k in enumerate(cycles):
        M[r, slots[k]] = 1
    return M


def _subsets(base: np.ndarray, M: np.ndarray) -> Iterator[bytes]:
    k = M.shape[0]
    shifts = np.arange(k, dtype=np.int64)
    for mask in range(1 << k):
        bits = ((mask >> shifts) & 1).astype(np.uint8)
        yield (base | (bits @ M).astype(np.uint8)).tobytes() if k else base.tobytes()


def enumerate_fsiase(n: int, e: int = 0, unsafe: bool = False) -> Iterator[EStructure]:
    """All ``2^Q(n,n)`` labelled e-form structures on ``{0..n-1}`` with the given ``e``.

    Bit ``j`` of the subset counter selects the ``j``-th diversity cycle.
    """
    check_guard(n, GUARDS.enumerate_fsiase_n, "enumerate_fsiase n", unsafe)
    table = cycle_table(n, None, e)
    base = np.zeros(n**3, dtype=np.uint8)
    slots = table.slot_lists()
    for a in range(n):
        base[slots[table.index_of((a, e, a))]] = 1
    M = _cycle_matrix(table, table.diversity)
    for T in _subsets(base, M):
        yield EStructure(n, e, T)


def involutions(atoms: Sequence[int]) -> list[tuple[tuple[int, int], ...]]:
    """All involutions of ``atoms`` as sorted tuples of transposed pairs."""
    atoms = sorted(atoms)

    def rec(rest):
        if not rest:
            yield ()
            return
        a, tail = rest[0], rest[1:]
        yield from rec(tail)
        for k, b in enumerate(tail):
            for more in rec(tail[:k] + tail[k + 1:]):
                yield ((a, b),) + more

    return sorted(tuple(sorted(x)) for x in rec(atoms))


def enumerate_fas(n: int, unsafe: bool = False) -> Iterator[AtomStructure]:
    """All labelled FAS members on ``{0..n-1}``.

    Order: identity set ``I`` (lexicographic), involution of the diversity
    atoms, per-atom identity selections, then diversity-cycle subsets.
    Identity atoms are fixed by ``f`` and carry only ``[j,j,j]``.
    """
    check_guard(n, GUARDS.enumerate_fas_n, "enumerate_fas n", unsafe)
    id_sets = sorted(c for i in range(1, n + 1) for c in itertools.combinations(range(n), i))
    for I in id_sets:
        D = [a for a in range(n) if a not in I]
        nonempty = [tuple(j for k, j in enumerate(I) if mask >> k & 1)
                    for mask in range(1, 1 << len(I))]
        for pairs in involutions(D):
            f = list(range(n))
            for a, b in pairs:
                f[a], f[b] = b, a
            table = cycle_table(n, f, I)
            slots = table.slot_lists()
            base0 = np.zeros(n**3, dtype=np.uint8)
            for j in I:
                base0[slots[table.index_of((j, j, j))]] = 1
            M = _cycle_matrix(table, table.diversity)
            for sel in itertools.product(nonempty, repeat=len(D)):
                base = base0.copy()
                for a, js in zip(D, sel):
                    for j in js:
                        base[slots[table.index_of((a, j, a))]] = 1
                for T in _subsets(base, M):
                    yield AtomStructure(n, tuple(f), frozenset(I), T)


def enumerate_class(n: int, cls: str, unsafe: bool = False) -> Iterator[Structure]:
    if cls == "FSIASe":
        return enumerate_fsiase(n, unsafe=unsafe)
    if cls == "FAS":
        return enumerate_fas(n, unsafe=unsafe)
    if cls == "FSIAS":
        return _enumerate_fsias(n, unsafe)
    raise ValueError(f"unknown class {cls!r}; expected one of {CLASSES}")


def _enumerate_fsias(n: int, unsafe: bool) -> Iterator[AtomStructure]:
    for e in range(n):
        for E in enumerate_fsiase(n, e, unsafe=unsafe):
            yield AtomStructure(n, tuple(range(n)), frozenset((e,)), E.T)


# -- counting ----------------------------------------------------------------

def _symmetric_integral(A: Structure) -> bool:
    return isinstance(A, EStructure) or (A.symmetric and A.integral)


PREDICATES: dict[str, Callable[[Structure], bool]] = {
    "all": lambda A: True,
    "symmetric-integral": _symmetric_integral,
    "associative": is_associative,
    "rigid": is_rigid,
}


def predicate(name: str) -> Callable[[Structure], bool]:
    try:
        return PREDICATES[name]
    except KeyError:
        raise ValueError(f"unknown predicate {name!r}; expected one of {sorted(PREDICATES)}") from None


@dataclass(frozen=True)
class CountReport:
    n: int
    cls: str
    predicate: str
    labelled: int
    unlabelled: int | None
    method: str  # enumerated | formula | oracle

    def to_json(self) -> dict:
        return {"n": self.n, "class": self.cls, "predicate": self.predicate,
                "labelled": self.labelled, "unlabelled": self.unlabelled, "method": self.method}


def labelled_count(n: int, cls: str = "FAS", method: str = "formula", unsafe: bool = False) -> CountReport:
    if cls not in CLASSES:
        raise ValueError(f"unknown class {cls!r}")
    if method == "enumerated":
        count = sum(1 for _ in enumerate_class(n, cls, unsafe=unsafe))
    elif method == "formula":
        if cls == "FSIASe":
            count = 2 ** S(n)
        elif cls == "FSIAS":
            count = n * 2 ** S(n)
        else:
            if n > GUARDS.fas_formula_n and not unsafe:
                raise GuardError(f"FAS formula only validated for n <= {GUARDS.fas_formula_n}; "
                                 "pass unsafe=True to use it beyond")
            count = fas_count_formula(n)
    else:
        raise ValueError(f"unknown method {method!r}")
    return CountReport(n, cls, "all", count, None, method)


def count_unlabelled(n: int, predicate_name: str = "all", cls: str = "FSIASe",
                     unsafe: bool = False) -> CountReport:
    """Number of isomorphism classes (by canonical form) satisfying the predicate."""
    check_guard(n, GUARDS.canonicalize_n, "canonicalize n", unsafe)
    pred = predicate(predicate_name)
    forms = set()
    labelled = 0
    for A in enumerate_class(n, cls, unsafe=unsafe):
        if pred(A):
            labelled += 1
            forms.add(canonicalize(A, unsafe=unsafe))
    return CountReport(n, cls, predicate_name, labelled, len(forms), "enumerated")


def unlabelled_representatives(n: int, cls: str = "FSIASe", unsafe: bool = False) -> dict[bytes, Structure]:
    """First labelled structure seen for each canonical form."""
    reps: dict[bytes, Structure] = {}
    for A in enumerate_class(n, cls, unsafe=unsafe):
        reps.setdefault(canonicalize(A, unsafe=unsafe), A)
    return reps


@dataclass(frozen=True)
class AsymptoticReport:
    n: int
    s: int
    count: int
    ratio: Fraction          # count * P(n,s) / 2^Q(n,s)
    formula: Fraction        # 2^Q(n,n) / (n-1)!

    def to_json(self) -> dict:
        return {"n": self.n, "s": self.s, "count": self.count,
                "ratio": str(self.ratio), "ratio_decimal": float(self.ratio),
                "formula": str(self.formula), "formula_decimal": float(self.formula)}


def asymptotic_report(n: int, s: int, exact_count: int) -> AsymptoticReport:
    _valid_ns(n, s)
    ratio = Fraction(exact_count * P(n, s), 2 ** Q(n, s))
    return AsymptoticReport(n, s, exact_count, ratio, Fraction(2 ** S(n), factorial(n - 1)))
