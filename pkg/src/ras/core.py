"""Atom structures, Peircean cycles, axiom checks, automorphisms and canonical forms.

Two signatures are supported:

* :class:`AtomStructure` -- ``{f, T, I}``: an involution ``f``, a nonempty set
  ``I`` of identity atoms and a ternary relation ``T``.
* :class:`EStructure` -- ``{f, e, T}`` with ``f`` the identity map and a
  distinguished identity atom ``e``.

``T`` is an ``n**3``-slot vector (one 0/1 byte per slot) indexed by
``a*n*n + b*n + c``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Iterator, Mapping, Sequence, Union

import numpy as np

from .config import GUARDS, check_guard

Triple = tuple[int, int, int]


def _pack(n: int, triples: Iterable[Sequence[int]]) -> bytes:
    buf = bytearray(n**3)
    for a, b, c in triples:
        if not (0 <= a < n and 0 <= b < n and 0 <= c < n):
            raise ValueError(f"triple {(a, b, c)} out of range for n={n}")
        buf[(a * n + b) * n + c] = 1
    return bytes(buf)


def _check_T(n: int, T: bytes) -> None:
    if len(T) != n**3:
        raise ValueError(f"T must have {n**3} slots, got {len(T)}")
    if any(x > 1 for x in set(T)):
        raise ValueError("T slots must be 0 or 1")


class _TripleStore:
    n: int
    T: bytes

    def has(self, a: int, b: int, c: int) -> bool:
        n = self.n
        return self.T[(a * n + b) * n + c] == 1

    def triples(self) -> list[Triple]:
        """Triples of T in ascending index order."""
        n = self.n
        out = []
        for idx, bit in enumerate(self.T):
            if bit:
                a, rem = divmod(idx, n * n)
                b, c = divmod(rem, n)
                out.append((a, b, c))
        return out

    def array(self) -> np.ndarray:
        return np.frombuffer(self.T, dtype=np.uint8).reshape(self.n, self.n, self.n)


@dataclass(frozen=True)
class AtomStructure(_TripleStore):
    n: int
    f: tuple[int, ...]
    I: frozenset[int]
    T: bytes = field(repr=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "f", tuple(int(x) for x in self.f))
        object.__setattr__(self, "I", frozenset(int(x) for x in self.I))
        object.__setattr__(self, "T", bytes(self.T))
        n = self.n
        if n < 1:
            raise ValueError("n must be positive")
        if len(self.f) != n or any(not 0 <= x < n for x in self.f):
            raise ValueError("f must map range(n) into range(n)")
        if any(self.f[self.f[a]] != a for a in range(n)):
            raise ValueError("f is not an involution")
        if not self.I or any(not 0 <= i < n for i in self.I):
            raise ValueError("I must be a nonempty set of atoms")
        _check_T(n, self.T)

    @classmethod
    def from_triples(cls, n: int, f: Sequence[int], I: Iterable[int],
                     triples: Iterable[Sequence[int]]) -> "AtomStructure":
        return cls(n, tuple(f), frozenset(I), _pack(n, triples))

    @property
    def symmetric(self) -> bool:
        return all(self.f[a] == a for a in range(self.n))

    @property
    def integral(self) -> bool:
        return len(self.I) == 1


@dataclass(frozen=True)
class EStructure(_TripleStore):
    n: int
    e: int
    T: bytes = field(repr=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "T", bytes(self.T))
        if self.n < 1:
            raise ValueError("n must be positive")
        if not 0 <= self.e < self.n:
            raise ValueError("e out of range")
        _check_T(self.n, self.T)

    @classmethod
    def from_triples(cls, n: int, e: int, triples: Iterable[Sequence[int]]) -> "EStructure":
        return cls(n, e, _pack(n, triples))

    @property
    def f(self) -> tuple[int, ...]:
        return tuple(range(self.n))

    @property
    def I(self) -> frozenset[int]:
        return frozenset((self.e,))


Structure = Union[AtomStructure, EStructure]


# -- cycles ------------------------------------------------------------------

def peircean_transforms(t: Triple, f: Sequence[int]) -> tuple[Triple, ...]:
    a, b, c = t
    return (
        (a, b, c),
        (f[a], c, b),
        (b, f[c], f[a]),
        (f[b], f[a], f[c]),
        (f[c], a, f[b]),
        (c, f[b], a),
    )


@dataclass(frozen=True)
class Cycle:
    members: frozenset[Triple]
    representative: Triple
    kind: str  # "identity" | "diversity"

    @property
    def size(self) -> int:
        return len(self.members)


def cycle_of(t: Sequence[int], f: Sequence[int], identity: Iterable[int] = ()) -> Cycle:
    """The cycle ``[a,b,c]``: the orbit of ``t`` under the six Peircean transforms."""
    n = len(f)
    t = tuple(int(x) for x in t)
    if len(t) != 3 or any(not 0 <= x < n for x in t):
        raise ValueError(f"triple {t} out of range for n={n}")
    members = frozenset(peircean_transforms(t, f))
    ids = set(identity)
    kind = "identity" if any(x in ids for m in members for x in m) else "diversity"
    return Cycle(members, min(members), kind)


def _identity_set(identity: Union[int, Iterable[int]]) -> frozenset[int]:
    if isinstance(identity, (int, np.integer)):
        return frozenset((int(identity),))
    return frozenset(int(x) for x in identity)


@dataclass(frozen=True)
class CycleTable:
    n: int
    f: tuple[int, ...]
    I: frozenset[int]
    cycles: tuple[Cycle, ...]
    triple_to_cycle: np.ndarray = field(repr=False, compare=False)
    slots: tuple = field(repr=False, compare=False, default=())

    @property
    def diversity(self) -> tuple[int, ...]:
        return tuple(k for k, cy in enumerate(self.cycles) if cy.kind == "diversity")

    @property
    def identity_cycles(self) -> tuple[int, ...]:
        return tuple(k for k, cy in enumerate(self.cycles) if cy.kind == "identity")

    @property
    def counts_by_size(self) -> dict[int, int]:
        """Census of diversity cycles keyed by size (1, 2, 3, 6)."""
        out = {1: 0, 2: 0, 3: 0, 6: 0}
        for k in self.diversity:
            out[self.cycles[k].size] += 1
        return out

    def index_of(self, t: Sequence[int]) -> int:
        a, b, c = t
        return int(self.triple_to_cycle[(a * self.n + b) * self.n + c])

    def slot_lists(self) -> tuple:
        """For each cycle, the T slots it occupies."""
        return self.slots


@lru_cache(maxsize=256)
def _cycle_table(n: int, f: tuple[int, ...], I: frozenset[int]) -> CycleTable:
    if len(f) != n or any(f[f[a]] != a for a in range(n)):
        raise ValueError("f must be an involution of range(n)")
    if any(not 0 <= i < n for i in I):
        raise ValueError("identity atoms out of range")
    owner = np.full(n**3, -1, dtype=np.int64)
    cycles = []
    nn = n * n
    for a in range(n):
        for b in range(n):
            for c in range(n):
                idx = a * nn + b * n + c
                if owner[idx] >= 0:
                    continue
                members = frozenset(peircean_transforms((a, b, c), f))
                kind = "identity" if any(x in I for m in members for x in m) else "diversity"
                k = len(cycles)
                cycles.append(Cycle(members, min(members), kind))
                for x, y, z in members:
                    owner[x * nn + y * n + z] = k
    owner.setflags(write=False)
    slots = tuple(np.array(sorted((x * nn + y * n + z) for x, y, z in cy.members), dtype=np.int64)
                  for cy in cycles)
    return CycleTable(n, f, I, tuple(cycles), owner, slots)


def cycle_table(n: int, f: Sequence[int] | None = None,
                identity: Union[int, Iterable[int]] = 0) -> CycleTable:
    """Partition all ``n**3`` triples into Peircean cycles.

    ``f`` defaults to the identity map; ``identity`` is either the index of
    ``e`` or the set ``I``.
    """
    f = tuple(range(n)) if f is None else tuple(int(x) for x in f)
    return _cycle_table(n, f, _identity_set(identity))


# -- axioms ------------------------------------------------------------------

@dataclass(frozen=True)
class AxiomReport:
    satisfies_P: bool
    satisfies_I: bool
    symmetric: bool
    integral: bool
    witnesses: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.satisfies_P and self.satisfies_I


def check_axioms(A: Structure) -> AxiomReport:
    """Check (P) and (I) (equivalently (IP), (II) for e-forms), symmetry and integrality.

    For an :class:`EStructure` the implicit ``f`` is the identity, so the
    symmetric and integral flags are always true.
    """
    n, f, I = A.n, A.f, A.I
    witnesses: dict = {}
    P = True
    for a, b, c in A.triples():
        for t in ((f[a], c, b), (c, f[b], a)):
            if not A.has(*t):
                P = False
                witnesses["P"] = (a, b, c)
                break
        if not P:
            break
    I_ok = True
    for a in range(n):
        for b in range(n):
            hit = any(A.has(a, i, b) for i in I)
            if hit != (a == b):
                I_ok = False
                witnesses["I"] = (a, b)
                break
        if not I_ok:
            break
    symmetric = all(f[a] == a for a in range(n))
    if not symmetric:
        witnesses["symmetric"] = next(a for a in range(n) if f[a] != a)
    integral = len(I) == 1
    if not integral:
        witnesses["integral"] = tuple(sorted(I))
    return AxiomReport(P, I_ok, symmetric, integral, witnesses)


def closed_under_transforms(A: Structure) -> bool:
    """T is a union of cycles: every cycle is consistent or forbidden."""
    table = cycle_table(A.n, A.f, A.I)
    arr = np.frombuffer(A.T, dtype=np.uint8)
    for slots in table.slot_lists():
        v = arr[slots]
        if v.min() != v.max():
            return False
    return True


# -- building structures from cycles -----------------------------------------

def structure_from_cycles(table: CycleTable, chosen: Iterable[int],
                          identity: Union[int, Iterable[int], None] = None,
                          identity_choice: Mapping[int, Iterable[int]] | None = None) -> Structure:
    """Make the structure whose consistent diversity cycles are ``chosen``.

    With an integer ``identity`` (e-form) the identity part is forced: every
    ``[a,e,a]`` is consistent and no other identity cycle is.  With a set
    ``identity`` an :class:`AtomStructure` is returned; ``identity_choice``
    maps each diversity atom ``a`` to the nonempty set of identity atoms ``j``
    for which ``[a,j,a]`` is consistent (forced when ``|I| = 1``).  Identity
    atoms always get ``[j,j,j]``.
    """
    if identity is None:
        identity = next(iter(table.I)) if len(table.I) == 1 and table.f == tuple(range(table.n)) else table.I
    I = _identity_set(identity)
    if I != table.I:
        raise ValueError("identity data does not match the cycle table")
    n, f = table.n, table.f
    buf = np.zeros(n**3, dtype=np.uint8)
    slots = table.slot_lists()
    for k in chosen:
        if table.cycles[k].kind != "diversity":
            raise ValueError(f"cycle {k} is an identity cycle")
        buf[slots[k]] = 1
    diversity_atoms = [a for a in range(n) if a not in I]
    if isinstance(identity, (int, np.integer)):
        if f != tuple(range(n)):
            raise ValueError("e-form structures need f = id")
        e = int(identity)
        for a in range(n):
            buf[slots[table.index_of((a, e, a))]] = 1
        return EStructure(n, e, buf.tobytes())
    if identity_choice is None:
        if len(I) != 1:
            raise ValueError("identity_choice is required when |I| > 1")
        (j,) = I
        identity_choice = {a: (j,) for a in diversity_atoms}
    for j in I:
        buf[slots[table.index_of((j, j, j))]] = 1
    for a in diversity_atoms:
        js = tuple(identity_choice.get(a, ()))
        if not js or any(j not in I for j in js):
            raise ValueError(f"atom {a} needs a nonempty selection of identity atoms")
        for j in js:
            buf[slots[table.index_of((a, j, a))]] = 1
    return AtomStructure(n, f, I, buf.tobytes())


def convert_to_e_form(A: AtomStructure) -> EStructure:
    if not A.symmetric:
        raise ValueError("structure is not symmetric")
    if not A.integral:
        raise ValueError(f"structure is not integral (|I| = {len(A.I)})")
    rep = check_axioms(A)
    if not rep.ok:
        raise ValueError(f"structure violates the axioms: {rep.witnesses}")
    (e,) = A.I
    return EStructure(A.n, e, A.T)


def convert_from_e_form(E: EStructure) -> AtomStructure:
    rep = check_axioms(E)
    if not rep.ok:
        raise ValueError(f"e-form violates (IP)/(II): {rep.witnesses}")
    return AtomStructure(E.n, tuple(range(E.n)), frozenset((E.e,)), E.T)


# -- morphisms ---------------------------------------------------------------

def _signature(n: int, f: Sequence[int], I: frozenset[int], arr: np.ndarray | None) -> list[tuple]:
    out = []
    for a in range(n):
        key: tuple = (a in I, f[a] == a)
        if arr is not None:
            key += (int(arr[a, a, a]), int(arr[a].sum()), int(arr[:, a].sum()), int(arr[:, :, a].sum()))
        out.append(key)
    return out


def _bijections(src_n, src_f, src_I, src_T, dst_f, dst_I, dst_T) -> Iterator[tuple[int, ...]]:
    """All bijections range(n) -> range(n) preserving f, I and (if given) T."""
    n = src_n
    sa = None if src_T is None else np.frombuffer(src_T, dtype=np.uint8).reshape(n, n, n)
    da = None if dst_T is None else np.frombuffer(dst_T, dtype=np.uint8).reshape(n, n, n)
    ssig = _signature(n, src_f, src_I, sa)
    dsig = _signature(n, dst_f, dst_I, da)
    if sorted(ssig) != sorted(dsig):
        return
    cands = [[b for b in range(n) if dsig[b] == ssig[a]] for a in range(n)]
    pi = [-1] * n
    used = [False] * n

    def consistent(k: int) -> bool:
        p = pi[k]
        fk = src_f[k]
        if fk <= k and pi[fk] != dst_f[p]:
            return False
        if sa is None:
            return True
        for x in range(k + 1):
            px = pi[x]
            for y in range(k + 1):
                if x != k and y != k:
                    if sa[x, y, k] != da[px, pi[y], p]:
                        return False
                else:
                    py = pi[y]
                    for z in range(k + 1):
                        if sa[x, y, z] != da[px, py, pi[z]]:
                            return False
        return True

    def rec(k: int) -> Iterator[tuple[int, ...]]:
        if k == n:
            yield tuple(pi)
            return
        for b in cands[k]:
            if used[b]:
                continue
            pi[k] = b
            used[b] = True
            if consistent(k):
                yield from rec(k + 1)
            used[b] = False
            pi[k] = -1

    yield from rec(0)


def automorphisms(A: Structure, bound: int | None = None, unsafe: bool = False) -> list[tuple[int, ...]]:
    """All automorphisms of ``A`` as permutation tuples (``pi[a]`` is the image of ``a``)."""
    check_guard(A.n, GUARDS.automorphisms_n if bound is None else bound, "automorphisms n", unsafe)
    return list(_bijections(A.n, A.f, A.I, A.T, A.f, A.I, A.T))


def frame_automorphisms(n: int, f: Sequence[int] | None = None,
                        identity: Union[int, Iterable[int]] = 0,
                        bound: int | None = None, unsafe: bool = False) -> list[tuple[int, ...]]:
    """Automorphisms of the reduct ``<U; f, I>`` (no ternary relation)."""
    check_guard(n, GUARDS.automorphisms_n if bound is None else bound, "automorphisms n", unsafe)
    f = tuple(range(n)) if f is None else tuple(f)
    I = _identity_set(identity)
    return list(_bijections(n, f, I, None, f, I, None))


def is_rigid(A: Structure, **kw) -> bool:
    return len(automorphisms(A, **kw)) == 1


def find_isomorphism(A: Structure, B: Structure) -> tuple[int, ...] | None:
    """Some isomorphism ``A -> B`` found by backtracking, or ``None``."""
    if type(A) is not type(B) or A.n != B.n:
        return None
    return next(_bijections(A.n, A.f, A.I, A.T, B.f, B.I, B.T), None)


def permute(A: Structure, pi: Sequence[int]) -> Structure:
    """The image ``pi . A``: atom ``a`` is renamed ``pi[a]``."""
    n = A.n
    inv = [0] * n
    for a, p in enumerate(pi):
        inv[p] = a
    inv_arr = np.array(inv)
    T = A.array()[np.ix_(inv_arr, inv_arr, inv_arr)]
    if isinstance(A, EStructure):
        return EStructure(n, pi[A.e], np.ascontiguousarray(T).tobytes())
    f = tuple(pi[A.f[inv[p]]] for p in range(n))
    return AtomStructure(n, f, frozenset(pi[i] for i in A.I), np.ascontiguousarray(T).tobytes())


def canonicalize(A: Structure, bound: int | None = None, unsafe: bool = False) -> bytes:
    """Lexicographically least encoding of ``pi . A`` over permutations putting identity atoms first.

    Equal encodings hold exactly for isomorphic structures.
    """
    n = A.n
    check_guard(n, GUARDS.canonicalize_n if bound is None else bound, "canonicalize n", unsafe)
    arr = A.array()
    ids = sorted(A.I)
    div = [a for a in range(n) if a not in A.I]
    f = A.f
    tag = b"E" if isinstance(A, EStructure) else b"A"
    best = None
    for p_ids in itertools.permutations(ids):
        for p_div in itertools.permutations(div):
            order = np.array(p_ids + p_div)  # new position -> old atom
            pos = np.empty(n, dtype=np.int64)
            pos[order] = np.arange(n)
            T = arr[np.ix_(order, order, order)]
            head = bytes([n, len(ids)])
            if tag == b"A":
                head += bytes(int(pos[f[o]]) for o in order)
            enc = tag + head + np.ascontiguousarray(T).tobytes()
            if best is None or enc < best:
                best = enc
    return best


# -- JSON --------------------------------------------------------------------

def to_json(A: Structure) -> dict:
    if isinstance(A, EStructure):
        return {"n": A.n, "e": A.e, "T": [list(t) for t in A.triples()]}
    return {"n": A.n, "f": list(A.f), "I": sorted(A.I), "T": [list(t) for t in A.triples()]}


def from_json(d: Mapping) -> Structure:
    if "e" in d:
        return EStructure.from_triples(int(d["n"]), int(d["e"]), d["T"])
    return AtomStructure.from_triples(int(d["n"]), d["f"], d["I"], d["T"])
