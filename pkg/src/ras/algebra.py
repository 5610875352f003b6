"""Complex algebras of atom structures.

Elements are subsets of the atoms, encoded as ``n``-bit integers.  The
product is computed on demand from the atom product table ``a.b = {c :
(a,b,c) in T}``; full ``2^n x 2^n`` tables are only built transiently inside
the exhaustive checkers.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .config import GUARDS, check_guard
from .core import AtomStructure, EStructure, Structure, check_axioms


@dataclass(frozen=True)
class ComplexAlgebra:
    n: int
    atom_product: tuple[tuple[int, ...], ...] = field(repr=False)
    atom_converse: tuple[int, ...]
    e_element: int

    @property
    def size(self) -> int:
        return 1 << self.n

    @property
    def zero(self) -> int:
        return 0

    @property
    def one(self) -> int:
        return (1 << self.n) - 1

    @property
    def d_element(self) -> int:
        return self.complement(self.e_element)

    def join(self, x: int, y: int) -> int:
        return x | y

    def meet(self, x: int, y: int) -> int:
        return x & y

    def complement(self, x: int) -> int:
        return self.one & ~x

    def converse(self, x: int) -> int:
        out = 0
        for a in _bits(x):
            out |= 1 << self.atom_converse[a]
        return out

    def product(self, x: int, y: int) -> int:
        out = 0
        for a in _bits(x):
            row = self.atom_product[a]
            for b in _bits(y):
                out |= row[b]
        return out

    def elements(self) -> range:
        return range(self.size)

    def converse_table(self) -> np.ndarray:
        return np.array([self.converse(x) for x in self.elements()], dtype=np.int64)

    def product_table(self) -> np.ndarray:
        """Full ``2^n x 2^n`` product table, built row by row from atom rows."""
        N = self.size
        # by_atom[x, b] = x . {b}
        by_atom = np.zeros((N, max(self.n, 1)), dtype=np.int64)
        for x in range(1, N):
            low = x & -x
            a = low.bit_length() - 1
            by_atom[x] = by_atom[x ^ low] | np.array(self.atom_product[a], dtype=np.int64)
        table = np.zeros((N, N), dtype=np.int64)
        for y in range(1, N):
            low = y & -y
            b = low.bit_length() - 1
            table[:, y] = table[:, y ^ low] | by_atom[:, b]
        return table


def _bits(x: int):
    a = 0
    while x:
        if x & 1:
            yield a
        x >>= 1
        a += 1


def _atom_rows(A: Structure) -> tuple[tuple[int, ...], ...]:
    n = A.n
    arr = A.array()
    weights = 1 << np.arange(n, dtype=np.int64)
    prod = (arr.astype(np.int64) * weights).sum(axis=2)
    return tuple(tuple(int(v) for v in row) for row in prod)


def complex_algebra(A: Structure, check: bool = True) -> ComplexAlgebra:
    """The complex algebra over the atoms of ``A``.

    ``X.Y = {c : (a,b,c) in T for some a in X, b in Y}``, converse is ``f``
    applied pointwise and ``e`` is the join of the identity atoms.
    """
    if check:
        rep = check_axioms(A)
        if not rep.ok:
            raise ValueError(f"structure violates the axioms: {rep.witnesses}")
    e = 0
    for i in A.I:
        e |= 1 << i
    return ComplexAlgebra(A.n, _atom_rows(A), tuple(A.f), e)


def atom_structure_of(C: ComplexAlgebra) -> AtomStructure:
    """Recover ``<atoms; converse, atoms below e, {(a,b,c): ab >= c}>``."""
    n = C.n
    f = []
    for a in range(n):
        conv = C.converse(1 << a)
        if conv & (conv - 1) or conv == 0:
            raise ValueError(f"converse of atom {a} is not an atom")
        f.append(conv.bit_length() - 1)
    I = [a for a in range(n) if C.e_element >> a & 1]
    triples = [(a, b, c) for a in range(n) for b in range(n) for c in range(n)
               if C.product(1 << a, 1 << b) >> c & 1]
    return AtomStructure.from_triples(n, f, I, triples)


@dataclass(frozen=True)
class NAReport:
    boolean_ok: bool
    identity_ok: bool
    triangle_ok: bool
    associative: bool
    counterexample: tuple | None = None

    @property
    def is_na(self) -> bool:
        return self.boolean_ok and self.identity_ok and self.triangle_ok

    def to_json(self) -> dict:
        return {"boolean_ok": self.boolean_ok, "identity_ok": self.identity_ok,
                "triangle_ok": self.triangle_ok, "associative": self.associative,
                "counterexample": None if self.counterexample is None else list(self.counterexample)}


def _first(mask: np.ndarray):
    idx = np.flatnonzero(mask.ravel())
    if idx.size == 0:
        return None
    return tuple(int(v) for v in np.unravel_index(idx[0], mask.shape))


def verify_na_axioms(C: ComplexAlgebra, bound: int | None = None, unsafe: bool = False) -> NAReport:
    """Check the Boolean, identity and triangle laws over all elements, plus associativity.

    The counterexample is the first failing element tuple found, in the
    order Boolean, identity, triangle, associativity.
    """
    check_guard(C.n, GUARDS.na_axioms_n if bound is None else bound, "NA axiom check n", unsafe)
    N = C.size
    X = np.arange(N, dtype=np.int64)
    one = C.one
    comp = one & ~X
    conv = C.converse_table()
    P = C.product_table()
    cex = None

    # Boolean reduct: complement laws and de Morgan over all pairs.
    boolean_ok = bool(np.all((X & comp) == 0) and np.all((X | comp) == one))
    dm = (one & ~(X[:, None] | X[None, :])) != (comp[:, None] & comp[None, :])
    if dm.any():
        boolean_ok = False
        cex = cex or ("boolean",) + _first(dm)

    bad_id = (P[:, C.e_element] != X) | (P[C.e_element, :] != X)
    identity_ok = not bad_id.any()
    if not identity_ok and cex is None:
        cex = ("identity", int(np.flatnonzero(bad_id)[0]))

    # xy ^ z = 0  <=>  x~z ^ y = 0  <=>  zy~ ^ x = 0, indexed [x, y, z]
    triangle_ok = True
    for x in range(N):
        c1 = (P[x][:, None] & X[None, :]) == 0
        c2 = (P[conv[x]][None, :] & X[:, None]) == 0
        c3 = (P[:, conv].T & x) == 0
        bad = (c1 != c2) | (c1 != c3)
        if bad.any():
            triangle_ok = False
            if cex is None:
                y, z = _first(bad)
                cex = ("triangle", x, y, z)
            break

    assoc_cex = _element_associativity(P)
    if assoc_cex is not None and cex is None:
        cex = ("associativity",) + assoc_cex
    return NAReport(boolean_ok, identity_ok, triangle_ok, assoc_cex is None, cex)


def _element_associativity(P: np.ndarray):
    """Lexicographically least ``(x, y, z)`` with ``(xy)z != x(yz)``, or ``None``."""
    N = P.shape[0]
    for x in range(N):
        row = P[x]
        left = P[row]          # (xy)z indexed [y, z]
        right = row[P]         # x(yz) indexed [y, z]
        bad = left != right
        if bad.any():
            y, z = _first(bad)
            return (x, y, z)
    return None


def is_associative_elementwise(A: Structure, unsafe: bool = False) -> bool:
    """Associativity of the complex algebra checked over all ``2^n`` elements."""
    check_guard(A.n, GUARDS.na_axioms_n, "element associativity n", unsafe)
    C = complex_algebra(A, check=False)
    return _element_associativity(C.product_table()) is None


def associativity_counterexample(A: Structure):
    """Lexicographically least atom quadruple ``(a,b,c,d)`` with ``(ab)c >= d`` differing from ``a(bc) >= d``."""
    n = A.n
    rows = _atom_rows(A)
    for a in range(n):
        ra = rows[a]
        for b in range(n):
            ab = ra[b]
            rb = rows[b]
            for c in range(n):
                left = 0
                for x in _bits(ab):
                    left |= rows[x][c]
                right = 0
                for y in _bits(rb[c]):
                    right |= ra[y]
                if left != right:
                    diff = left ^ right
                    return (a, b, c, (diff & -diff).bit_length() - 1)
    return None


def is_associative(A: Structure) -> bool:
    """Atom-level associativity: for all atoms a, b, c, d,
    ``(exists x: (a,b,x), (x,c,d) in T)`` iff ``(exists y: (b,c,y), (a,y,d) in T)``."""
    return associativity_counterexample(A) is None


def is_product_integral(C: ComplexAlgebra) -> bool:
    """``xy = 0`` implies ``x = 0`` or ``y = 0``; distinct from ``e`` being an atom."""
    if C.size == 1:
        return False
    n = C.n
    for a in range(n):
        for b in range(n):
            if C.atom_product[a][b] == 0:
                return False
    return True
