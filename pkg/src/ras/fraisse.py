"""Substructures, embeddings, free amalgams, one-point extensions and homogeneity
for symmetric integral e-form structures.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from .config import GUARDS, GuardError, check_guard
from .core import EStructure, automorphisms, check_axioms, cycle_of, cycle_table, permute, structure_from_cycles
from .fol import ExtensionAxiom, all_patterns, has_witness


@dataclass(frozen=True)
class Embedding:
    source: EStructure
    target: EStructure
    map: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "map", tuple(int(x) for x in self.map))

    def is_valid(self) -> bool:
        return is_embedding(self.source, self.target, self.map)

    def then(self, other: "Embedding") -> "Embedding":
        """``other . self``."""
        return Embedding(self.source, other.target, tuple(other.map[x] for x in self.map))

    def to_json(self) -> dict:
        return {"map": list(self.map)}


def is_embedding(B: EStructure, A: EStructure, mapping: Sequence[int]) -> bool:
    """Injective, sends ``e`` to ``e`` and preserves ``T`` in both directions."""
    if len(mapping) != B.n or len(set(mapping)) != B.n:
        return False
    if any(not 0 <= x < A.n for x in mapping):
        return False
    if mapping[B.e] != A.e:
        return False
    rng = range(B.n)
    return all(B.has(a, b, c) == A.has(mapping[a], mapping[b], mapping[c])
               for a in rng for b in rng for c in rng)


def trivial() -> EStructure:
    return EStructure(1, 0, b"\x01")


def induced(A: EStructure, atoms: Iterable[int]) -> tuple[EStructure, Embedding]:
    """Substructure on ``atoms`` (which must contain ``e``), with its inclusion."""
    U = sorted(set(atoms))
    if A.e not in U:
        raise ValueError("substructures must contain e")
    k = len(U)
    triples = [(i, j, l) for i in range(k) for j in range(k) for l in range(k)
               if A.has(U[i], U[j], U[l])]
    B = EStructure.from_triples(k, U.index(A.e), triples)
    return B, Embedding(B, A, tuple(U))


def generated_substructure(A: EStructure, S: Iterable[int]) -> tuple[EStructure, Embedding]:
    """Substructure generated by ``S``: ``f`` is the identity, so only ``e`` is added."""
    S = set(S)
    if any(not 0 <= x < A.n for x in S):
        raise ValueError("generator outside the universe")
    return induced(A, S | {A.e})


def _extensions(B: EStructure, A: EStructure, partial: dict[int, int]) -> Iterator[tuple[int, ...]]:
    """Embeddings ``B -> A`` extending ``partial`` in lexicographic order of images."""
    order = sorted(partial) + [b for b in range(B.n) if b not in partial]
    img = dict(partial)
    used = set(img.values())

    def fits(k: int) -> bool:
        placed = order[:k + 1]
        b = order[k]
        x = img[b]
        for p in placed:
            for q in placed:
                if B.has(p, q, b) != A.has(img[p], img[q], x):
                    return False
                if B.has(p, b, q) != A.has(img[p], x, img[q]):
                    return False
                if B.has(b, p, q) != A.has(x, img[p], img[q]):
                    return False
        return True

    for k in range(len(partial)):
        if not fits(k):
            return

    def rec(k: int):
        if k == B.n:
            yield tuple(img[b] for b in range(B.n))
            return
        b = order[k]
        for x in range(A.n):
            if x in used or x == A.e:
                continue
            img[b] = x
            used.add(x)
            if fits(k):
                yield from rec(k + 1)
            used.discard(x)
            del img[b]

    yield from rec(len(partial))


def embeds(B: EStructure, A: EStructure, unsafe: bool = False) -> Embedding | None:
    """First embedding of ``B`` into ``A`` under lexicographic search, or ``None``."""
    check_guard(B.n, GUARDS.homogeneity_n * 2, "embedding search |B|", unsafe)
    first = next(_extensions(B, A, {B.e: A.e}), None)
    return None if first is None else Embedding(B, A, first)


def free_amalgam(S: EStructure, V: EStructure, W: EStructure,
                 mu: Embedding, nu: Embedding) -> tuple[EStructure, Embedding, Embedding]:
    """Glue ``V`` and ``W`` along the images of ``S``; ``T`` is the union of both relations.

    ``V`` keeps its indices and the atoms of ``W`` outside ``nu[S]`` are
    appended in order.
    """
    for emb, src, tgt, name in ((mu, S, V, "mu"), (nu, S, W, "nu")):
        if emb.source != src or emb.target != tgt or not emb.is_valid():
            raise ValueError(f"{name} is not an embedding of S into its target")
    w_to_u = {}
    for s_atom in range(S.n):
        w_to_u[nu.map[s_atom]] = mu.map[s_atom]
    n = V.n
    for w in range(W.n):
        if w not in w_to_u:
            w_to_u[w] = n
            n += 1
    triples = set(V.triples())
    triples.update((w_to_u[a], w_to_u[b], w_to_u[c]) for a, b, c in W.triples())
    U = EStructure.from_triples(n, V.e, sorted(triples))
    mu2 = Embedding(V, U, tuple(range(V.n)))
    nu2 = Embedding(W, U, tuple(w_to_u[w] for w in range(W.n)))
    return U, mu2, nu2


def random_superstructure(S: EStructure, k: int, rng) -> tuple[EStructure, Embedding]:
    """Uniform e-form on ``k`` atoms whose restriction to a random ``|S|``-subset is a copy of ``S``.

    Cycles inside the copy follow ``S``; all other diversity cycles are
    fair coin flips.  ``rng`` is a :class:`random.Random`.
    """
    s = S.n
    if k < s:
        raise ValueError("superstructure must be at least as large as S")
    # relabel S so that e = 0, then place it on atoms 0..s-1
    order = [S.e] + [a for a in range(s) if a != S.e]
    base = permute(S, [order.index(a) for a in range(s)])
    table = cycle_table(k, None, 0)
    chosen = []
    for c in table.diversity:
        rep = table.cycles[c].representative
        if max(rep) < s:
            if base.has(*rep):
                chosen.append(c)
        elif rng.getrandbits(1):
            chosen.append(c)
    V = structure_from_cycles(table, chosen, 0)
    pi = list(range(k))
    rng.shuffle(pi)
    V = permute(V, pi)
    return V, Embedding(S, V, tuple(pi[order.index(a)] for a in range(s)))


def random_amalgamation_instance(rng, max_size: int = 6):
    """Random ``(S, V, W, mu, nu)`` with ``|V|, |W| <= max_size``."""
    from .probability import sample_fsiase
    kv = rng.randint(1, max_size)
    kw = rng.randint(1, max_size)
    ks = rng.randint(1, min(kv, kw))
    S = permute(sample_fsiase(ks, rng), _shuffled(ks, rng))
    V, mu = random_superstructure(S, kv, rng)
    W, nu = random_superstructure(S, kw, rng)
    return S, V, W, mu, nu


def _shuffled(k: int, rng) -> list[int]:
    pi = list(range(k))
    rng.shuffle(pi)
    return pi


def extend_with_witness(A: EStructure, atoms: Sequence[int], pattern: ExtensionAxiom) -> EStructure:
    """Add a fresh atom ``v`` realizing ``pattern`` over ``atoms = (u_1, ..., u_m)``.

    Consistent new cycles: ``[v,e,v]`` always, ``[v,v,v]`` iff ``c = 0``,
    ``[u_i,v,v]`` iff ``c_i = 0`` and ``[u_i,u_j,v]`` (``i <= j``) iff
    ``c_ij = 0``; every other cycle through ``v`` is forbidden.
    """
    atoms = tuple(atoms)
    if len(atoms) != pattern.m:
        raise ValueError(f"pattern has m={pattern.m} but {len(atoms)} atoms were given")
    if A.e in atoms or len(set(atoms)) != len(atoms):
        raise ValueError("atoms must be distinct diversity atoms")
    n = A.n + 1
    v = A.n
    e = A.e
    ident = tuple(range(n))
    triples = set(A.triples())
    new = [(v, e, v)]
    if pattern.c == 0:
        new.append((v, v, v))
    for i, u in enumerate(atoms):
        if pattern.ci[i] == 0:
            new.append((u, v, v))
        for j in range(i, pattern.m):
            if pattern.bit(i, j) == 0:
                new.append((u, atoms[j], v))
    for t in new:
        triples.update(cycle_of(t, ident).members)
    return EStructure.from_triples(n, e, sorted(triples))


def one_point_extension(A: EStructure, pattern: ExtensionAxiom) -> EStructure:
    """Extension over the ascending enumeration of all diversity atoms of ``A``."""
    atoms = [a for a in range(A.n) if a != A.e]
    if pattern.m != len(atoms):
        raise ValueError(f"pattern needs m = {len(atoms)}")
    return extend_with_witness(A, atoms, pattern)


def build_generic(rounds: int, m_max: int, cap: int | None = None) -> EStructure:
    """Finite witness saturation starting from the one-atom structure.

    Each round fixes the diversity atoms present at its start and, for every
    subset of at most ``m_max`` of them (ascending enumeration) and every
    pattern, adds a fresh witness unless some existing atom already is one.
    """
    cap = GUARDS.generic_atoms if cap is None else cap
    A = trivial()
    for _ in range(rounds):
        start = [a for a in range(A.n) if a != A.e]
        for m in range(m_max + 1):
            for xs in itertools.combinations(start, m):
                for p in all_patterns(m):
                    if has_witness(A, p, xs, A.e) is None:
                        if A.n + 1 > cap:
                            raise GuardError(f"generic structure exceeds {cap} atoms")
                        A = extend_with_witness(A, xs, p)
    return A


@dataclass(frozen=True)
class Homogeneity:
    ultra: bool
    weak: bool

    def to_json(self) -> dict:
        return {"ultra": self.ultra, "weak": self.weak}


def _substructure_sets(A: EStructure) -> list[tuple[int, ...]]:
    div = [a for a in range(A.n) if a != A.e]
    return [tuple(sorted(c + (A.e,))) for k in range(len(div) + 1) for c in itertools.combinations(div, k)]


def homogeneity_check(A: EStructure, bound: int | None = None, unsafe: bool = False) -> Homogeneity:
    """Ultrahomogeneity and weak homogeneity, each decided by exhaustive search."""
    check_guard(A.n, GUARDS.homogeneity_n if bound is None else bound, "homogeneity n", unsafe)
    autos = automorphisms(A, unsafe=True)
    subs = _substructure_sets(A)

    ultra = True
    for U1 in subs:
        B1, _ = induced(A, U1)
        for U2 in subs:
            if len(U2) != len(U1):
                continue
            B2, _ = induced(A, U2)
            for perm in itertools.permutations(range(len(U2))):
                if perm[B1.e] != B2.e or not is_embedding(B1, B2, perm):
                    continue
                phi = {U1[i]: U2[perm[i]] for i in range(len(U1))}
                if not any(all(pi[x] == y for x, y in phi.items()) for pi in autos):
                    ultra = False
                    break
            if not ultra:
                break
        if not ultra:
            break

    weak = True
    for UB in subs:
        for UC in subs:
            if not set(UB) < set(UC):
                continue
            B, _ = induced(A, UB)
            # embeddings of B into A, extended over C
            for img in _extensions(B, A, {B.e: A.e}):
                partial = {UB[i]: img[i] for i in range(len(UB))}
                C, _ = induced(A, UC)
                cpart = {UC.index(x): y for x, y in partial.items()}
                if next(_extensions(C, A, cpart), None) is None:
                    weak = False
                    break
            if not weak:
                break
        if not weak:
            break
    return Homogeneity(ultra, weak)


def satisfies_class_axioms(A: EStructure) -> bool:
    rep = check_axioms(A)
    return rep.satisfies_P and rep.satisfies_I
