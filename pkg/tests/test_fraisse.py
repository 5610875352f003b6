import itertools

import pytest
from hypothesis import given, strategies as st

from ras.core import EStructure, check_axioms, find_isomorphism
from ras.enumeration import enumerate_fsiase
from ras.fol import (ExtensionAxiom, all_patterns, evaluate_instance, extension_axiom, extension_holds,
                     has_witness)
from ras.fraisse import (Embedding, build_generic, embeds, extend_with_witness, free_amalgam,
                         generated_substructure, homogeneity_check, induced, is_embedding,
                         one_point_extension, random_amalgamation_instance, satisfies_class_axioms,
                         trivial)
from ras.probability import make_rng, sample_fsiase

N2_WITH, N2_WITHOUT = sorted(enumerate_fsiase(2), key=lambda E: not E.has(1, 1, 1))


def test_generated_substructure_examples(fsiase3):
    E = fsiase3[5]
    B, emb = generated_substructure(E, [])
    assert B.n == 1 and emb.map == (E.e,)
    B, emb = generated_substructure(E, range(3))
    assert B == E and emb.map == (0, 1, 2)
    for E in fsiase3:
        B, emb = generated_substructure(E, [2])
        assert B.n == 2 and emb.is_valid()
        assert B.has(1, 1, 1) == E.has(2, 2, 2)


def test_embeds_examples(fsiase3):
    for E in fsiase3:
        emb = embeds(trivial(), E)
        assert emb is not None and emb.map == (E.e,)
    assert embeds(N2_WITH, N2_WITHOUT) is None
    E = fsiase3[11]
    B, inc = generated_substructure(E, [1])
    found = embeds(B, E)
    assert found is not None and found.is_valid()


def test_amalgam_over_trivial():
    S = trivial()
    mu = Embedding(S, N2_WITH, (0,))
    U, mu2, nu2 = free_amalgam(S, N2_WITH, N2_WITH, mu, mu)
    assert U.n == 3
    assert U.has(1, 1, 1) and U.has(2, 2, 2)
    assert not any(U.has(*t) for t in itertools.permutations((1, 1, 2)))
    assert not any(U.has(*t) for t in itertools.permutations((1, 2, 2)))


def test_amalgam_along_everything(fsiase3):
    S = fsiase3[7]
    ident = Embedding(S, S, (0, 1, 2))
    U, _, _ = free_amalgam(S, S, S, ident, ident)
    assert find_isomorphism(U, S) is not None


def test_amalgam_cardinality():
    rng = make_rng(2)
    V = sample_fsiase(3, rng)
    S, mu = induced(V, [0, 1])
    W = extend_with_witness(V, [1], ExtensionAxiom(1, 0, (1,), (0,)))
    nu = Embedding(S, W, (0, 1))
    assert nu.is_valid()
    U, _, _ = free_amalgam(S, V, W, mu, nu)
    assert U.n == 5


def test_amalgam_rejects_bad_embedding(fsiase3):
    S = N2_WITH
    bad = Embedding(S, N2_WITHOUT, (0, 1))
    with pytest.raises(ValueError):
        free_amalgam(S, N2_WITHOUT, N2_WITHOUT, bad, bad)


@given(st.integers(0, 2**64))
def test_amalgam_invariants(seed):
    S, V, W, mu, nu = random_amalgamation_instance(make_rng(seed))
    U, mu2, nu2 = free_amalgam(S, V, W, mu, nu)
    assert satisfies_class_axioms(U)
    assert mu2.is_valid() and nu2.is_valid()
    assert mu.then(mu2).map == nu.then(nu2).map


def test_one_point_extension_examples():
    B0 = one_point_extension(trivial(), ExtensionAxiom(0, 0))
    B1 = one_point_extension(trivial(), ExtensionAxiom(0, 1))
    assert B0.n == B1.n == 2
    assert B0.has(1, 1, 1) and not B1.has(1, 1, 1)
    B = one_point_extension(N2_WITH, ExtensionAxiom(1, 0, (0,), (0,)))
    assert B.n == 3
    assert B.has(2, 2, 2) and B.has(1, 2, 2) and B.has(1, 1, 2)
    assert check_axioms(B).ok


@given(st.integers(0, 2**32), st.data())
def test_one_point_extension_invariants(seed, data):
    rng = make_rng(seed)
    A = sample_fsiase(data.draw(st.integers(1, 4)), rng)
    m = A.n - 1
    bits = data.draw(st.lists(st.integers(0, 1), min_size=1 + m + m * (m + 1) // 2,
                              max_size=1 + m + m * (m + 1) // 2))
    p = ExtensionAxiom(m, bits[0], tuple(bits[1:1 + m]), tuple(bits[1 + m:]))
    B = one_point_extension(A, p)
    assert check_axioms(B).ok
    sub, inc = generated_substructure(B, [a for a in range(A.n) if a != A.e])
    assert sub == A and inc.is_valid()
    atoms = [a for a in range(A.n) if a != A.e]
    assert evaluate_instance(extension_axiom(p), B, atoms)
    assert has_witness(B, p, atoms, B.e) is not None


def test_build_generic_examples():
    assert build_generic(0, 2) == trivial()
    assert build_generic(1, 0).n == 3
    G = build_generic(2, 1)
    assert check_axioms(G).ok
    round1 = [0] + [a for a in range(1, build_generic(1, 1).n)]
    for m in (0, 1):
        for p in all_patterns(m):
            assert extension_holds(G, p, atoms=round1)


def test_generic_age_monotone():
    G = build_generic(2, 1)
    rng = make_rng(6)
    for _ in range(20):
        S = rng.sample(range(1, G.n), rng.randrange(0, 4))
        B, _ = generated_substructure(G, S)
        assert embeds(B, G) is not None


def test_homogeneity_examples(fsiase3):
    h = homogeneity_check(trivial())
    assert h.ultra and h.weak
    for E in list(enumerate_fsiase(2)) + fsiase3:
        h = homogeneity_check(E)
        assert h.ultra == h.weak


def test_homogeneity_detects_failure(fsiase3):
    flags = [homogeneity_check(E).ultra for E in fsiase3]
    assert not all(flags) and any(flags)


def test_is_embedding_rejects_noninjective():
    assert not is_embedding(N2_WITH, N2_WITH, (0, 0))
    assert not is_embedding(N2_WITH, N2_WITH, (1, 0))
