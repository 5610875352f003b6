import itertools

import pytest
from hypothesis import given, strategies as st

from ras.config import GuardError
from ras.core import (AtomStructure, EStructure, automorphisms, canonicalize, check_axioms,
                      closed_under_transforms, convert_from_e_form, convert_to_e_form, cycle_of,
                      cycle_table, find_isomorphism, frame_automorphisms, from_json, permute,
                      structure_from_cycles, to_json)
from ras.enumeration import P, enumerate_class, frame
from ras.oracles import all_involutions, nonempty_subsets


def test_cycle_of_identity_frame_gives_all_permutations():
    c = cycle_of((0, 1, 2), (0, 1, 2))
    assert set(c.members) == set(itertools.permutations((0, 1, 2)))
    assert c.size == 6


def test_cycle_of_constant_triple_is_singleton():
    assert set(cycle_of((1, 1, 1), (0, 1, 2)).members) == {(1, 1, 1)}


def test_cycle_of_swapped_pair():
    f = (1, 0)
    assert set(cycle_of((0, 0, 1), f).members) == {(0, 0, 1), (1, 1, 0)}


def _reps(table):
    return {table.cycles[k].representative for k in table.diversity}


def test_cycle_table_n3_identity():
    t = cycle_table(3, None, 0)
    assert len(t.diversity) == 4
    owners = {frozenset(t.cycles[k].members) for k in t.diversity}
    expected = {frozenset(cycle_of(x, (0, 1, 2)).members)
                for x in [(1, 1, 1), (2, 2, 2), (1, 2, 2), (2, 1, 1)]}
    assert owners == expected


def test_cycle_table_n2():
    t = cycle_table(2, None, 0)
    assert _reps(t) == {(1, 1, 1)}


def test_cycle_table_n3_swap():
    t = cycle_table(3, (0, 2, 1), 0)
    assert sorted(t.cycles[k].size for k in t.diversity) == [2, 6]


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_cycles_partition_triples(n):
    for f in all_involutions(n):
        t = cycle_table(n, f, 0 if f[0] == 0 else {0, f[0]})
        seen = [m for c in t.cycles for m in c.members]
        assert len(seen) == n**3 == len(set(seen))
        assert all(c.size in (1, 2, 3, 6) for c in t.cycles)


def test_check_axioms_examples():
    A = AtomStructure.from_triples(1, (0,), {0}, [(0, 0, 0)])
    r = check_axioms(A)
    assert r.satisfies_P and r.satisfies_I and r.symmetric and r.integral
    B = AtomStructure.from_triples(2, (0, 1), {0}, [(0, 0, 0), (1, 0, 1), (1, 1, 0), (0, 1, 1)])
    assert check_axioms(B).ok
    C = AtomStructure.from_triples(2, (0, 1), {0}, [(0, 0, 0), (1, 0, 1)])
    r = check_axioms(C)
    assert not r.satisfies_P
    assert r.witnesses["P"] == (1, 0, 1)


def test_p_iff_union_of_cycles_exhaustive_n2():
    slots = list(itertools.product(range(2), repeat=3))
    for f in all_involutions(2):
        for I in nonempty_subsets(2):
            table = cycle_table(2, f, I)
            for mask in range(1 << 8):
                trip = [t for k, t in enumerate(slots) if mask >> k & 1]
                A = AtomStructure.from_triples(2, f, I, trip)
                union = all(all(A.has(*m) for m in c.members) or not any(A.has(*m) for m in c.members)
                            for c in table.cycles)
                assert check_axioms(A).satisfies_P == union == closed_under_transforms(A)


def test_structure_from_cycles_examples():
    t2 = cycle_table(2, None, 0)
    E = structure_from_cycles(t2, [], 0)
    assert set(E.triples()) == {(0, 0, 0), (1, 0, 1), (1, 1, 0), (0, 1, 1)}
    E1 = structure_from_cycles(t2, list(t2.diversity), 0)
    assert set(E1.triples()) == set(E.triples()) | {(1, 1, 1)}
    t3 = cycle_table(3, None, 0)
    full = structure_from_cycles(t3, list(t3.diversity), 0)
    identity_triples = [t for t in full.triples() if 0 in t]
    # [0,0,0] is a single triple, [1,0,1] and [2,0,2] have three each
    assert len(identity_triples) == 7
    assert len(full.triples()) - len(identity_triples) == 8
    with pytest.raises(ValueError):
        structure_from_cycles(t3, [t3.identity_cycles[0]], 0)


def test_convert_examples(fsiase3):
    A = AtomStructure.from_triples(2, (0, 1), {0}, [(0, 0, 0), (1, 0, 1), (1, 1, 0), (0, 1, 1)])
    E = convert_to_e_form(A)
    assert E.e == 0 and E.T == A.T
    assert convert_from_e_form(E) == A
    bad = next(x for x in enumerate_class(2, "FAS") if len(x.I) == 2)
    with pytest.raises(ValueError):
        convert_to_e_form(bad)
    one = convert_from_e_form(EStructure(1, 0, b"\x01"))
    assert one.n == 1 and one.I == {0}
    forms = [convert_from_e_form(E) for E in fsiase3]
    assert len(set(forms)) == 16
    fsias = list(enumerate_class(3, "FSIAS"))
    assert len(fsias) == 48
    assert all(convert_from_e_form(convert_to_e_form(A)) == A for A in fsias)


def test_automorphism_examples():
    assert len(frame_automorphisms(3, (0, 1, 2), 0)) == 2 == P(3, 3)
    assert len(frame_automorphisms(3, (0, 2, 1), 0)) == 2 == P(3, 1)
    assert automorphisms(EStructure(1, 0, b"\x01")) == [(0,)]


@pytest.mark.parametrize("n", range(1, 9))
def test_frame_automorphisms_match_formula(n):
    for s in range(1, n + 1):
        if (n - s) % 2 == 0:
            assert len(frame_automorphisms(n, frame(n, s), 0, unsafe=n > 8)) == P(n, s)


def test_canonicalize_examples(fsiase3):
    a = EStructure.from_triples(2, 0, [(0, 0, 0), (1, 0, 1), (1, 1, 0), (0, 1, 1)])
    b = EStructure.from_triples(2, 1, [(1, 1, 1), (0, 1, 0), (0, 0, 1), (1, 0, 0)])
    assert canonicalize(a) == canonicalize(b)
    assert len({canonicalize(E) for E in fsiase3}) == 10


def test_canonicalize_injective_on_classes_n4(fsiase4):
    reps = {}
    for E in fsiase4:
        reps.setdefault(canonicalize(E), E)
    keys = list(reps)
    for i, j in itertools.combinations(range(len(keys)), 2):
        assert find_isomorphism(reps[keys[i]], reps[keys[j]]) is None


def test_canonicalize_guard():
    E = EStructure(8, 0, bytes(512))
    with pytest.raises(GuardError):
        canonicalize(E)


@given(st.data())
def test_canonicalize_permutation_invariant(fsiase4, data):
    E = data.draw(st.sampled_from(fsiase4))
    pi = data.draw(st.permutations(range(4)))
    F = permute(E, pi)
    assert check_axioms(F).ok
    assert canonicalize(F) == canonicalize(E)
    assert find_isomorphism(E, F) is not None


@given(st.data())
def test_json_round_trip(fas3, data):
    A = data.draw(st.sampled_from(fas3))
    assert from_json(to_json(A)) == A
