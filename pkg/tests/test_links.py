from __future__ import annotations

from itertools import combinations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import seifert_orbit_bruteforce
from splicegraph.errors import SpliceError
from splicegraph.links import (
    FIBRE_COMPLEMENT_OF_S3_FIBRING,
    HOPF,
    KEYCHAIN_TYPE,
    KEYRING,
    NOT_EMBEDDABLE,
    SOLID_TORUS_FIBRING,
    STAR1,
    STAR2,
    UNKNOT,
    BrunnianSet,
    KeyChain,
    SeifertLink,
    SeifertManifoldDescriptor,
    Slope,
    Unlink,
    canonical_label,
    classify_embeddable,
    complement_descriptor,
    fiber,
    fibre_slope,
    is_hopf,
    is_unknot,
    key,
    linking_number,
    seifert_canon,
    seifert_equiv,
    strong_brunnian,
)


def S(p: int, q: int, *stars: str) -> SeifertLink:
    return SeifertLink(p, q, frozenset(stars))


nonzero = st.integers(-50, 50).filter(lambda x: x != 0)
stars = st.sets(st.sampled_from([STAR1, STAR2])).map(frozenset)
seiferts = st.builds(SeifertLink, nonzero, nonzero, stars)


@pytest.mark.parametrize(
    "src, want",
    [
        (S(-2, -3), S(2, 3)),
        (S(3, 2, STAR1), S(2, 3, STAR2)),
        (S(-1, 1), S(1, 1)),
        (S(2, -3), S(2, -3)),
        (S(1, 2, STAR2), S(2, 4)),
    ],
)
def test_seifert_canon_examples(src, want):
    assert seifert_canon(src) == want


def test_seifert_equiv_examples():
    assert seifert_equiv(S(2, 2), S(-2, -2))
    assert not seifert_equiv(S(2, 3), S(2, -3))
    assert seifert_equiv(S(1, 1), S(-1, 1))


def test_hopf_and_unknot_collapse():
    assert canonical_label(S(1, 6, STAR1)).label == HOPF
    assert canonical_label(S(2, -2)).label == HOPF
    assert canonical_label(S(2, -2)).flip
    assert canonical_label(S(5, 1)).label == UNKNOT
    assert canonical_label(KeyChain(1)).label == HOPF
    assert canonical_label(KeyChain(0)).label == UNKNOT
    assert canonical_label(Unlink(1)).label == UNKNOT


def test_zero_parameter_rejected():
    with pytest.raises(SpliceError):
        SeifertLink(0, 3)


@given(seiferts)
@settings(max_examples=300, deadline=None)
def test_canon_idempotent(s):
    c = seifert_canon(s)
    assert seifert_canon(c) == c


@given(seiferts)
@settings(max_examples=200, deadline=None)
def test_canon_constant_on_bruteforce_orbit(s):
    want = seifert_canon(s)
    for p, q, X in seifert_orbit_bruteforce(s.p, s.q, s.X, 200):
        assert seifert_canon(SeifertLink(p, q, X)) == want


@given(seiferts)
@settings(max_examples=200, deadline=None)
def test_equivalent_labels_share_invariants(s):
    c = canonical_label(s)
    if is_unknot(s) or is_hopf(s):
        return
    # the component map transports Brunnian sets and fibre slopes
    ub = strong_brunnian(s)
    ub_c = strong_brunnian(c.label)
    assert {frozenset(c.cmap[x] for x in m) for m in ub.members} == set(ub_c.members)
    slopes = sorted(str(fibre_slope(s, x)) for x in s.components)
    slopes_c = sorted(str(fibre_slope(c.label, x)) for x in c.label.components)
    assert len(slopes) == len(slopes_c)


@given(seiferts)
@settings(max_examples=200, deadline=None)
def test_linking_symmetric_and_brunnian_members_unlinked(s):
    comps = s.components
    for a, b in combinations(comps, 2):
        assert linking_number(s, a, b) == linking_number(s, b, a)
    for m in strong_brunnian(s).members:
        for a, b in combinations(sorted(m), 2):
            assert linking_number(s, a, b) == 0


def members(label) -> set[frozenset[str]]:
    return {m for m in strong_brunnian(label).members if m}


def test_brunnian_examples():
    assert members(S(2, 3)) == set()
    assert frozenset() in strong_brunnian(S(2, 3))
    assert members(S(2, 2)) == {frozenset({fiber(0)}), frozenset({fiber(1)})}
    assert members(S(2, 4)) == {frozenset({fiber(0)}), frozenset({fiber(1)})}
    want = {frozenset({key(0)}), frozenset({key(1)}), frozenset({KEYRING}), frozenset({key(0), key(1)})}
    assert members(KeyChain(2)) == want


def test_keychain_brunnian_matches_linking_oracle():
    # a sublink of a key-chain is an unlink iff it is split with unknotted pieces;
    # here that is equivalent to all pairwise linking numbers vanishing
    for p in range(1, 5):
        h = KeyChain(p)
        ub = strong_brunnian(h)
        for r in range(1, p + 2):
            for sub in combinations(h.components, r):
                unlinked = all(linking_number(h, a, b) == 0 for a, b in combinations(sub, 2))
                assert (frozenset(sub) in ub) == unlinked


def test_brunnian_set_closure_checks():
    good = BrunnianSet.of(["a", "b", "c"], [{"a"}, {"b"}, {"a", "b"}])
    assert good.union_closed() and good.downward_closed()
    bad = BrunnianSet.of(["1", "2", "3"], [{"1", "2"}, {"2", "3"}])
    assert not bad.union_closed()


def test_fibre_slopes():
    s = S(2, 17, STAR1)
    assert fibre_slope(s, fiber(0)) == Slope(34, 1)
    assert fibre_slope(s, STAR1) == Slope(2, 17)
    assert fibre_slope(KeyChain(3), KEYRING).is_infinite
    assert fibre_slope(KeyChain(3), key(0)) == Slope(0, 1)
    assert fibre_slope(KeyChain(3), KEYRING).reciprocal_of(fibre_slope(KeyChain(3), key(1)))
    with pytest.raises(SpliceError) as exc:
        fibre_slope(S(2, 2), fiber(0))
    assert exc.value.code == "NON_UNIQUE"


def test_slope_normalisation():
    assert Slope(4, -6) == Slope(-2, 3)
    assert Slope(-1, 0) == Slope(1, 0)
    with pytest.raises(SpliceError):
        Slope(0, 0)


def test_linking_examples():
    assert linking_number(S(2, 17, STAR1), fiber(0), STAR1) == 2
    assert linking_number(S(4, 6), fiber(0), fiber(1)) == 6
    assert linking_number(KeyChain(2), key(0), key(1)) == 0
    assert linking_number(KeyChain(2, 1), key(0), KEYRING) == -1
    assert linking_number(S(2, 3, STAR1, STAR2), STAR1, STAR2) == 1


def test_complement_descriptors():
    d = complement_descriptor(S(2, 3))
    assert (d.g, d.b, d.slopes) == (0, 1, (Slope(2, 3), Slope(1, 2)))
    assert str(complement_descriptor(S(2, 4, STAR1, STAR2))) == "M(0,4;)"
    assert str(complement_descriptor(KeyChain(4))) == "M(0,5;)"


def test_classify_embeddable():
    assert classify_embeddable(SeifertManifoldDescriptor(1, 1)) == NOT_EMBEDDABLE
    two = SeifertManifoldDescriptor(0, 2, (Slope(2, 3), Slope(1, 2)))
    assert classify_embeddable(two) == FIBRE_COMPLEMENT_OF_S3_FIBRING
    assert classify_embeddable(SeifertManifoldDescriptor(0, 3)) == KEYCHAIN_TYPE
    assert classify_embeddable(SeifertManifoldDescriptor(0, 1, (Slope(2, 5),))) == SOLID_TORUS_FIBRING


@given(st.integers(1, 30), st.integers(1, 30))
@settings(max_examples=100, deadline=None)
def test_descriptor_euclid_choice(p, q):
    s = SeifertLink(p, q)
    g = s.gcd
    pp, qq = p // g, q // g
    d = complement_descriptor(s)
    m_slope, l_slope = d.slopes
    assert d.b == g and m_slope.den == qq and l_slope.den == pp
    m, l = m_slope.num, l_slope.num
    # least non-negative solution of p'm - l q' = 1
    assert pp * m - l * qq == 1
    assert 0 <= m < qq or (qq == 1 and m == 0)
