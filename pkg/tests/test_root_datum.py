import random
from fractions import Fraction
from itertools import combinations, product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from _gen import frame, inner, random_element
from levilift.errors import InputError, PreconditionError
from levilift.local_field import FieldDesc, FieldElement, GaloisElement
from levilift.root_datum import (
    DualElement,
    FixedLevi,
    GammaElement,
    TorusFrame,
    TwistedLevi,
    centralizer_levi,
    fixed_levi,
    fixed_levi_equals,
    fixed_point_restricted_roots,
    galois_stable_partitions,
    gamma_average,
    is_generic,
    phi_prime,
    sharp_flat,
)

Q5 = FieldDesc(5, 1, 1, (0, 1))
UNRAM = FieldDesc(5, 2, 1, (3, 0, 1))


def F(desc, q):
    return FieldElement.from_rational(desc, q)


def test_frame_rejects_small_p():
    with pytest.raises(InputError):
        TorusFrame(FieldDesc(3, 1, 1, (0, 1)), 4)


def test_frame_rejects_bad_frobenius_order():
    with pytest.raises(InputError):
        TorusFrame(Q5, 4, (1, 0, 3, 2))


def test_frame_rejects_gamma_not_commuting_with_galois():
    with pytest.raises(InputError):
        TorusFrame(UNRAM, 4, (1, 0, 3, 2), None, [GammaElement((1, 2, 0, 3), 1, GaloisElement(), ())])


def test_frame_rejects_bad_root_signs():
    with pytest.raises(InputError):
        TorusFrame(Q5, 4, None, None, [GammaElement((0, 1, 2, 3), 1, GaloisElement(), (1, 2, 1, 1))])


def test_gamma_group_of_involution():
    fr = frame("sp4")
    assert len(fr.gamma_elements) == 2
    g = fr.gamma_generators[0]
    assert fr.gamma_compose(g, g) == fr.gamma_identity


def _all_partitions(n):
    """Set partitions of range(n) from restricted growth strings."""
    for labels in product(range(n), repeat=n):
        if all(labels[k] <= max(labels[:k], default=-1) + 1 for k in range(n)):
            blocks: dict[int, set[int]] = {}
            for k, lab in enumerate(labels):
                blocks.setdefault(lab, set()).add(k)
            yield {frozenset(b) for b in blocks.values()}


def _stable_by_brute_force(fr):
    """Partitions whose blocks are permuted by every Galois permutation."""
    out = []
    for blocks in _all_partitions(fr.n):
        ok = all(
            {frozenset(fr.galois_perm(g)[k] for k in b) for b in blocks} == blocks for g in fr.desc.galois_elements()
        )
        if ok:
            out.append(blocks)
    return out


@pytest.mark.parametrize("name", ["split4", "unram4", "ram4", "both4", "unram6"])
def test_galois_stable_partitions_match_brute_force(name):
    fr = frame(name)
    got = [frozenset(frozenset(b) for b in L.blocks) for L in galois_stable_partitions(fr)]
    want = _stable_by_brute_force(fr)
    assert sorted(map(sorted_key, got)) == sorted(map(sorted_key, [frozenset(w) for w in want]))


def test_split_frames_give_every_partition():
    assert len(galois_stable_partitions(frame("split4"))) == 15
    assert len(galois_stable_partitions(frame("split6"))) == 203


def sorted_key(blocks):
    return sorted(sorted(b) for b in blocks)


def test_twisted_levi_rejects_unstable_partition():
    with pytest.raises(InputError):
        TwistedLevi(frame("unram4"), [[0], [1, 2, 3]])


def test_containment():
    fr = frame("split4")
    G, T = fr.full(), fr.torus()
    M = TwistedLevi(fr, [[0, 1], [2, 3]])
    assert G.contains(M) and M.contains(T) and not T.contains(M)
    assert TwistedLevi(fr, [[1, 0], [3, 2]]) == M


def test_fixed_points_of_symplectic_involution():
    fr = frame("sp4")
    roots = fixed_point_restricted_roots(fr.full())
    assert len(fr.fixed_basis) == 2
    assert len(roots) == 8
    lengths = {sum(x * x for x in r) for r in roots}
    assert len(lengths) == 2  # long and short roots of C2


def test_fixed_points_of_inner_involution():
    fr = frame("unram4")
    H = fixed_levi(fr.full(), "H")
    assert H.pairs == frozenset({(0, 1), (2, 3)})
    assert fixed_levi_equals(TwistedLevi(fr, [[0, 1], [2, 3]]), H)
    assert fixed_levi(TwistedLevi(fr, [[0, 2], [1, 3]])) == fixed_levi(fr.torus())
    assert H.contains(fixed_levi(fr.torus()))


def test_fixed_levi_requires_stability():
    fr = frame("sp4")
    with pytest.raises(PreconditionError):
        fixed_point_restricted_roots(TwistedLevi(fr, [[0], [1], [2, 3]]))


def test_fixed_levi_frame_mismatch():
    with pytest.raises(InputError):
        fixed_levi_equals(frame("unram4").full(), fixed_levi(frame("split4").full()))


def test_fixed_levi_wrong_dimension():
    with pytest.raises(InputError):
        FixedLevi(frame("sp4"), [(Fraction(1),)])


def test_centralizer_and_sharp_flat_example():
    fr = frame("split4")
    d = Q5
    a, b = F(d, Fraction(1, 25)), F(d, Fraction(2, 25))
    X = DualElement(fr, [a, a + F(d, Fraction(1, 5)), b, b + 1])
    G = fr.full()
    assert phi_prime(G, X, 2) == frozenset({(0, 1), (2, 3)})
    sharp, flat = sharp_flat(G, X, 2)
    assert sharp + flat == X
    assert sharp.coords[0] == sharp.coords[1] and sharp.coords[2] == sharp.coords[3]
    assert flat.depth() < 2
    M = centralizer_levi(G, sharp)
    assert M == TwistedLevi(fr, [[0, 1], [2, 3]])
    assert is_generic(sharp, 2, M, G)
    assert not is_generic(X, 2, fr.torus(), G)


def test_sharp_flat_requires_depth():
    fr = frame("split4")
    X = DualElement(fr, [F(Q5, Fraction(1, 5))] * 4)
    with pytest.raises(PreconditionError):
        sharp_flat(fr.full(), X, 2)


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(["split4", "unram4", "ram4", "sp4"]), st.integers(0, 10**6), st.integers(1, 6))
def test_sharp_flat_properties(name, seed, te):
    fr = frame(name)
    t = Fraction(te, fr.desc.e)
    rng = random.Random(seed)
    X = random_element(fr, rng, t, span=3)
    if X.is_zero() or X.depth() != t:
        return
    for M in (fr.full(), TwistedLevi(fr, [[0, 1], [2, 3]])):
        sharp, flat = sharp_flat(M, X, t)
        assert sharp + flat == X
        assert flat.is_zero() or flat.depth() < t
        for j, k in phi_prime(M, X, t):
            assert (sharp.coords[j] - sharp.coords[k]).is_zero()
        assert is_generic(sharp, t, centralizer_levi(M, sharp), M)
        Y = gamma_average(X)
        if not Y.is_zero() and Y.depth() == t:
            assert sharp_flat(M, Y, t)[0].is_gamma_fixed()


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6))
def test_gamma_average_is_idempotent_projection(seed):
    fr = frame("sp4")
    X = random_element(fr, random.Random(seed), Fraction(2))
    Y = gamma_average(X)
    assert Y.is_gamma_fixed()
    assert gamma_average(Y) == Y
    assert Y.is_rational()


def test_fixed_space_coords_roundtrip():
    fr = frame("sp4")
    X = gamma_average(random_element(fr, random.Random(1), Fraction(1)))
    coeffs = X.fixed_space_coords()
    rebuilt = [FieldElement.zero(fr.desc)] * fr.n
    for c, b in zip(coeffs, fr.fixed_basis):
        rebuilt = [r + c * w for r, w in zip(rebuilt, b)]
    assert DualElement(fr, rebuilt) == X


def test_root_exclusion_by_signs():
    fr = TorusFrame(Q5, 4, None, None, [inner(4, 2)])
    excluded = {(j, k) for j, k in combinations(range(4), 2) if fr.root_excluded(j, k)}
    assert excluded == {(0, 2), (0, 3), (1, 2), (1, 3)}
