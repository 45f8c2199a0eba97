from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from levilift.errors import InputError, PrecisionError
from levilift.local_field import (
    FieldDesc,
    FieldElement,
    GaloisElement,
    apply_galois,
    base_rational,
    fe_inv,
    padic_digits,
    padic_fraction_part,
    psi_value,
    trace_to_base,
    vp_rational,
)

Q5 = FieldDesc(5, 1, 1, (0, 1))
UNRAM = FieldDesc(5, 2, 1, (3, 0, 1))
RAM = FieldDesc(5, 1, 2, (0, 1))
BOTH = FieldDesc(5, 2, 2, (3, 0, 1))
CUBIC = FieldDesc(5, 3, 1, (1, 1, 0, 1))
QUARTIC_RAM = FieldDesc(5, 1, 4, (0, 1))
EXACT_FIELDS = [Q5, UNRAM, RAM, BOTH]

small_q = st.fractions(min_value=-50, max_value=50, max_denominator=30)


def elements(desc):
    rows = st.lists(st.lists(small_q, min_size=desc.f, max_size=desc.f), min_size=desc.e, max_size=desc.e)
    return rows.map(lambda r: FieldElement.from_coords(desc, r))


field_and_elements = st.sampled_from(EXACT_FIELDS).flatmap(
    lambda d: st.tuples(st.just(d), elements(d), elements(d), elements(d))
)


# -- descriptors ------------------------------------------------------------------


@pytest.mark.parametrize(
    "args",
    [
        (4, 1, 1, (0, 1)),  # not prime
        (5, 1, 5, (0, 1)),  # wild
        (5, 1, 3, (0, 1)),  # 3 does not divide 4
        (5, 2, 1, (1, 0, 1)),  # z^2 + 1 splits mod 5
        (5, 2, 1, (3, 0, 2)),  # not monic
    ],
)
def test_bad_descriptors_rejected(args):
    with pytest.raises(InputError):
        FieldDesc(*args)


def test_three_plus_four_digits():
    x = FieldElement.from_rational(Q5, 3) + FieldElement.from_rational(Q5, 4)
    assert x.lead_val == 0
    assert x.digits == [(2,), (1,)]


def test_inverse_of_two_is_repeating():
    inv = fe_inv(FieldElement.from_rational(Q5, 2))
    assert inv.digit_window(0, 5) == [(3,), (2,), (2,), (2,), (2,)]
    assert not inv.terminates
    assert len(inv.digits) == Q5.precision


def test_ramified_valuations():
    pi = FieldElement.pi_power(RAM, 1)
    assert (pi * pi * pi).lead_val == Fraction(3, 2)
    assert (pi * pi) == FieldElement.from_rational(RAM, 5)
    assert FieldElement.pi_power(RAM, -3).lead_val == Fraction(-3, 2)


def test_frobenius_on_generator():
    z = FieldElement.generator(UNRAM)
    assert apply_galois(GaloisElement(1), z) == -z
    assert trace_to_base(z).is_zero()
    assert base_rational(trace_to_base(z * z)) == 2 * -3


def test_cubic_frobenius_has_order_three():
    z = FieldElement.generator(CUBIC)
    img = z
    for _ in range(3):
        img = apply_galois(GaloisElement(1), img)
    assert not img.exact
    assert img.digit_window(0, 10) == z.digit_window(0, 10)
    # the residue image of z is z^5
    assert apply_galois(GaloisElement(1), z).digit_window(0, 1)[0] == CUBIC.residue_pow((0, 1, 0), 5)


def test_tame_twist_with_teichmuller_root():
    pi = FieldElement.pi_power(QUARTIC_RAM, 1)
    tw = apply_galois(GaloisElement(0, 1), pi)
    assert not tw.exact
    assert tw.lead_val == Fraction(1, 4)
    fourth = tw
    for _ in range(3):
        fourth = apply_galois(GaloisElement(0, 1), fourth)
    assert (fourth - pi).digit_window(1, 10) == [(0,)] * 10
    with pytest.raises(PrecisionError):
        (fourth - pi).is_zero()


def test_precision_errors():
    pi = FieldElement.pi_power(QUARTIC_RAM, 1)
    tw = apply_galois(GaloisElement(0, 1), pi)
    with pytest.raises(PrecisionError):
        tw.digit_window(0, tw.prec + 1)
    with pytest.raises(PrecisionError):
        psi_value(FieldElement.pi_power(Q5, -Q5.precision))
    with pytest.raises(PrecisionError):
        base_rational(FieldElement.generator(UNRAM))


def test_from_digits_validates_valuation():
    with pytest.raises(InputError):
        FieldElement.from_digits(Q5, Fraction(1, 2), [(1,)])
    x = FieldElement.from_digits(RAM, Fraction(-1, 2), [(1,), (0,), (3,)])
    assert x == FieldElement.pi_power(RAM, -1) + FieldElement.pi_power(RAM, 1) * 3


def test_psi_values():
    assert psi_value(FieldElement.from_rational(Q5, Fraction(1, 5))) == Fraction(1, 25)
    assert psi_value(FieldElement.from_rational(Q5, 1)) == Fraction(1, 5)
    assert psi_value(FieldElement.from_rational(Q5, 5)) == 0
    assert psi_value(FieldElement.from_rational(Q5, Fraction(1, 3))) == padic_fraction_part(Fraction(1, 15), 5)


# -- Galois group -----------------------------------------------------------------


@pytest.mark.parametrize("desc", [UNRAM, RAM, BOTH])
def test_galois_table_matches_action(desc):
    z = FieldElement.generator(desc)
    pi = FieldElement.pi_power(desc, 1)
    gens = [z, pi, z * pi + 1]
    for g in desc.galois_elements():
        for h in desc.galois_elements():
            gh = desc.galois_compose(g, h)
            for x in gens:
                assert apply_galois(g, apply_galois(h, x)) == apply_galois(gh, x)
        assert desc.galois_compose(g, desc.galois_inverse(g)) == GaloisElement()
    assert len(desc.galois_elements()) == desc.e * desc.f


@settings(max_examples=60, deadline=None)
@given(field_and_elements)
def test_galois_is_ring_homomorphism(data):
    desc, a, b, c = data
    for g in desc.galois_elements():
        ga, gb = apply_galois(g, a), apply_galois(g, b)
        assert apply_galois(g, a * b + c) == ga * gb + apply_galois(g, c)


@settings(max_examples=60, deadline=None)
@given(field_and_elements)
def test_trace_is_galois_invariant(data):
    desc, a, _, _ = data
    tr = trace_to_base(a)
    for g in desc.galois_elements():
        assert apply_galois(g, tr) == tr
    base_rational(tr)


# -- arithmetic properties ------------------------------------------------------------


@settings(max_examples=80, deadline=None)
@given(field_and_elements)
def test_field_axioms(data):
    desc, a, b, c = data
    assert (a + b) * c == a * c + b * c
    assert a * (b * c) == (a * b) * c
    assert a - a == FieldElement.zero(desc)
    if any(a.nums):
        assert a * fe_inv(a) == FieldElement.from_rational(desc, 1)


@settings(max_examples=80, deadline=None)
@given(field_and_elements)
def test_valuation_is_multiplicative(data):
    _, a, b, _ = data
    if any(a.nums) and any(b.nums):
        assert (a * b).lead_val == a.lead_val + b.lead_val


@settings(max_examples=80, deadline=None)
@given(small_q.filter(lambda q: q != 0), st.integers(-3, 3), st.integers(1, 8))
def test_padic_digits_reconstruct(q, lo, count):
    ds = padic_digits(q, lo, count, 5)
    assert all(0 <= d < 5 for d in ds)
    approx = sum(Fraction(d) * Fraction(5) ** (lo + i) for i, d in enumerate(ds))
    tail = padic_digits(q, lo - 20, 20, 5)
    head = sum(Fraction(d) * Fraction(5) ** (lo - 20 + i) for i, d in enumerate(tail))
    # q minus the digits below lo+count has valuation at least lo + count
    assert vp_rational(q - head - approx, 5) >= lo + count


@settings(max_examples=80, deadline=None)
@given(small_q, small_q)
def test_psi_is_additive(a, b):
    x, y = FieldElement.from_rational(Q5, a), FieldElement.from_rational(Q5, b)
    assert psi_value(x + y) == (psi_value(x) + psi_value(y)) % 1


@settings(max_examples=50, deadline=None)
@given(st.sampled_from(EXACT_FIELDS).flatmap(lambda d: st.tuples(st.just(d), elements(d))))
def test_digits_roundtrip(data):
    desc, a = data
    if not any(a.nums):
        return
    rebuilt = FieldElement.from_digits(desc, a.lead_val, a.digits)
    if a.terminates:
        assert rebuilt == a
    else:
        n = len(a.digits)
        diff = rebuilt - a
        assert diff.lead_val >= a.lead_val + Fraction(n, desc.e)
