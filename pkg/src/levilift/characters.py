"""Quasicharacters stored as graded lists of realizers plus a formal tail.

A character of positive depth is determined, on every filtration subgroup
above half its depth, by a central dual element of the same depth.  Here a
character is literally a list of levels (r, X) with distinct depths, read as
the product of the single-level characters built from each X, together with
a formal combination of named depth-zero characters.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

from .errors import InputError, LinearRegimeError, PreconditionError
from .local_field import FieldElement, base_rational, psi_value
from .root_datum import (
    DualElement,
    FixedLevi,
    LeviLike,
    TwistedLevi,
    fixed_point_restricted_roots,
    gamma_average,
)

Level = tuple[Fraction, DualElement]
Tail = tuple[tuple[str, int], ...]


def _tail(items: Iterable[tuple[str, int]]) -> Tail:
    counts: Counter[str] = Counter()
    for sym, c in items:
        counts[sym] += c
    return tuple(sorted((s, c) for s, c in counts.items() if c))


def normalize_levels(realizers: Iterable[DualElement]) -> tuple[Level, ...]:
    """File realizers by true depth, merging equal depths until all differ.

    Realizers of depth at most zero give characters trivial at positive depth
    and are discarded.
    """
    buckets: dict[Fraction, DualElement] = {}
    for X in realizers:
        while True:
            if X.is_zero():
                break
            d = Fraction(X.depth())
            if d <= 0:
                break
            if d in buckets:
                X = buckets.pop(d) + X
                continue
            buckets[d] = X
            break
    return tuple(sorted(buckets.items(), key=lambda kv: kv[0]))


@dataclass(frozen=True)
class QuasiCharacter:
    domain: LeviLike
    levels: tuple[Level, ...] = ()
    tail: Tail = ()

    def __post_init__(self) -> None:
        last = None
        for r, X in self.levels:
            if last is not None and r <= last:
                raise InputError("level depths must be strictly increasing")
            if X.depth() != r:
                raise InputError(f"realizer has depth {X.depth()} but is filed at {r}")
            if not self.domain.is_central(X):
                raise InputError(f"realizer at depth {r} is not central for {self.domain}")
            last = r

    def realizers(self) -> list[DualElement]:
        return [X for _, X in self.levels]


@dataclass(frozen=True)
class CharValue:
    """psi-value as an element of Q/Z; depth-zero tails are trivial on the arguments used."""

    torsion: Fraction
    tail: Tail = field(default=())


def make_character(domain: LeviLike, realizers: Iterable[DualElement], tail: Iterable[tuple[str, int]] = ()) -> QuasiCharacter:
    return QuasiCharacter(domain, normalize_levels(realizers), _tail(tail))


def trivial_char(domain: LeviLike) -> QuasiCharacter:
    return QuasiCharacter(domain)


def char_depth(chi: QuasiCharacter) -> Fraction:
    return chi.levels[-1][0] if chi.levels else Fraction(0)


def _common_domain(a: LeviLike, b: LeviLike) -> LeviLike:
    if a == b:
        return a
    if a.contains(b):
        return b
    if b.contains(a):
        return a
    raise PreconditionError(f"domains {a} and {b} are not nested")


def char_mul(a: QuasiCharacter, b: QuasiCharacter) -> QuasiCharacter:
    dom = _common_domain(a.domain, b.domain)
    return make_character(dom, a.realizers() + b.realizers(), a.tail + b.tail)


def char_inv(a: QuasiCharacter) -> QuasiCharacter:
    return QuasiCharacter(a.domain, tuple((r, -X) for r, X in a.levels), tuple((s, -c) for s, c in a.tail))


def char_product(chars: Iterable[QuasiCharacter], domain: LeviLike) -> QuasiCharacter:
    out = trivial_char(domain)
    for chi in chars:
        out = char_mul(out, chi)
    return out


def realize_at_top(chi: QuasiCharacter) -> tuple[Fraction, DualElement]:
    if not chi.levels:
        raise PreconditionError("a depth-zero character has no positive-depth realizer")
    return chi.levels[-1]


def realizer_above(chi: QuasiCharacter, s) -> DualElement:
    """Sum of the levels deeper than s: a realizer on the s+ filtration subgroup."""
    frame = chi.domain.frame
    total = frame.zero_element()
    for r, X in chi.levels:
        if r > s:
            total = total + X
    return total


def restrict_above_depth(chi: QuasiCharacter, s) -> QuasiCharacter:
    return QuasiCharacter(chi.domain, tuple((r, X) for r, X in chi.levels if r > s))


def restrict_to_group(chi: QuasiCharacter, L: LeviLike, average: bool = False) -> QuasiCharacter:
    """Restrict to a smaller Levi or to a subgroup of the fixed-point group.

    With average=True realizers are first replaced by their Gamma-averages,
    which is exactly the restriction of the functional to the fixed part.
    """
    dom = chi.domain
    if L == dom:
        return chi
    if isinstance(L, TwistedLevi):
        if not (isinstance(dom, TwistedLevi) and dom.contains(L)):
            raise PreconditionError(f"{L} is not contained in {dom}")
        return QuasiCharacter(L, chi.levels, chi.tail)
    if not isinstance(L, FixedLevi):
        raise PreconditionError(f"cannot restrict to {L!r}")
    if isinstance(dom, FixedLevi):
        if not dom.contains(L):
            raise PreconditionError(f"{L} is not contained in {dom}")
        return QuasiCharacter(L, chi.levels, chi.tail)
    if not L.roots <= fixed_point_restricted_roots(dom):
        raise PreconditionError(f"{L} is not contained in the fixed points of {dom}")
    realizers = chi.realizers()
    if average:
        realizers = [gamma_average(X) for X in realizers]
    elif not all(X.is_gamma_fixed() for X in realizers):
        raise PreconditionError("restriction to the fixed-point group needs Gamma-fixed realizers")
    return make_character(L, realizers, chi.tail)


def chars_equal_mod(a: QuasiCharacter, b: QuasiCharacter, s, strict_tail: bool = False) -> bool:
    """True iff a and b agree on the s+ filtration subgroup."""
    if a.domain != b.domain:
        raise PreconditionError("characters on different domains")
    q = char_mul(a, char_inv(b))
    if strict_tail and q.tail:
        return False
    return char_depth(q) <= s


def pairing(X: DualElement, u: DualElement) -> FieldElement:
    """sum_k X_k u_k; for rational X and u this lies in the base field.

    The sum over the coordinates of one Galois orbit is the trace from the
    orbit's field of definition, so no further trace is applied.
    """
    total = FieldElement.zero(X.frame.desc)
    for x, y in zip(X.coords, u.coords):
        if any(x.nums) and any(y.nums):
            total = total + x * y
    return total


def evaluate(chi: QuasiCharacter, u: DualElement) -> CharValue:
    """Value on the group element attached to the Lie algebra element u."""
    if u.is_zero():
        return CharValue(Fraction(0))
    d = u.min_val()
    if d <= char_depth(chi) / 2:
        raise LinearRegimeError(f"argument depth {d} is not above half the character depth {char_depth(chi)}")
    if isinstance(chi.domain, FixedLevi) and not u.is_gamma_fixed():
        raise PreconditionError("argument does not lie in the fixed-point Lie algebra")
    total = Fraction(0)
    for _, X in chi.levels:
        total += psi_value(pairing(X, u))
    return CharValue(total % 1)


def canonical_char_from_realizer(L: LeviLike, r, X: DualElement) -> QuasiCharacter:
    if not L.is_central(X):
        raise PreconditionError(f"realizer is not central for {L}")
    if X.depth() != r:
        raise PreconditionError(f"realizer depth {X.depth()} differs from {r}")
    return QuasiCharacter(L, ((Fraction(r), X),))


def pairing_value(X: DualElement, u: DualElement) -> Fraction:
    return base_rational(pairing(X, u))
