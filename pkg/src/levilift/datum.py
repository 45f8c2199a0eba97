"""Character data: validation, Gamma-stability, restriction and refactorization."""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

from .characters import (
    CharValue,
    QuasiCharacter,
    char_depth,
    char_inv,
    char_mul,
    char_product,
    evaluate,
    pairing,
    realize_at_top,
    realizer_above,
    restrict_to_group,
)
from .errors import InputError, LinearRegimeError, PreconditionError
from .local_field import FieldElement, psi_value
from .root_datum import DualElement, FixedLevi, LeviLike, TwistedLevi, fixed_levi, gamma_average, is_generic

STANDARD_POINT = "standard"


@dataclass(frozen=True)
class CharacterDatum:
    """Levis G^0 < ... < G^d inside an ambient group, depths and characters."""

    levis: tuple[LeviLike, ...]
    depths: tuple[Fraction, ...]
    chars: tuple[QuasiCharacter, ...]
    ambient: LeviLike
    point: str = STANDARD_POINT

    @property
    def side(self) -> str:
        return "G" if isinstance(self.ambient, TwistedLevi) else "H"

    @property
    def frame(self):
        return self.ambient.frame

    def half_depth(self, i: int) -> Fraction:
        return Fraction(self.depths[i]) / 2

    def successor(self, i: int) -> LeviLike:
        return self.levis[i + 1] if i + 1 < len(self.levis) else self.ambient


@dataclass(frozen=True)
class Violation:
    condition: str
    index: int | None
    message: str


@dataclass
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def conditions(self) -> set[str]:
        return {v.condition for v in self.violations}


def validate_datum(sigma: CharacterDatum) -> ValidationReport:
    rep = ValidationReport()
    bad = rep.violations.append
    n = len(sigma.levis)
    if n == 0 or len(sigma.depths) != n or len(sigma.chars) != n:
        bad(Violation("shape", None, "levis, depths and chars must be nonempty and of equal length"))
        return rep
    for i in range(n):
        nxt = sigma.successor(i)
        if type(nxt) is not type(sigma.levis[i]):
            bad(Violation("CD1", i, "Levis on different sides"))
            continue
        if not nxt.contains(sigma.levis[i]):
            bad(Violation("CD1", i, f"{sigma.levis[i]} is not contained in {nxt}"))
        elif i + 1 < n and nxt == sigma.levis[i]:
            bad(Violation("CD1", i, "containment must be strict below the last Levi"))
    if sigma.point != STANDARD_POINT:
        bad(Violation("CD2", None, f"unknown point tag {sigma.point!r}"))
    for i, r in enumerate(sigma.depths):
        if r <= 0:
            bad(Violation("CD3", i, f"depth {r} is not positive"))
        if i and r <= sigma.depths[i - 1]:
            bad(Violation("CD3", i, f"depth {r} does not exceed {sigma.depths[i - 1]}"))
    for i, chi in enumerate(sigma.chars):
        r = sigma.depths[i]
        if chi.domain != sigma.levis[i]:
            bad(Violation("CD4", i, "character domain differs from the Levi"))
            continue
        if char_depth(chi) != r:
            bad(Violation("CD4", i, f"character depth {char_depth(chi)} differs from {r}"))
            continue
        _, X = realize_at_top(chi)
        if not is_generic(X, r, sigma.levis[i], sigma.successor(i)):
            bad(Violation("CD4", i, f"top realizer is not generic of depth {r} relative to {sigma.successor(i)}"))
    return rep


@dataclass(frozen=True)
class StabilityResult:
    ok: bool
    witness: dict | None = None
    point: str = "asserted: the standard point is Gamma-fixed"


def check_gamma_stable(sigma: CharacterDatum) -> StabilityResult:
    if sigma.side != "G":
        raise PreconditionError("stability is checked on data for the ambient group")
    frame = sigma.frame
    for i, L in enumerate(list(sigma.levis) + [sigma.ambient]):
        if not L.is_gamma_stable():  # type: ignore[attr-defined]
            return StabilityResult(False, {"kind": "levi", "index": i, "levi": L.one_based()})  # type: ignore[attr-defined]
    for i, chi in enumerate(sigma.chars):
        s = sigma.half_depth(i)
        X = realizer_above(chi, s)
        for gi, g in enumerate(frame.gamma_generators):
            diff = X.gamma_act(g) - X
            if not diff.is_zero() and diff.depth() > s:
                return StabilityResult(False, {"kind": "realizer", "index": i, "generator": gi, "depth": diff.depth()})
    return StabilityResult(True)


def restrict_datum(sigma: CharacterDatum, names: dict | None = None) -> CharacterDatum:
    """The fixed-point datum, collapsing runs of Levis with equal fixed points."""
    stab = check_gamma_stable(sigma)
    if not stab.ok:
        raise PreconditionError(f"datum is not Gamma-stable: {stab.witness}")
    names = names or {}

    def fx(L: TwistedLevi) -> FixedLevi:
        H = fixed_levi(L)
        for name, other in names.items():
            if other == H:
                return FixedLevi(L.frame, H.roots, name)
        return H

    levis: list[FixedLevi] = []
    depths: list[Fraction] = []
    chars: list[QuasiCharacter] = []
    for L, r, chi in zip(sigma.levis, sigma.depths, sigma.chars):
        H = fx(L)  # type: ignore[arg-type]
        res = restrict_to_group(chi, H, average=True)
        if levis and levis[-1] == H:
            chars[-1] = char_mul(chars[-1], res)
            depths[-1] = r
        else:
            levis.append(H)
            depths.append(r)
            chars.append(res)
    return CharacterDatum(tuple(levis), tuple(depths), tuple(chars), fx(sigma.ambient), sigma.point)  # type: ignore[arg-type]


def refactorization_defects(
    sigma: CharacterDatum, other: CharacterDatum, base_depth: Fraction = Fraction(0)
) -> list[tuple[int, Fraction, Fraction]]:
    """(i, depth of Q_i, allowed bound) for every i where Q_i is too deep.

    The bound for i = 0 is base_depth, zero unless the caller lifted only
    down to a positive depth.
    """
    if (
        len(sigma.levis) != len(other.levis)
        or any(a != b for a, b in zip(sigma.levis, other.levis))
        or sigma.point != other.point
        or tuple(sigma.depths) != tuple(other.depths)
    ):
        raise PreconditionError("refactorization compares data with equal Levis, point and depths")
    out = []
    n = len(sigma.levis)
    for i in range(n):
        L = sigma.levis[i]
        parts = [restrict_to_group(char_mul(sigma.chars[j], char_inv(other.chars[j])), L) for j in range(i, n)]
        q = char_product(parts, L)
        bound = sigma.depths[i - 1] if i else Fraction(base_depth)
        if char_depth(q) > bound:
            out.append((i, char_depth(q), bound))
    return out


def check_refactorization(sigma: CharacterDatum, other: CharacterDatum, base_depth: Fraction = Fraction(0)) -> bool:
    return not refactorization_defects(sigma, other, base_depth)


@dataclass(frozen=True)
class GroupDescriptor:
    factors: tuple[tuple[LeviLike, Fraction], ...]


@dataclass(frozen=True)
class ThetaDescriptor:
    summands: tuple[tuple[QuasiCharacter, Fraction], ...]


def group_descriptor(sigma: CharacterDatum) -> GroupDescriptor:
    bounds = [Fraction(0)] + [sigma.half_depth(i) for i in range(len(sigma.levis) - 1)]
    return GroupDescriptor(tuple(zip(sigma.levis, bounds)))


def theta_descriptor(sigma: CharacterDatum) -> ThetaDescriptor:
    return ThetaDescriptor(tuple((chi, sigma.half_depth(i)) for i, chi in enumerate(sigma.chars)))


@dataclass(frozen=True)
class TestArgument:
    """A torus Lie algebra element u with its depth and the factor it is drawn from."""

    __test__ = False

    u: DualElement
    depth: Fraction
    factor: int


def theta_evaluate(sigma: CharacterDatum, arg: TestArgument) -> CharValue:
    """Semisimple character on the group element attached to a torus argument.

    Factors below the declared one act through their realizer on the s_i+
    subgroup.  The others act through the character itself, which is linear
    above half its depth and trivial on the derived group.
    """
    u = arg.u
    if u.is_zero():
        return CharValue(Fraction(0))
    d = u.min_val()
    if d != arg.depth:
        raise InputError(f"declared depth {arg.depth} differs from the actual depth {d}")
    if not 0 <= arg.factor <= len(sigma.levis):
        raise InputError(f"factor index {arg.factor} out of range")
    floor = sigma.half_depth(arg.factor - 1) if arg.factor else Fraction(0)
    if d <= floor:
        raise LinearRegimeError(f"argument of depth {d} does not lie in factor {arg.factor}")
    if sigma.side == "H" and not u.is_gamma_fixed():
        raise InputError("argument is not Gamma-fixed")
    total = Fraction(0)
    for i, chi in enumerate(sigma.chars):
        s = sigma.half_depth(i)
        if i < arg.factor:
            total += psi_value(pairing(realizer_above(chi, s), u))
        elif d > s:
            total += evaluate(chi, u).torsion
        elif not sigma.levis[i].is_derived(u):
            raise LinearRegimeError(f"factor {i} cannot be evaluated at depth {d}")
    return CharValue(total % 1)


def theta_evaluate_auto(sigma: CharacterDatum, u: DualElement) -> CharValue:
    """theta_evaluate with the largest factor index the argument belongs to."""
    d = u.min_val()
    factor = 0
    for j in range(1, len(sigma.levis) + 1):
        if d > sigma.half_depth(j - 1):
            factor = j
    return theta_evaluate(sigma, TestArgument(u, d, factor))


# -- sampling of test arguments -------------------------------------------------


def random_field_element(desc, rng: random.Random, start: int, span: int) -> FieldElement:
    """Random element with digits at pi-positions start .. start + span - 1."""
    digits = [tuple(rng.randrange(desc.p) for _ in range(desc.f)) for _ in range(span)]
    return FieldElement.from_digits(desc, Fraction(start, desc.e), digits)


def random_argument(sigma: CharacterDatum, rng: random.Random, span: int = 3) -> TestArgument:
    """A Gamma-fixed (on the fixed-point side) rational test argument."""
    frame = sigma.frame
    desc = frame.desc
    n_fac = len(sigma.levis)
    for _ in range(1000):
        j = rng.randrange(n_fac + 1)
        floor = sigma.half_depth(j - 1) if j else Fraction(0)
        lo = int(floor * desc.e) + 1
        hi = int((max(sigma.depths) + 1) * desc.e) + 1
        start = rng.randrange(lo, max(lo + 1, hi))
        if j < n_fac:
            pairs = sorted(sigma.levis[j].pairs)
            if not pairs:
                continue
            coords = [FieldElement.zero(desc)] * frame.n
            for a, b in rng.sample(pairs, k=min(len(pairs), 1 + rng.randrange(2))):
                c = random_field_element(desc, rng, start, span)
                coords[a] = coords[a] + c
                coords[b] = coords[b] - c
        else:
            coords = [random_field_element(desc, rng, start, span) for _ in range(frame.n)]
        u = DualElement(frame, frame.galois_average(coords))
        if sigma.side == "H":
            u = gamma_average(u)
        if u.is_zero():
            continue
        d = u.min_val()
        if d <= floor:
            continue
        return TestArgument(u, d, j)
    raise PreconditionError("could not sample a test argument")


def sample_arguments(sigma: CharacterDatum, count: int, seed: int) -> list[TestArgument]:
    rng = random.Random(seed)
    return [random_argument(sigma, rng) for _ in range(count)]


@dataclass(frozen=True)
class ThetaComparison:
    samples: int
    discrepancies: int
    nontrivial: int
    max_discrepancy: Fraction


def theta_agreement(delta: CharacterDatum, other: CharacterDatum, samples: int, seed: int) -> ThetaComparison:
    """Compare two data on pseudo-random arguments drawn for the first one."""
    bad = nonzero = 0
    worst = Fraction(0)
    args = sample_arguments(delta, samples, seed)
    for arg in args:
        v1 = theta_evaluate(delta, arg).torsion
        diff = (v1 - theta_evaluate_auto(other, arg.u).torsion) % 1
        nonzero += v1 != 0
        if diff:
            bad += 1
            worst = max(worst, diff)
    return ThetaComparison(len(args), bad, nonzero, worst)
