"""Lifting character data from the fixed-point group to the ambient group.

One step splits the top realizer of the residual character into a part
killing the roots of a smaller Levi (sharp) and a deeper remainder (flat),
records the character of the smaller Levi realized by the sharp part and
continues with what is left.  Steps are regrouped into runs with a common
Levi, and whole data are lifted top-down with each run's correction folded
into the next entry.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .characters import (
    QuasiCharacter,
    canonical_char_from_realizer,
    char_depth,
    char_inv,
    char_mul,
    char_product,
    chars_equal_mod,
    make_character,
    realize_at_top,
    realizer_above,
    restrict_to_group,
    trivial_char,
)
from .datum import CharacterDatum, check_gamma_stable, check_refactorization, restrict_datum, validate_datum
from .errors import InputError, InternalError, PreconditionError
from .root_datum import (
    DualElement,
    FixedLevi,
    TwistedLevi,
    centralizer_levi,
    fixed_levi_equals,
    gamma_average,
    is_generic,
    sharp_flat,
)


@dataclass(frozen=True)
class StepRecord:
    index: int
    case: str
    ambient: TwistedLevi
    levi: TwistedLevi
    t: Fraction
    x_sharp: DualElement
    phi: QuasiCharacter
    tau: QuasiCharacter
    t_next: Fraction
    overridden: bool = False


@dataclass(frozen=True)
class Choice:
    """An override: the sharp part and optionally the character's realizers and tail."""

    x_sharp: DualElement
    phi: QuasiCharacter | None = None
    phi_realizers: tuple[DualElement, ...] | None = None
    phi_tail: tuple[tuple[str, int], ...] = ()


class ChoiceStrategy:
    """Canonical choices: class-average sharp part, single-level character."""

    mode = "canonical"

    def choose(self, step: int, M: TwistedLevi, tau: QuasiCharacter, t: Fraction) -> Choice | None:
        return None


class ReplayStrategy(ChoiceStrategy):
    """Replays a given Gamma-stable datum, deepest character first."""

    mode = "replay"

    def __init__(self, sigma: CharacterDatum):
        self.sigma = sigma

    def choose(self, step, M, tau, t):
        k = len(self.sigma.chars) - 1 - step
        if k < 0:
            raise PreconditionError("replay ran out of characters")
        chi = self.sigma.chars[k]
        x = gamma_average(realizer_above(chi, self.sigma.half_depth(k)))
        return Choice(x, chi)


class ScriptedStrategy(ChoiceStrategy):
    """Per-step overrides; steps without an entry use the canonical choice."""

    mode = "scripted"

    def __init__(self, overrides: dict[int, Choice]):
        self.overrides = dict(overrides)

    def choose(self, step, M, tau, t):
        return self.overrides.get(step)


@dataclass(frozen=True)
class LiftResult:
    sigma: CharacterDatum
    correction: QuasiCharacter
    steps: tuple[StepRecord, ...]
    xi: QuasiCharacter | None = None
    runs: tuple["LiftResult", ...] = field(default=())


def _validate_choice(choice: Choice, M: TwistedLevi, X: DualElement, t: Fraction) -> None:
    xs = choice.x_sharp
    if xs.depth() != t:
        raise PreconditionError(f"chosen sharp part has depth {xs.depth()}, expected {t}")
    if not xs.is_rational():
        raise PreconditionError("chosen sharp part is not rational")
    if not xs.is_gamma_fixed():
        raise PreconditionError("chosen sharp part is not Gamma-fixed")
    diff = xs - X
    if not diff.is_zero() and diff.depth() >= t:
        raise PreconditionError("chosen sharp part does not realize the residual at its depth")
    if not is_generic(xs, t, centralizer_levi(M, xs), M):
        raise PreconditionError("chosen sharp part is not generic")


def _validate_phi(phi: QuasiCharacter, Mp: TwistedLevi, M: TwistedLevi, xs: DualElement, t: Fraction) -> None:
    if phi.domain != Mp:
        raise PreconditionError(f"chosen character lives on {phi.domain}, expected {Mp}")
    if char_depth(phi) != t:
        raise PreconditionError(f"chosen character has depth {char_depth(phi)}, expected {t}")
    diff = realizer_above(phi, t / 2) - xs
    if not diff.is_zero() and diff.depth() > t / 2:
        raise PreconditionError("chosen character is not realized by the sharp part")
    if not is_generic(realize_at_top(phi)[1], t, Mp, M):
        raise PreconditionError("chosen character is not generic")


def single_step(
    M: TwistedLevi,
    hprime: FixedLevi | None,
    tau: QuasiCharacter,
    t: Fraction,
    strategy: ChoiceStrategy | None = None,
    step: int = 0,
    case: str = "b",
) -> StepRecord:
    """One sharp/flat step; hprime=None skips the fixed-point comparison."""
    strategy = strategy or ChoiceStrategy()
    r, X = realize_at_top(tau)
    if r != t:
        raise PreconditionError(f"residual has depth {r}, expected {t}")
    if hprime is not None and not X.is_gamma_fixed():
        X = gamma_average(X)
    if hprime is not None and case == "b" and not fixed_levi_equals(M, hprime):
        raise PreconditionError(f"fixed points of {M} differ from the target subgroup")
    choice = strategy.choose(step, M, tau, t)
    if choice is None:
        xs, _ = sharp_flat(M, X, t)
    else:
        _validate_choice(choice, M, X, t)
        xs = choice.x_sharp
    Mp = centralizer_levi(M, xs)
    if hprime is not None and not fixed_levi_equals(Mp, hprime):
        raise InternalError(f"fixed points of {Mp} differ from the target subgroup")
    if choice is not None and (choice.phi is not None or choice.phi_realizers is not None):
        if choice.phi is not None:
            phi = choice.phi
        else:
            try:
                phi = make_character(Mp, choice.phi_realizers, choice.phi_tail)
            except InputError as exc:
                raise PreconditionError(f"chosen character is invalid: {exc}") from exc
        _validate_phi(phi, Mp, M, xs, t)
    else:
        phi = canonical_char_from_realizer(Mp, t, xs)
    restricted = restrict_to_group(phi, tau.domain, average=True)
    tau_next = char_mul(tau, char_inv(restricted))
    t_next = char_depth(tau_next)
    if t_next >= t:
        raise InternalError(f"residual depth did not drop below {t}")
    return StepRecord(step, case, M, Mp, t, xs, phi, tau_next, t_next, choice is not None)


def step_bound(e: int, t: Fraction) -> int:
    """Depths lie in (1/e)Z and strictly decrease from t, so at most e*t steps."""
    return math.floor(e * t)


def _regroup(steps: Sequence[StepRecord], ambient: TwistedLevi) -> CharacterDatum:
    runs: list[list[StepRecord]] = []
    for rec in steps:
        if runs and runs[-1][0].levi == rec.levi:
            runs[-1].append(rec)
        else:
            runs.append([rec])
    runs.reverse()
    levis = tuple(run[0].levi for run in runs)
    depths = tuple(run[0].t for run in runs)
    chars = tuple(char_product((rec.phi for rec in run), run[0].levi) for run in runs)
    return CharacterDatum(levis, depths, chars, ambient)


def _loop(M0, hprime, xi, s, strategy, step_offset, first_case):
    t = char_depth(xi)
    bound = step_bound(M0.frame.desc.e, t)
    steps: list[StepRecord] = []
    M, tau, case = M0, xi, first_case
    while char_depth(tau) > s:
        if len(steps) >= bound:
            raise InternalError("lifting loop exceeded its step bound")
        rec = single_step(M, hprime, tau, char_depth(tau), strategy, step_offset + len(steps), case)
        steps.append(rec)
        M, tau, case = rec.levi, rec.tau, "b"
    return steps, tau


def lift_single(
    hprime: FixedLevi,
    hambient: FixedLevi,
    xi: QuasiCharacter,
    s: Fraction = Fraction(0),
    ambient: TwistedLevi | None = None,
    strategy: ChoiceStrategy | None = None,
    step_offset: int = 0,
) -> LiftResult:
    """Lift one generic character of hprime relative to hambient."""
    ambient = ambient or hprime.frame.full()
    t = char_depth(xi)
    s = Fraction(s)
    if s < 0 or s >= t:
        raise PreconditionError(f"target depth {s} must satisfy 0 <= s < {t}")
    if xi.domain != hprime:
        raise PreconditionError("character does not live on the given subgroup")
    if not hambient.contains(hprime):
        raise PreconditionError("subgroup is not contained in its ambient group")
    if not ambient.is_gamma_stable() or not fixed_levi_equals(ambient, hambient):
        raise PreconditionError(f"fixed points of {ambient} differ from the ambient subgroup")
    _, X = realize_at_top(xi)
    if not X.is_gamma_fixed():
        raise PreconditionError("top realizer is not Gamma-fixed")
    if not is_generic(X, t, hprime, hambient):
        raise PreconditionError("character is not generic for its ambient group")
    steps, tau = _loop(ambient, hprime, xi, s, strategy or ChoiceStrategy(), step_offset, "a")
    sigma = _regroup(steps, ambient)
    return LiftResult(sigma, char_inv(tau), tuple(steps), xi)


def product_identity_holds(result: LiftResult, xi: QuasiCharacter | None = None) -> bool:
    """correction * xi equals the product of the lifted characters on the subgroup.

    Equality is at positive depth: the quotient must have depth at most zero.
    """
    xi = xi if xi is not None else result.xi
    if xi is None:
        raise PreconditionError("no input character recorded")
    H = xi.domain
    lhs = char_mul(result.correction, xi)
    rhs = char_product((restrict_to_group(chi, H, average=True) for chi in result.sigma.chars), H)
    return chars_equal_mod(lhs, rhs, 0)


def lift_datum(delta: CharacterDatum, strategy: ChoiceStrategy | None = None, base_depth: Fraction = Fraction(0)) -> LiftResult:
    """Top-down lift of a fixed-point datum with correction folding."""
    if delta.side != "H":
        raise PreconditionError("lifting expects a datum for the fixed-point group")
    rep = validate_datum(delta)
    if not rep.ok:
        raise PreconditionError(f"input datum is invalid: {[v.message for v in rep.violations]}")
    base_depth = Fraction(base_depth)
    if base_depth < 0 or base_depth >= delta.depths[0]:
        raise PreconditionError(f"base depth {base_depth} must lie in [0, {delta.depths[0]})")
    strategy = strategy or ChoiceStrategy()
    frame = delta.frame
    ambient = frame.full()
    n = len(delta.levis)
    runs: list[LiftResult] = []
    correction: QuasiCharacter | None = None
    offset = 0
    for j in range(n - 1, -1, -1):
        Hj = delta.levis[j]
        xi = delta.chars[j]
        if correction is not None:
            xi = char_mul(xi, char_inv(restrict_to_group(correction, Hj)))
        s = delta.depths[j - 1] if j else base_depth
        res = lift_single(Hj, delta.successor(j), xi, s, ambient, strategy, offset)  # type: ignore[arg-type]
        offset += len(res.steps)
        runs.insert(0, res)
        ambient = res.sigma.levis[0]  # type: ignore[assignment]
        correction = res.correction
    levis = tuple(L for r in runs for L in r.sigma.levis)
    depths = tuple(d for r in runs for d in r.sigma.depths)
    chars = tuple(c for r in runs for c in r.sigma.chars)
    sigma = CharacterDatum(levis, depths, chars, frame.full(), delta.point)
    steps = tuple(st for r in reversed(runs) for st in r.steps)
    final = correction if correction is not None else trivial_char(delta.levis[0])
    return LiftResult(sigma, final, steps, None, tuple(runs))


def naive_lift(delta: CharacterDatum) -> list[LiftResult]:
    """Lift every entry on its own inside the full group, ignoring the other entries."""
    frame = delta.frame
    return [lift_single(H, delta.ambient, xi, Fraction(0), frame.full()) for H, xi in zip(delta.levis, delta.chars)]  # type: ignore[arg-type]


def replay_roundtrip(sigma: CharacterDatum) -> tuple[bool, LiftResult]:
    rep = validate_datum(sigma)
    if not rep.ok:
        raise PreconditionError(f"datum is invalid: {[v.message for v in rep.violations]}")
    stab = check_gamma_stable(sigma)
    if not stab.ok:
        raise PreconditionError(f"datum is not Gamma-stable: {stab.witness}")
    delta = restrict_datum(sigma)
    res = lift_datum(delta, ReplayStrategy(sigma))
    out = res.sigma
    same = (
        out.levis == sigma.levis
        and out.depths == tuple(sigma.depths)
        and all(a.levels == b.levels for a, b in zip(out.chars, sigma.chars))
        and not res.correction.levels
    )
    return same, res


def howe_factorization(torus: TwistedLevi, theta: QuasiCharacter, ambient: TwistedLevi | None = None) -> CharacterDatum:
    """Factor a torus character through centralizers of its realizers, ignoring Gamma."""
    ambient = ambient or torus.frame.full()
    if theta.domain != torus:
        raise PreconditionError("character must live on the torus")
    steps, _ = _loop(ambient, None, theta, Fraction(0), ChoiceStrategy(), 0, "b")
    return _regroup(steps, ambient)


def verify_lift(delta: CharacterDatum, result: LiftResult, base_depth: Fraction = Fraction(0)) -> dict[str, bool]:
    sigma = result.sigma
    checks = {"validate": validate_datum(sigma).ok}
    stab = check_gamma_stable(sigma)
    checks["gamma_stable"] = stab.ok
    if stab.ok:
        checks["refactorization"] = check_refactorization(restrict_datum(sigma), delta, base_depth)
    else:
        checks["refactorization"] = False
    runs = result.runs or (result,)
    checks["product_identity"] = all(product_identity_holds(r) for r in runs)
    return checks
