"""Command-line driver: load a scenario, run one command per case, report."""
from __future__ import annotations

import argparse
import json
import sys
import time
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable

from .characters import char_depth
from .datum import (
    CharacterDatum,
    check_gamma_stable,
    refactorization_defects,
    restrict_datum,
    theta_agreement,
    validate_datum,
)
from .errors import InternalError, LeviLiftError
from .lifting import (
    ChoiceStrategy,
    LiftResult,
    lift_datum,
    lift_single,
    product_identity_holds,
    replay_roundtrip,
    step_bound,
    verify_lift,
)
from .root_datum import fixed_levi_equals, is_generic
from .scenario import Case, Scenario, dump_datum, dump_levi, load_scenario, rational_str

COMMANDS = ("validate", "lift", "lift-single", "restrict", "roundtrip", "check-refactor", "eval-theta")
EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2
DEFAULT_SAMPLES = 200


class CaseFailure(Exception):
    """A case could not be run because its scenario lacks something."""


def _need(datum: CharacterDatum | None, what: str, side: str | None = None) -> CharacterDatum:
    if datum is None:
        raise CaseFailure(f"case has no {what}")
    if side is not None and datum.side != side:
        raise CaseFailure(f"{what} must be a datum for the {'ambient' if side == 'G' else 'fixed-point'} group")
    return datum


def _stability(sigma: CharacterDatum) -> tuple[bool, Any]:
    stab = check_gamma_stable(sigma)
    wit = None
    if stab.witness is not None:
        wit = {k: (rational_str(v) if isinstance(v, Fraction) else v) for k, v in stab.witness.items()}
    return stab.ok, wit


def _steps(result: LiftResult) -> list[dict]:
    out = []
    for rec in result.steps:
        out.append(
            {
                "step": rec.index,
                "case": rec.case,
                "ambient": dump_levi(rec.ambient),
                "levi": dump_levi(rec.levi),
                "depth": rational_str(rec.t),
                "next_depth": rational_str(rec.t_next),
                "generic": is_generic(rec.x_sharp, rec.t, rec.levi, rec.ambient),
                "overridden": rec.overridden,
            }
        )
    return out


def _safe_verify(delta: CharacterDatum, result: LiftResult, base: Fraction) -> dict[str, bool]:
    try:
        return verify_lift(delta, result, base)
    except LeviLiftError:
        checks = {"validate": validate_datum(result.sigma).ok}
        checks["gamma_stable"] = check_gamma_stable(result.sigma).ok
        checks["refactorization"] = False
        return checks


# -- commands ---------------------------------------------------------------------


def cmd_validate(sc: Scenario, case: Case, args) -> dict:
    sigma = _need(case.datum, "datum")
    rep = validate_datum(sigma)
    bad = rep.conditions()
    checks = {c: c not in bad for c in ("shape", "CD1", "CD2", "CD3", "CD4")}
    out: dict[str, Any] = {
        "side": sigma.side,
        "violations": [{"condition": v.condition, "index": v.index, "message": v.message} for v in rep.violations],
    }
    if sigma.side == "G" and rep.ok:
        checks["gamma_stable"], out["witness"] = _stability(sigma)
    out["checks"] = checks
    return out


def cmd_lift(sc: Scenario, case: Case, args) -> dict:
    delta = _need(case.datum, "datum", "H")
    base = _target(case, args)
    strategy = _strategy(sc, args, case)
    result = lift_datum(delta, strategy, base)
    checks = _safe_verify(delta, result, base)
    return {
        "checks": checks,
        "sigma": dump_datum(result.sigma),
        "levi_chain": [dump_levi(L) for L in result.sigma.levis],
        "runs": [[dump_levi(L) for L in r.sigma.levis] for r in result.runs],
        "steps": _steps(result),
        "correction_depth": rational_str(char_depth(result.correction)),
    }


def cmd_lift_single(sc: Scenario, case: Case, args) -> dict:
    delta = _need(case.datum, "datum", "H")
    if len(delta.levis) != 1:
        raise CaseFailure("lift-single expects a datum with one character")
    s = _target(case, args)
    H0, xi = delta.levis[0], delta.chars[0]
    result = lift_single(H0, delta.ambient, xi, s, None, _strategy(sc, args, case))  # type: ignore[arg-type]
    sigma = result.sigma
    t = char_depth(xi)
    bound = step_bound(sc.desc.e, t)
    checks = {
        "validate": validate_datum(sigma).ok,
        "gamma_stable": check_gamma_stable(sigma).ok,
        "product_identity": product_identity_holds(result),
        "fixed_points": all(fixed_levi_equals(L, H0) for L in sigma.levis),  # type: ignore[arg-type]
        "correction_depth": char_depth(result.correction) <= s,
        "step_bound": len(result.steps) <= bound,
    }
    return {
        "checks": checks,
        "sigma": dump_datum(sigma),
        "steps": _steps(result),
        "step_count": len(result.steps),
        "step_bound": bound,
        "correction_depth": rational_str(char_depth(result.correction)),
    }


def cmd_restrict(sc: Scenario, case: Case, args) -> dict:
    sigma = _need(case.datum, "datum", "G")
    ok, wit = _stability(sigma)
    if not ok:
        return {"checks": {"gamma_stable": False}, "witness": wit}
    names = {k: v for k, v in sc.h_levis.items()}
    delta = restrict_datum(sigma, names)
    return {"checks": {"gamma_stable": True, "validate": validate_datum(delta).ok}, "restricted": dump_datum(delta)}


def cmd_roundtrip(sc: Scenario, case: Case, args) -> dict:
    datum = _need(case.datum, "datum")
    out: dict[str, Any] = {}
    if datum.side == "H":
        sigma = lift_datum(datum).sigma
        out["lifted"] = True
    else:
        sigma = datum
        out["lifted"] = False
    same, res = replay_roundtrip(sigma)
    out["checks"] = {"roundtrip": same, "trivial_correction": not res.correction.levels}
    out["levi_chain"] = [dump_levi(L) for L in sigma.levis]
    return out


def cmd_check_refactor(sc: Scenario, case: Case, args) -> dict:
    a = _need(case.datum, "datum")
    b = _need(case.datum2, "datum2")
    defects = refactorization_defects(a, b, _target(case, args))
    return {
        "checks": {"refactorization": not defects},
        "defects": [{"index": i, "depth": rational_str(d), "bound": rational_str(bd)} for i, d, bd in defects],
    }


def cmd_eval_theta(sc: Scenario, case: Case, args) -> dict:
    delta = _need(case.datum, "datum")
    samples = args.samples if args.samples is not None else int(sc.options.get("samples", DEFAULT_SAMPLES))
    seed = args.seed if args.seed is not None else int(sc.options.get("seed", 0))
    if case.datum2 is not None:
        other = case.datum2
        compared = "datum2"
    elif delta.side == "H":
        other = lift_datum(delta).sigma
        compared = "lift"
    else:
        raise CaseFailure("eval-theta needs a fixed-point datum or a second datum")
    cmp = theta_agreement(delta, other, samples, seed)
    return {
        "checks": {"theta_agreement": cmp.discrepancies == 0},
        "compared_with": compared,
        "samples": cmp.samples,
        "seed": seed,
        "nontrivial_values": cmp.nontrivial,
        "discrepancies": cmp.discrepancies,
        "max_discrepancy": rational_str(cmp.max_discrepancy),
    }


HANDLERS: dict[str, Callable[[Scenario, Case, argparse.Namespace], dict]] = {
    "validate": cmd_validate,
    "lift": cmd_lift,
    "lift-single": cmd_lift_single,
    "restrict": cmd_restrict,
    "roundtrip": cmd_roundtrip,
    "check-refactor": cmd_check_refactor,
    "eval-theta": cmd_eval_theta,
}


def _target(case: Case, args) -> Fraction:
    if args.target_depth is not None:
        return Fraction(args.target_depth)
    return case.target_depth if case.target_depth is not None else Fraction(0)


def _strategy(sc: Scenario, args, case: Case) -> ChoiceStrategy:
    if not args.strategy:
        if "strategy" in case.extra:
            return sc.parse_strategy(case.extra["strategy"])
        return ChoiceStrategy()
    try:
        obj = json.loads(Path(args.strategy).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise CaseFailure(f"cannot read strategy file: {exc}") from exc
    return sc.parse_strategy(obj)


def run_case(sc: Scenario, case: Case, command: str, args) -> tuple[dict, int]:
    try:
        body = HANDLERS[command](sc, case, args)
    except InternalError as exc:
        return {"status": "fail", "error": {"type": type(exc).__name__, "message": str(exc)}}, EXIT_FAIL
    except (LeviLiftError, CaseFailure) as exc:
        return {"status": "error", "error": {"type": type(exc).__name__, "message": str(exc)}}, EXIT_INPUT
    ok = all(body["checks"].values())
    return {"status": "pass" if ok else "fail", **body}, EXIT_OK if ok else EXIT_FAIL


def run(command: str, args) -> tuple[dict, int]:
    try:
        sc = load_scenario(args.scenario)
    except LeviLiftError as exc:
        return {"command": command, "error": {"type": type(exc).__name__, "message": str(exc)}}, EXIT_INPUT
    cases = []
    code = EXIT_OK
    for case in sc.cases:
        if command not in case.extra.get("commands", COMMANDS):
            continue
        rep, c = run_case(sc, case, command, args)
        cases.append({"name": case.name, **rep})
        code = max(code, c)
    return {"command": command, "scenario": sc.name, "cases": cases, "pass": code == EXIT_OK}, code


def _text(report: dict, elapsed: float) -> str:
    lines = [f"{report['command']} {report.get('scenario', '?')}"]
    if "error" in report:
        lines.append(f"  ERROR {report['error']['type']}: {report['error']['message']}")
    for case in report.get("cases", []):
        lines.append(f"  [{case['status'].upper()}] {case['name']}")
        for name, ok in case.get("checks", {}).items():
            lines.append(f"      {name}: {'ok' if ok else 'FAILED'}")
        if "error" in case:
            lines.append(f"      {case['error']['type']}: {case['error']['message']}")
        if "levi_chain" in case:
            lines.append(f"      levis: {' < '.join(json.dumps(L) for L in case['levi_chain'])}")
        if "witness" in case and case["witness"]:
            lines.append(f"      witness: {json.dumps(case['witness'])}")
        if "discrepancies" in case:
            lines.append(f"      samples {case['samples']}, discrepancies {case['discrepancies']}")
    lines.append(f"  elapsed {elapsed:.2f}s")
    return "\n".join(lines)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="levi-lift", description="Validate, restrict and lift character data.")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--scenario", required=True, help="scenario JSON file")
    ap.add_argument("--target-depth", help="lift down to this depth (rational, default 0)")
    ap.add_argument("--strategy", help="JSON list of per-step overrides")
    ap.add_argument("--samples", type=int, help="number of theta test arguments")
    ap.add_argument("--seed", type=int, help="seed for test arguments")
    ap.add_argument("--output", choices=("json", "text"), default="json")
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.target_depth is not None:
        try:
            Fraction(args.target_depth)
        except (ValueError, ZeroDivisionError):
            print(f"levi-lift: bad target depth {args.target_depth!r}", file=sys.stderr)
            return EXIT_INPUT
    start = time.perf_counter()
    report, code = run(args.command, args)
    if args.output == "json":
        print(json.dumps(report, indent=2, sort_keys=True))
    else:
        print(_text(report, time.perf_counter() - start))
    return code


if __name__ == "__main__":
    sys.exit(main())
