"""Regenerate the scenario corpus and its expected-report fixtures.

Run from the repository root:  python corpus/build_corpus.py
Scenario files are written next to this script; fixtures go to expected/.
"""
from __future__ import annotations

import contextlib
import io
import json
from fractions import Fraction
from pathlib import Path

from levilift.cli import main as cli_main
from levilift.lifting import howe_factorization
from levilift.local_field import FieldDesc, FieldElement, GaloisElement, apply_galois
from levilift.root_datum import DualElement, GammaElement, TorusFrame
from levilift.characters import make_character
from levilift.scenario import dump_datum, dump_dual

HERE = Path(__file__).resolve().parent
INNER_GAMMA = [{"perm": [1, 2, 3, 4], "sign": 1, "root_signs": [1, 1, -1, -1]}]


def write(name: str, obj: dict) -> None:
    (HERE / f"{name}.json").write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def char(domain: str, *realizers: DualElement) -> dict:
    return {"domain": domain, "levels": [{"depth": str(X.depth()), "realizer": dump_dual(X)} for X in realizers], "tail": {}}


def eg_weird() -> None:
    """GL4 over a split frame, H = GL2 x GL2 and a single character of H."""
    E = FieldDesc(5, 1, 1, (0, 1))
    fr = TorusFrame(E, 4, None, None, [GammaElement((0, 1, 2, 3), 1, GaloisElement(), (1, 1, -1, -1))])
    F = lambda q: FieldElement.from_rational(E, q)  # noqa: E731
    a, b = F(Fraction(3, 25)), F(Fraction(4, 25))
    equal = DualElement(fr, [a, a, a, a])
    apart = DualElement(fr, [a, a, b, b])
    mk = lambda X: {"side": "H", "levis": ["H"], "depths": ["2"], "chars": [char("H", X)]}  # noqa: E731
    write(
        "eg_weird",
        {
            "name": "eg_weird",
            "description": "GL4 with fixed points GL2 x GL2; chi0 = chi1 versus chi0/chi1 of full depth",
            "field": {"p": 5, "f": 1, "e": 1, "residue_modulus": [0, 1], "precision": 16},
            "frame": {"n": 4},
            "gamma": INNER_GAMMA,
            "levis": {"HxG": [[1, 2], [3, 4]]},
            "cases": [
                {"name": "equal_characters", "datum": mk(equal)},
                {"name": "distinct_characters", "datum": mk(apart)},
            ],
            "options": {"samples": 200, "seed": 1},
        },
    )


def _ramified():
    E = FieldDesc(5, 1, 2, (0, 1))
    fr = TorusFrame(E, 4, None, (1, 0, 3, 2), [GammaElement((0, 1, 2, 3), 1, GaloisElement(), (1, 1, -1, -1))])
    pi = lambda m: FieldElement.pi_power(E, m)  # noqa: E731
    tau = lambda x: apply_galois(GaloisElement(0, 1), x)  # noqa: E731
    pair = lambda x, y: DualElement(fr, [x, tau(x), y, tau(y)])  # noqa: E731
    return E, fr, pi, pair


RAMIFIED_HEADER = {
    "field": {"p": 5, "f": 1, "e": 2, "residue_modulus": [0, 1], "precision": 16},
    "frame": {"n": 4, "twist": [2, 1, 4, 3]},
    "gamma": INNER_GAMMA,
    "h_levis": {"TxT": {"fixed_of": "T"}},
}


def eg_pindstep() -> None:
    """Elliptic tori in each GL2 factor over a ramified quadratic field; three regimes."""
    E, fr, pi, pair = _ramified()
    x = pi(-5) + pi(-4) * 2
    y = pi(-5) * 3 + pi(-4)
    same = pair(x, x + pi(-3))
    conj = pair(x, apply_galois(GaloisElement(0, 1), x) + pi(-3) * 2)
    other = pair(x, y)
    mk = lambda X: {"side": "H", "levis": ["TxT"], "depths": ["5/2"], "chars": [char("TxT", X)]}  # noqa: E731
    write(
        "eg_pindstep",
        {
            "name": "eg_pindstep",
            "description": "xi = eta (x) eta' on T x T inside GL2 x GL2; eta = eta', eta' = conjugate, unrelated",
            **RAMIFIED_HEADER,
            "cases": [
                {"name": "equal_at_top", "datum": mk(same), "expect_levi": [[1, 3], [2, 4]]},
                {"name": "conjugate_at_top", "datum": mk(conj), "expect_levi": [[1, 4], [2, 3]]},
                {"name": "unrelated", "datum": mk(other), "expect_levi": [[1], [2], [3], [4]]},
            ],
            "options": {"samples": 200, "seed": 2},
        },
    )


def eg_tliftone() -> None:
    """First regime continued: a repeated step in the same Levi, then the torus."""
    E, fr, pi, pair = _ramified()
    x = pi(-5)
    eps = pi(-3) * 2
    delta = pi(-1)
    X = pair(x + eps, x + eps + delta)
    sharp = pair(x, x)
    write(
        "eg_tliftone",
        {
            "name": "eg_tliftone",
            "description": "lift of one character of T x T with a scripted first step, giving two runs",
            **RAMIFIED_HEADER,
            "cases": [
                {
                    "name": "two_runs",
                    "datum": {"side": "H", "levis": ["TxT"], "depths": ["5/2"], "chars": [char("TxT", X)]},
                    "strategy": [{"step": 0, "x_sharp": dump_dual(sharp)}],
                    "commands": ["validate", "lift", "lift-single", "eval-theta"],
                },
                {
                    "name": "canonical",
                    "datum": {"side": "H", "levis": ["TxT"], "depths": ["5/2"], "chars": [char("TxT", X)]},
                },
            ],
            "options": {"samples": 200, "seed": 3},
        },
    )


def eg_incompatible() -> None:
    """Two-character datum whose entries lifted separately give incomparable Levis."""
    E = FieldDesc(5, 2, 1, (3, 0, 1))
    fr = TorusFrame(E, 4, (1, 0, 3, 2), None, [GammaElement((0, 1, 2, 3), 1, GaloisElement(), (1, 1, -1, -1))])
    z = FieldElement.generator(E)
    F = lambda q: FieldElement.from_rational(E, q)  # noqa: E731
    bar = lambda v: apply_galois(GaloisElement(1), v)  # noqa: E731
    x = (z + 2) * Fraction(1, 5)
    X0 = DualElement(fr, [x, bar(x), x, bar(x)])
    a = F(Fraction(1, 125))
    b = F(Fraction(1, 125)) + F(Fraction(1, 25))
    X1 = DualElement(fr, [a, a, b, b])
    datum = {"side": "H", "levis": ["TxT", "H"], "depths": ["1", "3"], "chars": [char("TxT", X0), char("H", X1)]}
    write(
        "eg_incompatible",
        {
            "name": "eg_incompatible",
            "description": "unramified quadratic tori in GL2 x GL2; depths 1 < 3 with the depth-2 part of xi1 splitting H",
            "field": {"p": 5, "f": 2, "e": 1, "residue_modulus": [3, 0, 1], "precision": 16},
            "frame": {"n": 4, "frobenius": [2, 1, 4, 3]},
            "gamma": INNER_GAMMA,
            "h_levis": {"TxT": {"fixed_of": "T"}},
            "cases": [{"name": "two_characters", "datum": datum}],
            "options": {"samples": 200, "seed": 4},
        },
    )


def sp4_nonstable() -> None:
    """Symplectic fixed points: Howe factorization of an extension versus the lift."""
    E = FieldDesc(5, 2, 1, (3, 0, 1))
    gamma = GammaElement((2, 3, 0, 1), -1, GaloisElement(), ())
    fr = TorusFrame(E, 4, (1, 0, 3, 2), None, [gamma])
    z = FieldElement.generator(E)
    F = lambda q: FieldElement.from_rational(E, q)  # noqa: E731
    bar = lambda v: apply_galois(GaloisElement(1), v)  # noqa: E731
    y = (z + 1) * Fraction(1, 25)
    c = F(Fraction(3, 25))
    T = fr.torus()
    theta_T = make_character(T, [DualElement(fr, [y, bar(y), c, c])])
    howe = howe_factorization(T, theta_T)
    w = (y - c) * Fraction(1, 2)
    theta_S = DualElement(fr, [w, bar(w), -w, -bar(w)])
    write(
        "sp4_nonstable",
        {
            "name": "sp4_nonstable",
            "description": "Sp4 as fixed points; the Howe route passes through T0 x GL2, the lift stays on T",
            "field": {"p": 5, "f": 2, "e": 1, "residue_modulus": [3, 0, 1], "precision": 16},
            "frame": {"n": 4, "frobenius": [2, 1, 4, 3]},
            "gamma": [{"perm": [3, 4, 1, 2], "sign": -1}],
            "levis": {"T0xGL2": [[1], [2], [3, 4]]},
            "h_levis": {"S": {"fixed_of": "T"}},
            "cases": [
                {"name": "howe_route", "datum": dump_datum(howe), "commands": ["validate", "restrict"]},
                {
                    "name": "lift_of_theta_S",
                    "datum": {"side": "H", "levis": ["S"], "depths": ["2"], "chars": [char("S", theta_S)]},
                    "commands": ["validate", "lift", "lift-single", "roundtrip", "eval-theta"],
                },
            ],
            "options": {"samples": 200, "seed": 5},
        },
    )


FIXTURES = {
    "eg_weird": ["validate", "lift", "roundtrip", "eval-theta"],
    "eg_pindstep": ["validate", "lift", "lift-single"],
    "eg_tliftone": ["lift", "lift-single"],
    "eg_incompatible": ["validate", "lift", "roundtrip", "eval-theta"],
    "sp4_nonstable": ["validate", "restrict", "lift-single"],
}


def freeze_fixtures() -> None:
    out_dir = HERE / "expected"
    out_dir.mkdir(exist_ok=True)
    for name, commands in FIXTURES.items():
        for cmd in commands:
            buf = io.StringIO()
            with contextlib.redirect_stdout(buf):
                code = cli_main([cmd, "--scenario", str(HERE / f"{name}.json")])
            report = json.loads(buf.getvalue())
            report["exit_code"] = code
            (out_dir / f"{name}.{cmd}.json").write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")


if __name__ == "__main__":
    eg_weird()
    eg_pindstep()
    eg_tliftone()
    eg_incompatible()
    sp4_nonstable()
    freeze_fixtures()
