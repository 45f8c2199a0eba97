"""JSON scenarios: loading field, frame, Levis and data, and dumping results.

Rationals travel as "a/b" strings.  Coordinates and partitions are 1-based
in JSON and 0-based in memory.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any

from .characters import QuasiCharacter, make_character
from .datum import STANDARD_POINT, CharacterDatum
from .errors import InputError
from .lifting import Choice, ScriptedStrategy
from .local_field import FieldDesc, FieldElement, GaloisElement, precision_from_env
from .root_datum import DualElement, FixedLevi, GammaElement, LeviLike, TorusFrame, TwistedLevi, fixed_levi


def parse_rational(value: Any) -> Fraction:
    if isinstance(value, bool) or not isinstance(value, (int, str)):
        raise InputError(f"expected a rational as an integer or 'a/b' string, got {value!r}")
    try:
        return Fraction(value)
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"bad rational {value!r}") from exc


def rational_str(q) -> str:
    return str(Fraction(q))


def _require(obj: dict, key: str, where: str) -> Any:
    if not isinstance(obj, dict) or key not in obj:
        raise InputError(f"{where}: missing key {key!r}")
    return obj[key]


# -- field elements -------------------------------------------------------------


def parse_field_element(desc: FieldDesc, obj: Any, where: str = "field element") -> FieldElement:
    """Accepts {"val","digits"}, {"coords"} (exact rows per pi-power) or a rational string."""
    if isinstance(obj, (int, str)) and not isinstance(obj, bool):
        return FieldElement.from_rational(desc, parse_rational(obj))
    if not isinstance(obj, dict):
        raise InputError(f"{where}: expected an object, got {obj!r}")
    if "coords" in obj:
        rows = obj["coords"]
        if not isinstance(rows, list) or len(rows) != desc.e or any(not isinstance(r, list) or len(r) != desc.f for r in rows):
            raise InputError(f"{where}: coords must be {desc.e} rows of {desc.f} rationals")
        x = FieldElement.from_coords(desc, [[parse_rational(c) for c in row] for row in rows])
        if "digits" in obj:
            _check_digits_agree(x, obj, where)
        return x
    digits = _require(obj, "digits", where)
    if not isinstance(digits, list):
        raise InputError(f"{where}: digits must be a list")
    if not digits:
        return FieldElement.zero(desc)
    val = parse_rational(_require(obj, "val", where))
    if len(digits) > desc.precision:
        raise InputError(f"{where}: {len(digits)} digits exceed the precision {desc.precision}")
    vecs = []
    for vec in digits:
        if not isinstance(vec, list) or len(vec) != desc.f or any(not isinstance(c, int) or not 0 <= c < desc.p for c in vec):
            raise InputError(f"{where}: each digit must be {desc.f} integers in [0, {desc.p})")
        vecs.append(tuple(vec))
    if not any(vecs[0]):
        raise InputError(f"{where}: the leading digit must be nonzero")
    return FieldElement.from_digits(desc, val, vecs)


def _check_digits_agree(x: FieldElement, obj: dict, where: str) -> None:
    digits = [tuple(v) for v in obj["digits"]]
    if x.is_zero():
        if digits:
            raise InputError(f"{where}: digits given for a zero element")
        return
    if "val" in obj and parse_rational(obj["val"]) != x.lead_val:
        raise InputError(f"{where}: val disagrees with coords")
    if digits != x.digit_window(x.valuation_units, len(digits)):
        raise InputError(f"{where}: digits disagree with coords")


def dump_field_element(x: FieldElement) -> dict:
    if x.is_zero():
        return {"val": "inf", "digits": []}
    out: dict[str, Any] = {"val": rational_str(x.lead_val), "digits": [list(v) for v in x.digits]}
    if not x.terminates:
        if x.exact:
            out["coords"] = [[rational_str(c) for c in row] for row in x.coords()]
        else:
            out["exact"] = False
    return out


# -- frames and Levis -----------------------------------------------------------


def _perm(obj: Any, n: int, where: str) -> tuple[int, ...]:
    if not isinstance(obj, list) or sorted(obj) != list(range(1, n + 1)):
        raise InputError(f"{where}: expected a permutation of 1..{n}")
    return tuple(k - 1 for k in obj)


def parse_field(obj: dict) -> FieldDesc:
    prec = precision_from_env(int(obj.get("precision", 16)))
    try:
        return FieldDesc(
            int(_require(obj, "p", "field")),
            int(obj.get("f", 1)),
            int(obj.get("e", 1)),
            tuple(int(c) for c in obj.get("residue_modulus", [0, 1])),
            prec,
        )
    except (TypeError, ValueError) as exc:
        raise InputError(f"field: {exc}") from exc


def parse_frame(desc: FieldDesc, obj: dict, gamma: list) -> TorusFrame:
    n = int(_require(obj, "n", "frame"))
    frob = _perm(obj["frobenius"], n, "frame.frobenius") if "frobenius" in obj else None
    twist = _perm(obj["twist"], n, "frame.twist") if "twist" in obj else None
    gens = []
    for i, g in enumerate(gamma):
        where = f"gamma[{i}]"
        gal = g.get("galois", {})
        gens.append(
            GammaElement(
                _perm(_require(g, "perm", where), n, where + ".perm"),
                int(g.get("sign", 1)),
                GaloisElement(int(gal.get("frobenius", 0)), int(gal.get("twist", 0))),
                tuple(int(s) for s in g.get("root_signs", [1] * n)),
            )
        )
    return TorusFrame(desc, n, frob, twist, gens)


def parse_partition(frame: TorusFrame, obj: Any, where: str) -> TwistedLevi:
    if not isinstance(obj, list) or any(not isinstance(b, list) for b in obj):
        raise InputError(f"{where}: expected a partition as a list of blocks")
    flat = sorted(k for b in obj for k in b)
    if flat != list(range(1, frame.n + 1)):
        raise InputError(f"{where}: blocks must partition 1..{frame.n}")
    return TwistedLevi(frame, [[k - 1 for k in b] for b in obj])


def dump_levi(L: LeviLike) -> Any:
    if isinstance(L, TwistedLevi):
        return L.one_based()
    assert isinstance(L, FixedLevi)
    out: dict[str, Any] = {"roots": [[rational_str(c) for c in r] for r in L.sorted_roots()]}
    if L.name:
        out["name"] = L.name
    return out


def levi_label(L: LeviLike) -> str:
    if isinstance(L, FixedLevi) and L.name:
        return L.name
    if isinstance(L, TwistedLevi):
        return json.dumps(L.one_based(), separators=(",", ":"))
    return repr(L)


@dataclass
class Case:
    name: str
    datum: CharacterDatum | None = None
    datum2: CharacterDatum | None = None
    target_depth: Fraction | None = None
    extra: dict = field(default_factory=dict)


@dataclass
class Scenario:
    name: str
    desc: FieldDesc
    frame: TorusFrame
    g_levis: dict[str, TwistedLevi]
    h_levis: dict[str, FixedLevi]
    cases: list[Case]
    options: dict

    def resolve_levi(self, ref: Any, side: str, where: str) -> LeviLike:
        if side == "G":
            if isinstance(ref, str):
                if ref not in self.g_levis:
                    raise InputError(f"{where}: unknown Levi {ref!r}")
                return self.g_levis[ref]
            return parse_partition(self.frame, ref, where)
        if isinstance(ref, str):
            if ref not in self.h_levis:
                raise InputError(f"{where}: unknown fixed-point Levi {ref!r}")
            return self.h_levis[ref]
        return self._parse_h_levi(ref, None, where)

    def _parse_h_levi(self, obj: Any, name: str | None, where: str) -> FixedLevi:
        if not isinstance(obj, dict):
            raise InputError(f"{where}: expected {{'fixed_of': ...}} or {{'roots': ...}}")
        if "fixed_of" in obj:
            L = self.resolve_levi(obj["fixed_of"], "G", where)
            assert isinstance(L, TwistedLevi)
            if not L.is_gamma_stable():
                raise InputError(f"{where}: {L} is not Gamma-stable")
            H = fixed_levi(L, name)
            if "roots" in obj and FixedLevi(self.frame, [[parse_rational(c) for c in r] for r in obj["roots"]]) != H:
                raise InputError(f"{where}: listed roots disagree with the fixed points of {L}")
            return H
        roots = _require(obj, "roots", where)
        return FixedLevi(self.frame, [[parse_rational(c) for c in r] for r in roots], name)

    def parse_dual(self, obj: Any, where: str) -> DualElement:
        if not isinstance(obj, list) or len(obj) != self.frame.n:
            raise InputError(f"{where}: expected {self.frame.n} field elements")
        return DualElement(self.frame, [parse_field_element(self.desc, c, f"{where}[{k}]") for k, c in enumerate(obj)])

    def parse_levels(self, levels: Any, where: str) -> list[DualElement]:
        if not isinstance(levels, list):
            raise InputError(f"{where}: levels must be a list")
        out = []
        for i, lv in enumerate(levels):
            w = f"{where}[{i}]"
            X = self.parse_dual(_require(lv, "realizer", w), w + ".realizer")
            if "depth" in lv and not X.is_zero() and X.depth() != parse_rational(lv["depth"]):
                raise InputError(f"{w}: realizer has depth {X.depth()}, not {lv['depth']}")
            out.append(X)
        return out

    def parse_character(self, obj: dict, side: str, where: str) -> QuasiCharacter:
        dom = self.resolve_levi(_require(obj, "domain", where), side, where + ".domain")
        tail = obj.get("tail", {})
        if not isinstance(tail, dict):
            raise InputError(f"{where}.tail: expected an object")
        return make_character(dom, self.parse_levels(obj.get("levels", []), where + ".levels"), [(k, int(v)) for k, v in tail.items()])

    def parse_datum(self, obj: dict, where: str) -> CharacterDatum:
        side = obj.get("side", "H")
        if side not in ("G", "H"):
            raise InputError(f"{where}.side must be 'G' or 'H'")
        levis = tuple(self.resolve_levi(r, side, f"{where}.levis[{i}]") for i, r in enumerate(_require(obj, "levis", where)))
        if "ambient" in obj:
            ambient = self.resolve_levi(obj["ambient"], side, where + ".ambient")
        else:
            ambient = self.frame.full() if side == "G" else fixed_levi(self.frame.full(), "H")
        depths = tuple(parse_rational(r) for r in _require(obj, "depths", where))
        chars = tuple(self.parse_character(c, side, f"{where}.chars[{i}]") for i, c in enumerate(_require(obj, "chars", where)))
        return CharacterDatum(levis, depths, chars, ambient, obj.get("point", STANDARD_POINT))

    def parse_strategy(self, obj: Any) -> ScriptedStrategy:
        if not isinstance(obj, list):
            raise InputError("strategy: expected a list of per-step overrides")
        overrides = {}
        for i, item in enumerate(obj):
            where = f"strategy[{i}]"
            step = int(_require(item, "step", where))
            xs = self.parse_dual(_require(item, "x_sharp", where), where + ".x_sharp")
            reals = None
            if "phi_levels" in item:
                reals = tuple(self.parse_levels(item["phi_levels"], where + ".phi_levels"))
            tail = tuple((k, int(v)) for k, v in item.get("phi_tail", {}).items())
            overrides[step] = Choice(xs, None, reals, tail)
        return ScriptedStrategy(overrides)


def load_scenario(source: str | Path | dict) -> Scenario:
    if isinstance(source, dict):
        obj = source
    else:
        try:
            obj = json.loads(Path(source).read_text())
        except OSError as exc:
            raise InputError(f"cannot read scenario: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise InputError(f"scenario is not valid JSON: line {exc.lineno}: {exc.msg}") from exc
    if not isinstance(obj, dict):
        raise InputError("scenario must be a JSON object")
    desc = parse_field(_require(obj, "field", "scenario"))
    frame = parse_frame(desc, _require(obj, "frame", "scenario"), obj.get("gamma", []))
    sc = Scenario(obj.get("name", "scenario"), desc, frame, {}, {}, [], dict(obj.get("options", {})))
    sc.g_levis["G"] = frame.full()
    sc.g_levis["T"] = frame.torus()
    for name, part in obj.get("levis", {}).items():
        sc.g_levis[name] = parse_partition(frame, part, f"levis.{name}")
    sc.h_levis["H"] = fixed_levi(frame.full(), "H")
    for name, entry in obj.get("h_levis", {}).items():
        sc.h_levis[name] = sc._parse_h_levi(entry, name, f"h_levis.{name}")
    raw_cases = obj.get("cases")
    if raw_cases is None:
        raw_cases = [{k: obj[k] for k in ("datum", "datum2", "target_depth") if k in obj} | {"name": sc.name}]
    for i, c in enumerate(raw_cases):
        where = f"cases[{i}]"
        td = c.get("target_depth")
        sc.cases.append(
            Case(
                c.get("name", f"case{i}"),
                sc.parse_datum(c["datum"], where + ".datum") if "datum" in c else None,
                sc.parse_datum(c["datum2"], where + ".datum2") if "datum2" in c else None,
                parse_rational(td) if td is not None else None,
                {k: v for k, v in c.items() if k not in ("name", "datum", "datum2", "target_depth")},
            )
        )
    return sc


# -- dumping ---------------------------------------------------------------------


def dump_dual(X: DualElement) -> list:
    return [dump_field_element(c) for c in X.coords]


def dump_character(chi: QuasiCharacter) -> dict:
    return {
        "domain": dump_levi(chi.domain),
        "levels": [{"depth": rational_str(r), "realizer": dump_dual(X)} for r, X in chi.levels],
        "tail": dict(chi.tail),
    }


def dump_datum(sigma: CharacterDatum) -> dict:
    return {
        "side": sigma.side,
        "levis": [dump_levi(L) for L in sigma.levis],
        "ambient": dump_levi(sigma.ambient),
        "point": sigma.point,
        "depths": [rational_str(r) for r in sigma.depths],
        "chars": [dump_character(c) for c in sigma.chars],
    }
