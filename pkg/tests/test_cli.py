import contextlib
import copy
import io
import json
import os
import subprocess
import sys
from fractions import Fraction
from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from levilift.cli import main
from levilift.errors import InputError
from levilift.local_field import FieldDesc, FieldElement, fe_inv
from levilift.scenario import dump_field_element, parse_field_element

ROOT = Path(__file__).resolve().parent.parent
CORPUS = ROOT / "corpus"
EXPECTED = CORPUS / "expected"
FIXTURES = sorted(EXPECTED.glob("*.json"))


def run_cli(*argv):
    buf = io.StringIO()
    with contextlib.redirect_stdout(buf):
        code = main([str(a) for a in argv])
    return code, buf.getvalue()


def scenario(name):
    return json.loads((CORPUS / f"{name}.json").read_text())


def write(tmp_path, obj, name="sc.json"):
    path = tmp_path / name
    path.write_text(json.dumps(obj))
    return path


# -- field element JSON ---------------------------------------------------------

FIELDS = [FieldDesc(5, 1, 1, (0, 1)), FieldDesc(5, 2, 1, (3, 0, 1)), FieldDesc(5, 1, 2, (0, 1)), FieldDesc(5, 2, 2, (3, 0, 1))]
small_q = st.fractions(min_value=-60, max_value=60, max_denominator=40)


def elements(desc):
    rows = st.lists(st.lists(small_q, min_size=desc.f, max_size=desc.f), min_size=desc.e, max_size=desc.e)
    return rows.map(lambda r: FieldElement.from_coords(desc, r))


@settings(max_examples=80, deadline=None)
@given(st.sampled_from(FIELDS).flatmap(lambda d: st.tuples(st.just(d), elements(d))))
def test_field_element_json_roundtrip(data):
    desc, x = data
    obj = json.loads(json.dumps(dump_field_element(x)))
    assert parse_field_element(desc, obj) == x


def test_zero_and_shorthand():
    desc = FIELDS[0]
    assert dump_field_element(FieldElement.zero(desc)) == {"val": "inf", "digits": []}
    assert parse_field_element(desc, "3/25") == FieldElement.from_rational(desc, Fraction(3, 25))
    inv = dump_field_element(fe_inv(FieldElement.from_rational(desc, 2)))
    assert inv["coords"] == [["1/2"]]


@pytest.mark.parametrize(
    "obj",
    [
        {"val": "0", "digits": [[5]]},
        {"val": "0", "digits": [[0], [1]]},
        {"val": "0", "digits": [[1]] * 17},
        {"val": "0", "digits": [[1], [2]], "coords": [["3"]]},
        {"digits": [[1]]},
        1.5,
    ],
)
def test_bad_field_elements(obj):
    with pytest.raises(InputError):
        parse_field_element(FIELDS[0], obj)


# -- fixtures -------------------------------------------------------------------


@pytest.mark.parametrize("path", FIXTURES, ids=[p.stem for p in FIXTURES])
def test_fixture_reproduces(path):
    name, cmd = path.stem.split(".", 1)
    code, out = run_cli(cmd, "--scenario", CORPUS / f"{name}.json")
    report = json.loads(out)
    report["exit_code"] = code
    assert report == json.loads(path.read_text())


def test_output_is_deterministic():
    args = ("lift", "--scenario", CORPUS / "eg_tliftone.json")
    assert run_cli(*args) == run_cli(*args)


def test_console_entry_point():
    env = dict(os.environ, PYTHONPATH=str(ROOT / "src"))
    proc = subprocess.run(
        [sys.executable, "-m", "levilift.cli", "validate", "--scenario", str(CORPUS / "eg_weird.json"), "--output", "text"],
        capture_output=True,
        text=True,
        env=env,
    )
    assert proc.returncode == 0
    assert "[PASS] equal_characters" in proc.stdout and "elapsed" in proc.stdout


# -- exit codes -----------------------------------------------------------------


def test_permuted_depths_fail_cd3(tmp_path):
    sc = scenario("eg_incompatible")
    sc["cases"][0]["datum"]["depths"].reverse()
    code, out = run_cli("validate", "--scenario", write(tmp_path, sc))
    assert code == 1
    case = json.loads(out)["cases"][0]
    assert case["checks"]["CD3"] is False


def test_bad_json_is_input_error(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{not json")
    assert run_cli("validate", "--scenario", path)[0] == 2
    assert run_cli("validate", "--scenario", tmp_path / "missing.json")[0] == 2


def test_unknown_levi_is_input_error(tmp_path):
    sc = scenario("eg_incompatible")
    sc["cases"][0]["datum"]["levis"][0] = "nowhere"
    assert run_cli("validate", "--scenario", write(tmp_path, sc))[0] == 2


def test_target_depth_checks():
    path = CORPUS / "eg_incompatible.json"
    assert run_cli("lift", "--scenario", path, "--target-depth", "1/2")[0] == 0
    assert run_cli("lift", "--scenario", path, "--target-depth", "1")[0] == 2
    assert run_cli("lift", "--scenario", path, "--target-depth", "x")[0] == 2


def test_low_precision_is_reported(monkeypatch):
    monkeypatch.setenv("LEVILIFT_PRECISION", "2")
    assert run_cli("validate", "--scenario", CORPUS / "eg_incompatible.json")[0] == 2


def test_check_refactor(tmp_path):
    sc = scenario("eg_incompatible")
    case = sc["cases"][0]
    case["datum2"] = copy.deepcopy(case["datum"])
    code, out = run_cli("check-refactor", "--scenario", write(tmp_path, sc))
    assert code == 0 and json.loads(out)["cases"][0]["defects"] == []
    case["datum2"]["depths"] = ["1", "4"]
    assert run_cli("check-refactor", "--scenario", write(tmp_path, sc))[0] == 2
    del case["datum2"]
    assert run_cli("check-refactor", "--scenario", write(tmp_path, sc))[0] == 2


def test_restrict_and_roundtrip_on_lift(tmp_path):
    code, out = run_cli("lift", "--scenario", CORPUS / "eg_weird.json")
    assert code == 0
    sigma = json.loads(out)["cases"][1]["sigma"]
    sc = scenario("eg_weird")
    sc["cases"] = [{"name": "lifted", "datum": sigma}]
    path = write(tmp_path, sc)
    assert run_cli("restrict", "--scenario", path)[0] == 0
    assert run_cli("roundtrip", "--scenario", path)[0] == 0


def test_eval_theta_sample_count():
    code, out = run_cli("eval-theta", "--scenario", CORPUS / "eg_weird.json", "--samples", "20", "--seed", "5")
    assert code == 0
    assert all(c["samples"] == 20 for c in json.loads(out)["cases"])
