import io
import json
import subprocess
import sys

import pytest

from helpers import fixture
from toric_alt.cli import main, parse_problem
from toric_alt.errors import InputError
from toric_alt.polyauto import PolyAutomorphism


def run(*argv):
    out = io.StringIO()
    code = main([str(a) for a in argv], out=out)
    return code, out.getvalue()


def test_validate_example():
    code, text = run("validate", fixture("three_coordinates.json"))
    assert code == 0 and text.endswith("valid\n") and "FAIL" not in text


def test_validate_scaled_ray():
    code, text = run("validate", fixture("scaled_ray.json"))
    assert code == 2 and "FAIL primitive ray 1" in text


def test_validate_bad_root_lists_pairing():
    code, text = run("validate", "--json", fixture("bad_root.json"))
    assert code == 2
    report = json.loads(text)
    assert report["roots"][0]["pairings"] == [-2, 1]
    assert "<rho_1, e> = -2" in report["roots"][0]["violations"][0]


def test_decide_human():
    assert run("decide", fixture("three_coordinates.json")) == (0, "unipotent, dim=10, class=5, lcs dims 10,7,4,2,1,0\n")
    assert run("decide", fixture("planar_c2_d1.json")) == (0, "free, case c>=2,d=1, verified W=8\n")
    code, text = run("decide", fixture("planar_c0_d0.json"))
    assert code == 0 and text.startswith("unipotent") and "class=1" in text


def test_decide_json_is_deterministic_and_canonical():
    a = run("decide", "--json", fixture("planar_c2_d2.json"))
    b = run("decide", "--json", fixture("planar_c2_d2.json"))
    assert a == b and a[0] == 0
    payload = json.loads(a[1])
    assert payload["verdict"] == "free" and payload["case"] == "CD_GE2"
    assert json.dumps(payload, indent=2, sort_keys=True) + "\n" == a[1]
    autos = [PolyAutomorphism.from_json(x) for x in payload["witness_autos"]]
    assert [x.to_json() for x in autos] == payload["witness_autos"]


def test_decide_dot_and_violations(tmp_path):
    dot = tmp_path / "g.dot"
    code, text = run("decide", fixture("three_coordinates.json"), "--dot", dot, "--all-violations")
    assert code == 0 and "L3 -> L2;" in dot.read_text()
    code, text = run("decide", fixture("planar_c1_d1.json"), "--all-violations", "--max-word-len", 4)
    assert code == 0 and "violation: ray 1 e=[-1, 1] / ray 2 e=[1, -1] (c=1, d=1)" in text


def test_decide_cap_exit_code(monkeypatch):
    assert run("decide", fixture("three_coordinates.json"), "--cap", 3)[0] == 3
    monkeypatch.setenv("TORIC_ALT_CAP", "3")
    assert run("decide", fixture("three_coordinates.json"))[0] == 3


def test_decide_bad_flags():
    assert run("decide", fixture("three_coordinates.json"), "--max-word-len", 0)[0] == 2
    assert run("decide", fixture("missing.json"))[0] == 2
    assert run("frobnicate")[0] == 2


def test_roots():
    code, text = run("roots", fixture("planar_c0_d0.json"), "--ray", 1, "--bound", 2)
    assert code == 0 and text.splitlines()[-1] == "3 roots on ray 1 with |e| <= 2"
    assert run("roots", fixture("planar_c0_d0.json"), "--ray", 3, "--bound", 2)[0] == 2
    assert run("roots", fixture("planar_c0_d0.json"), "--ray", 1, "--bound", 0)[0] == 2
    code, text = run("roots", fixture("three_coordinates.json"), "--ray", 1, "--bound", 1, "--json")
    rows = json.loads(text)["roots"]
    assert all(r["lift"][0] == -1 for r in rows)


@pytest.mark.parametrize(
    "element, expected",
    [
        ("g4", "(x1, x2, x3 + 1)"),
        ("g2", "(x1, x2 + x3, x3)"),
        ("g2+g4", "(x1, x2 + x3 + 1/2, x3 + 1)"),
        ('[{"ray": 3, "e": [0, 0, -1], "coeff": "2"}]', "(x1, x2, x3 + 2)"),
    ],
)
def test_exp(element, expected):
    assert run("exp", fixture("three_coordinates.json"), "--element", element) == (0, expected + "\n")


def test_exp_errors():
    assert run("exp", fixture("three_coordinates.json"), "--element", '[{"ray": 1, "e": [-1, 5, 0]}]')[0] == 2
    assert run("exp", fixture("three_coordinates.json"), "--element", "g9")[0] == 2
    assert run("exp", fixture("three_coordinates.json"), "--element", "banana")[0] == 2
    assert run("exp", fixture("planar_c2_d1.json"), "--element", "g1")[0] == 2


def test_exp_json_roundtrip():
    code, text = run("exp", fixture("three_coordinates.json"), "--element", "g1-1/2*g3", "--json")
    obj = json.loads(text)
    assert PolyAutomorphism.from_json(obj).to_json() == obj


def test_graph():
    code, text = run("graph", fixture("three_coordinates.json"))
    assert code == 0 and text.startswith("digraph Gamma {")
    code, text = run("graph", fixture("planar_c2_d1.json"), "--json")
    assert json.loads(text)["acyclic"] is False


def test_problem_schema():
    with pytest.raises(InputError):
        parse_problem([])
    with pytest.raises(InputError):
        parse_problem({"cone": {"rank": 2, "rays": [[1, 0], [0, 1]]}, "extra": 1})
    with pytest.raises(InputError):
        parse_problem({"cone": {"rank": 2, "rays": [[1, 0], [0, 1]]}, "options": {"cap": "x"}})
    with pytest.raises(InputError):
        parse_problem({"cone": {"rank": 2, "rays": [[1, 0], [0, 1]]}, "roots": [{"ray": 1, "e": [1]}]})


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "toric_alt", "decide", str(fixture("planar_c1_d1.json"))],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0 and proc.stdout == "free, case c=1,d=1, verified W=8\n"
