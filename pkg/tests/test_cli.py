import csv
import io
import json

import pytest

from quadtame import fixture_path
from quadtame.cli import main


def F(name):
    return str(fixture_path(name))


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def run_json(capsys, *argv):
    code, out = run(capsys, *argv)
    return code, json.loads(out)


def test_degree(capsys):
    code, d = run_json(capsys, "degree", "--word", F("exponential.json"))
    assert code == 0 and d == {"degree": 3, "epsilon": -1}
    code, d = run_json(capsys, "degree", "--word", F("orthogonal.json"))
    assert d["degree"] == 1


def test_powers_json_and_csv(capsys):
    code, d = run_json(capsys, "powers", "--word", F("linear.json"), "--n", "5")
    assert code == 0 and d["forward"] == [3, 7, 11, 15, 19]
    code, out = run(capsys, "powers", "--word", F("linear.json"), "--n", "3", "--format", "csv")
    rows = list(csv.reader(io.StringIO(out)))
    assert rows == [["n", "deg_forward", "deg_backward"], ["1", "3", "3"], ["2", "7", "7"], ["3", "11", "11"]]


def test_powers_truncate_at_cap(capsys):
    code, d = run_json(capsys, "powers", "--word", F("exponential.json"), "--n", "10", "--degree-cap", "100")
    assert code == 0 and d["truncated"] and d["forward"] == [3, 9, 21, 45, 93]


def test_classify(capsys):
    code, d = run_json(capsys, "classify", "--word", F("linear.json"), "--n", "8")
    assert d["growth"]["class"] == "linear"
    code, d = run_json(capsys, "classify", "--word", F("exponential.json"), "--n", "7")
    assert d["growth"]["class"] == "exponential" and d["lower_bound"]["holds"]


def test_valuation_defaults_to_minus_degree(capsys):
    code, d = run_json(capsys, "valuation", "--word", F("linear.json"))
    assert code == 0 and d["nu_xt"] == "-2"
    assert [v["nu"] for v in d["values"]] == ["-1", "-1", "-3", "-3"]
    code, d = run_json(capsys, "valuation", "--word", F("linear.json"), "--valuation", F("weights_example.json"))
    assert d["values"][0] == {"element": "f_x", "nu": "-1/2"}


def test_pair_subcommands(capsys):
    _, d = run_json(capsys, "resonance", "--word", F("pair_critical.json"))
    assert d == {"class": "critical", "k": 2, "lambda": "1"}
    _, d = run_json(capsys, "resonance", "--word", F("pair_proper.json"))
    assert (d["s1"], d["s2"]) == (3, 2)
    _, d = run_json(capsys, "resonance", "--word", F("pair_xy.json"), "--valuation", F("irrational.json"))
    assert d["class"] == "qindependent"
    _, d = run_json(capsys, "parachute", "--word", F("pair_xy.json"), "--valuation", F("weights_example.json"))
    assert d == {"parachute": "1/2"}
    _, d = run_json(capsys, "thm417", "--word", F("pair_proper.json"))
    assert (d["lhs"], d["nu0"], d["bound"], d["bound_holds"]) == ("-5", "-6", "-1", True)


def test_complex_formats(capsys):
    code, d = run_json(capsys, "complex", "--word", F("gallery.json"), "--valuation", F("asymmetric.json"))
    assert code == 0 and d["edges"]
    code, out = run(capsys, "complex", "--word", F("gallery.json"), "--valuation", F("asymmetric.json"),
                    "--format", "dot")
    assert out.startswith("graph Cnu")


def test_verify5_and_thm4(capsys):
    code, d = run_json(capsys, "verify5", "--word", F("gallery.json"), "--valuation", F("asymmetric.json"))
    assert code == 0 and d["all_pass"]
    code, d = run_json(capsys, "verify5", "--word", F("gallery.json"))
    assert code == 2 and d["error"] == "ConditionSevenViolated"
    code, d = run_json(capsys, "thm4", "--word", F("ev_x.json"))
    assert code == 0 and d["holds"]


def test_walk(capsys, tmp_path):
    cfg = json.loads(fixture_path("walk_o4.json").read_text())
    cfg.update(trials=5, steps=3)
    p = tmp_path / "w.json"
    p.write_text(json.dumps(cfg))
    code, d = run_json(capsys, "walk", "--config", str(p), "--seed", "5")
    assert code == 0 and d["lambda1"] == 0.0 and d["config"]["seed"] == 5
    code, out = run(capsys, "walk", "--config", str(p), "--format", "csv")
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["step", "trial", "logdeg"] and len(rows) == 1 + 15


@pytest.mark.parametrize("argv,kind", [
    (["degree"], "InputError"),
    (["degree", "--word", "/nonexistent.json"], "InputError"),
    (["walk", "--config", "WALK", "--seed", "-1"], "InputError"),
    (["degree", "--word", "BADWORD"], "UnknownGenerator"),
    (["thm417", "--word", "NOR"], "InputError"),
    (["resonance", "--word", "BADPOLY"], "ParseError"),
    (["degree", "--word", "EXP", "--format", "csv"], "InputError"),
    (["degree", "--word", "EXP", "--degree-cap", "2"], "DegreeCapExceeded"),
])
def test_error_object(capsys, tmp_path, argv, kind):
    files = {
        "BADWORD": {"word": ["zz"]},
        "NOR": {"pair": ["x", "y"]},
        "BADPOLY": {"pair": ["x +* y", "y"]},
    }
    subst = {"WALK": F("walk_o4.json"), "EXP": F("exponential.json")}
    for name, content in files.items():
        (tmp_path / name).write_text(json.dumps(content))
        subst[name] = str(tmp_path / name)
    code, d = run_json(capsys, *[subst.get(a, a) for a in argv])
    assert code == 2
    assert d["error"] == kind and d["message"]


def test_repeat_runs_identical(capsys):
    a = run(capsys, "complex", "--word", F("gallery_mixed.json"), "--valuation", F("asymmetric.json"))
    b = run(capsys, "complex", "--word", F("gallery_mixed.json"), "--valuation", F("asymmetric.json"))
    assert a == b
