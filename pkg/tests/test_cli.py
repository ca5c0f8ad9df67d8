import json

import pytest

from src.cli import main


def _json_output(capsys):
    return json.loads(capsys.readouterr().out)


def test_eval_prints_leading_data(capsys, data_dir):
    code = main(["eval", "--field", str(data_dir / "fields" / "q.json"), "--n=-1..0"])
    assert code == 0
    data = _json_output(capsys)
    assert data["values"]["-1"]["coefficient"] == "-1/12"
    assert data["values"]["0"]["coefficient"] == "-1/2"


def test_order_and_tables(capsys, data_dir):
    field = str(data_dir / "fields" / "q_i.json")
    assert main(["order", "--field", field, "--n", "1"]) == 0
    assert _json_output(capsys)["orders"]["1"]["closed_form"] == -1

    assert main(["tables", "--field", field, "--n", "2"]) == 0
    assert _json_output(capsys)["tables"]["2"]["duality_defects"] == []


def test_verify_exit_codes(capsys, data_dir):
    jobs = data_dir / "jobs"
    assert main(["verify", str(jobs / "q_all.json")]) == 0
    assert _json_output(capsys)["status"] == "pass"

    assert main(["verify", str(jobs / "q_negative_control.json"), "--format", "text"]) == 1
    assert capsys.readouterr().out.strip().endswith("estado: fail")


def test_verify_overrides(capsys, data_dir):
    job = str(data_dir / "jobs" / "quadratic_fields.json")
    assert main(["verify", job, "--prec", "192", "--n", "1"]) == 0
    report = _json_output(capsys)
    assert report["precision"] == 192
    assert {r["n"] for r in report["records"]} == {1}


def test_verify_writes_report_file(tmp_path, data_dir):
    out = tmp_path / "informe.json"
    code = main(["verify", str(data_dir / "jobs" / "e_f5.json"), "--out", str(out)])
    assert code == 0
    report = json.loads(out.read_text(encoding="utf-8"))
    assert report["label"] == "E/F_5"
    assert report["status"] == "pass"


def test_charp(capsys, data_dir):
    variety = str(data_dir / "varieties" / "p1_f5.json")
    assert main(["charp", "--variety", variety, "--n", "1"]) == 0
    data = _json_output(capsys)
    assert data["denominator"] == [1, -6, 5]
    assert data["twists"]["1"]["leading"] == "5/4"


def test_oracles(capsys):
    assert main(["oracle", "quadratic", "12"]) == 0
    data = _json_output(capsys)
    assert data["h"] == 1
    assert "R_closed_form" in data

    assert main(["oracle", "curve", "--coeffs", "0,-1,0,1", "--q", "3"]) == 0
    assert _json_output(capsys)["p1"] == [1, 0, 3]


def test_input_errors_exit_with_two(tmp_path, data_dir):
    assert main(["eval", "--field", str(tmp_path / "missing.json")]) == 2
    assert main(["oracle", "curve", "--coeffs", "a,b", "--q", "5"]) == 2

    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"label": "Q", "degree": 1, "r1": 0, "r2": 0,
                               "disc": 1}), encoding="utf-8")
    assert main(["eval", "--field", str(bad)]) == 2

    job = str(data_dir / "jobs" / "q_all.json")
    assert main(["verify", job, "--prec", "32"]) == 2


def test_singular_curve_is_a_failure():
    assert main(["oracle", "curve", "--coeffs", "0,0,0,1", "--q", "5"]) == 1


def test_unknown_subcommand_is_rejected_by_argparse():
    with pytest.raises(SystemExit) as exc:
        main(["frobenius"])
    assert exc.value.code == 2
