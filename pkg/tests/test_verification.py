import json
from fractions import Fraction

import pytest

from src.errors import DomainError
from src.ingest import load_job
from src.models import CheckName, CheckStatus, VerificationJob
from src.numeric import BallReal
from src.verification import (
    exit_code,
    render,
    report_to_dict,
    run_check,
    run_verification,
    to_jsonable,
)


ZETA_TWO = "1.6449340668482264364724151666460251891531853009119548702525"


@pytest.fixture
def q_data(data_dir):
    return json.loads((data_dir / "fields" / "q.json").read_text(encoding="utf-8"))


@pytest.fixture
def e_data(data_dir):
    path = data_dir / "varieties" / "e_f5.json"
    return json.loads(path.read_text(encoding="utf-8"))


def _job(**data):
    return VerificationJob.model_validate(data)


def _by_check(report):
    grouped = {}
    for record in report.records:
        grouped.setdefault(record.check, []).append(record)
    return grouped


def test_all_checks_pass_for_rationals(data_dir):
    job = load_job(data_dir / "jobs" / "q_all.json")
    report = run_verification(job)

    assert len(report.records) == 5 * 4
    failed = [r for r in report.records if r.status is not CheckStatus.PASS]
    assert failed == []
    assert report.status is CheckStatus.PASS
    assert exit_code(report) == 0

    special = _by_check(report)[CheckName.SPECIAL_VALUE]
    assert [r.n for r in special] == [-1, 0, 1, 2]
    assert all(r.precision is not None and r.radius is not None for r in special)


def test_duality_outside_the_window_fails_only_for_real_places(data_dir):
    job = load_job(data_dir / "jobs" / "q_duality_window.json")
    report = run_verification(job)
    grouped = _by_check(report)

    for check in (CheckName.ORDER, CheckName.TABLES):
        assert all(r.status is CheckStatus.PASS for r in grouped[check])

    failed = {r.n: r for r in grouped[CheckName.DUALITY] if r.status is CheckStatus.FAIL}
    assert 3 in failed
    assert failed[3].provenance == "DualityViolationError"
    assert all(n not in failed for n in range(-1, 3))
    assert report.status is CheckStatus.FAIL
    assert exit_code(report) == 1


def test_order_record_reports_euler_characteristic_separately(q_data):
    job = _job(field=q_data, twists="-1..1", checks=["order"])
    for record in run_verification(job).records:
        values = record.values
        assert values["euler"] == values["closed_form"] == values["analytic"]


def test_negative_control_fails(data_dir):
    job = load_job(data_dir / "jobs" / "q_negative_control.json")
    report = run_verification(job)
    (record,) = report.records
    assert record.status is CheckStatus.FAIL
    assert record.provenance == "PredictionMismatchError"
    assert record.defect is not None
    assert exit_code(report) == 1


def test_elliptic_curve_job(data_dir):
    report = run_verification(load_job(data_dir / "jobs" / "e_f5.json"))
    assert report.status is CheckStatus.PASS
    detstar = _by_check(report)[CheckName.DETSTAR]
    assert [r.values["limit"] for r in detstar] == ["-1", "1"]
    assert detstar[1].values["milne_chi"] == 0


def test_all_variety_checks_run_twist_free_checks_once(e_data):
    job = _job(variety=e_data, twists="0..2", checks="all")
    report = run_verification(job)
    assert report.status is CheckStatus.PASS
    grouped = _by_check(report)
    assert len(grouped[CheckName.ORDER]) == 3
    assert len(grouped[CheckName.POINT_COUNT]) == 1
    assert len(grouped[CheckName.RIEMANN_HYPOTHESIS]) == 1
    assert grouped[CheckName.FUNCTIONAL_EQUATION][0].values["sign"] == 1


def test_reports_are_deterministic(data_dir):
    job = load_job(data_dir / "jobs" / "quadratic_fields.json")
    first = report_to_dict(run_verification(job))
    second = report_to_dict(run_verification(job))
    first.pop("generated_at")
    second.pop("generated_at")
    assert first == second


def test_parallel_run_keeps_task_order(field):
    job = _job(
        field=field("q_i").model_dump(), twists="-1..2",
        checks=["order", "duality"]
    )
    serial = run_verification(job, workers=1)
    parallel = run_verification(job, workers=2)
    assert serial.records == parallel.records


def test_higher_precision_shrinks_radius(q_data):
    low = _job(field=q_data, twists=3, checks=["special-value"], precision=128)
    high = _job(field=q_data, twists=3, checks=["special-value"], precision=256)
    low_record = run_check(low, CheckName.SPECIAL_VALUE, 3)
    high_record = run_check(high, CheckName.SPECIAL_VALUE, 3)
    assert low_record.status is high_record.status is CheckStatus.PASS
    assert high_record.precision == 256
    assert float(high_record.radius) < float(low_record.radius)


def test_perturbed_torsion_order_fails(q_data):
    q_data["invariants"]["2"]["w"] = 48
    job = _job(field=q_data, twists=2, checks=["special-value", "tables"])
    report = run_verification(job)
    assert [r.status for r in report.records] == [CheckStatus.FAIL] * 2
    assert report.records[1].provenance == "InvariantViolationError"


def test_perturbed_discriminant_of_data_table_fails():
    record = {
        "label": "Q (tabla)",
        "degree": 1,
        "r1": 1,
        "r2": 0,
        "disc": 1,
        "zeta_values": {"2": {"order": 0, "value": ZETA_TWO}},
        "invariants": {"2": {"h": 2, "w": 24, "R": "1"}},
    }
    job = _job(field=record, twists=2, checks=["special-value"])
    assert run_verification(job).status is CheckStatus.PASS

    perturbed = _job(
        field={**record, "disc": 5}, twists=2, checks=["special-value"]
    )
    report = run_verification(perturbed)
    assert report.status is CheckStatus.FAIL
    assert exit_code(report) == 1


def test_perturbed_frobenius_trace_fails(e_data):
    e_data["polys"]["1"] = [1, -3, 5]
    job = _job(variety=e_data, twists=1, checks=["point-count", "riemann-hypothesis"])
    report = run_verification(job)
    grouped = _by_check(report)
    assert grouped[CheckName.POINT_COUNT][0].status is CheckStatus.FAIL
    assert grouped[CheckName.RIEMANN_HYPOTHESIS][0].status is CheckStatus.PASS


def test_missing_k_data_is_unresolved(field):
    job = _job(field=field("q_sqrt_m23").model_dump(), twists=2,
               checks=["special-value"])
    report = run_verification(job)
    (record,) = report.records
    assert record.status is CheckStatus.UNRESOLVED
    assert "solved_ratio" in record.values
    assert exit_code(report) == 0


def test_jordan_block_is_unresolved(data_dir):
    job = _job(
        variety=json.loads(
            (data_dir / "varieties" / "jordan_f3.json").read_text(encoding="utf-8")
        ),
        twists=1,
        checks=["detstar"],
    )
    report = run_verification(job)
    assert report.status is CheckStatus.UNRESOLVED
    assert exit_code(report) == 0


def test_render_formats(data_dir):
    report = run_verification(load_job(data_dir / "jobs" / "q_negative_control.json"))
    data = json.loads(render(report, "json"))
    assert data["status"] == "fail"
    assert data["records"][0]["check"] == "special-value"

    text = render(report, "text")
    assert text.splitlines()[-1] == "estado: fail"

    with pytest.raises(DomainError):
        render(report, "xml")


def test_to_jsonable():
    assert to_jsonable(Fraction(-1, 12)) == "-1/12"
    ball = to_jsonable(BallReal.exact(Fraction(1, 2), 64))
    assert set(ball) == {"mid", "rad", "prec"}
    assert to_jsonable({1: (Fraction(1, 2), None)}) == {"1": ["1/2", None]}
