"""Ejecución de trabajos de verificación y emisión de informes."""
import json
import logging
from concurrent.futures import ProcessPoolExecutor
from datetime import datetime, timezone
from fractions import Fraction
from typing import Any, Callable, Optional

import sympy
from mpmath import mp

from . import charp, weil_etale
from .dirichlet import dedekind_zeta_leading, torsion_w_n
from .errors import (
    DomainError,
    DualityViolationError,
    InconsistencyError,
    InvariantViolationError,
    PredictionMismatchError,
    SpecialValueError,
)
from .models import (
    CheckName,
    CheckRecord,
    CheckStatus,
    NumberFieldRecord,
    Report,
    VerificationJob,
    WeilPolySet,
)
from .numeric import BallComplex, BallReal, LeadingTaylor
from .settings import get_settings


logger = logging.getLogger(__name__)

# Comprobaciones que no dependen del twist: se ejecutan una vez por trabajo
TWIST_FREE = {
    CheckName.POINT_COUNT,
    CheckName.FUNCTIONAL_EQUATION,
    CheckName.RIEMANN_HYPOTHESIS,
}


# Serialización

def to_jsonable(value: Any) -> Any:
    """Racionales como "p/q", bolas como {mid, rad, prec}, claves como texto."""
    if isinstance(value, bool) or value is None:
        return value
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, BallReal):
        digits = max(5, int(value.prec * 0.30103))
        return {
            "mid": mp.nstr(value.mid, digits),
            "rad": mp.nstr(value.rad, 5),
            "prec": value.prec,
        }
    if isinstance(value, BallComplex):
        return {"re": to_jsonable(value.re), "im": to_jsonable(value.im)}
    if isinstance(value, LeadingTaylor):
        return {
            "point": value.point,
            "order": value.order,
            "coefficient": to_jsonable(value.coefficient),
        }
    if isinstance(value, sympy.Basic):
        return str(value)
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, set)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, (int, float, str)):
        return value
    return str(value)


def _radius(value: Any) -> Optional[str]:
    if isinstance(value, BallReal):
        return mp.nstr(value.rad, 5)
    return None


def _record(
    check: CheckName,
    target: str,
    n: int,
    status: CheckStatus,
    provenance: str,
    values: Optional[dict] = None,
    ball: Optional[BallReal] = None,
    **extra
) -> CheckRecord:
    return CheckRecord(
        check=check,
        target=target,
        n=n,
        status=status,
        provenance=provenance,
        precision=ball.prec if ball is not None else None,
        radius=_radius(ball),
        values=to_jsonable(values or {}),
        **extra,
    )


# Comprobaciones sobre cuerpos de números

def _check_order(job: VerificationJob, F: NumberFieldRecord, n: int) -> CheckRecord:
    closed = weil_etale.vanishing_order_prediction(F, n)
    tables = weil_etale.cohomology_tables(F, n)
    euler = tables[weil_etale.Theory.AR_C].euler_order()
    analytic = dedekind_zeta_leading(F, n, job.precision)
    return _record(
        CheckName.ORDER, F.label, n, CheckStatus.PASS,
        "ord_{s=n} zeta_F = rho_n = sum (-1)^i i dim H^i_ar,c(R(n))",
        {"closed_form": closed, "euler": euler, "analytic": analytic.order},
    )


def _check_special_value(
    job: VerificationJob,
    F: NumberFieldRecord,
    n: int
) -> CheckRecord:
    report = weil_etale.special_value_prediction(
        F, n, prec=job.precision, tolerance=job.tolerance
    )
    values = {
        "closed_form": report.closed_form,
        "correction": report.correction,
        "derham_det": report.derham_det,
        "analytic": report.analytic,
        "order": report.analytic_order,
    }
    provenance = (
        "zeta*_F(n) = C(n) |D|^{1-n} 2^{r1(d1-d2)} (2pi)^{dn-r2-r1 d1} "
        "h_n R_n / (w_n sqrt|D|)" if n >= 1
        else "zeta*_F(n) = +- h_{1-n} R_{1-n} / w_{1-n}"
    )
    if report.resolved:
        values.update(
            predicted=report.predicted_value, ratio=report.ratio,
            sign=report.sign
        )
        return _record(
            CheckName.SPECIAL_VALUE, F.label, n, CheckStatus.PASS,
            provenance, values, report.ratio,
        )
    values.update(
        solved_ratio=report.solved_ratio, reconstructed=report.reconstructed
    )
    return _record(
        CheckName.SPECIAL_VALUE, F.label, n, CheckStatus.UNRESOLVED,
        provenance, values, report.solved_ratio,
        message="Sin datos de teoría K: se informa h R / w implicado",
    )


def _check_fe_consistency(
    job: VerificationJob,
    F: NumberFieldRecord,
    n: int
) -> CheckRecord:
    m = n if n >= 1 else 1 - n
    report = weil_etale.fe_consistency_check(F, m, job.precision, job.tolerance)
    values = {
        "pair": [m, 1 - m],
        "predicted_ratio": report.predicted_ratio,
        "forced_ratio": report.forced_ratio,
        "quotient": report.symbolic_quotient,
    }
    ball = report.numeric_ratio
    if report.analytic_ratio is not None:
        values["analytic_ratio"] = report.analytic_ratio
        ball = report.analytic_ratio
    return _record(
        CheckName.FE_CONSISTENCY, F.label, n, CheckStatus.PASS,
        "pred(n)/pred(1-n) = |D|^{(1-2n)/2} Gamma*(1-n)/Gamma*(n)",
        values, ball,
    )


def _check_duality(job: VerificationJob, F: NumberFieldRecord, n: int) -> CheckRecord:
    report = weil_etale.duality_check(F, n)
    return _record(
        CheckName.DUALITY, F.label, n, CheckStatus.PASS,
        "H^i_W(n) x H^{3-i}_W(1-n) -> Z (rangos), torsión en grado 4-i",
        {"partner": report.partner, "ranks": report.ranks,
         "torsion": report.torsion},
    )


def _check_tables(job: VerificationJob, F: NumberFieldRecord, n: int) -> CheckRecord:
    tables = weil_etale.cohomology_tables(F, n)
    rho = weil_etale.vanishing_order_prediction(F, n)
    values = {
        theory.value: {i: str(g) for i, g in sorted(table.entries.items())}
        for theory, table in tables.items()
    }
    values["rho"] = rho
    m = n if n >= 1 else 1 - n
    entry = F.k_entry(m)
    if entry is not None and F.characters is not None:
        expected = torsion_w_n(F, m)
        values["w_from_characters"] = expected
        if entry.w != expected:
            message = (
                f"{F.label}: w_{m} = {entry.w} en los datos K, pero los "
                f"caracteres dan {expected}"
            )
            raise InvariantViolationError(message)
    return _record(
        CheckName.TABLES, F.label, n, CheckStatus.PASS,
        "tablas W, ar y ar,c de Spec O_F", values,
    )


FIELD_RUNNERS: dict[CheckName, Callable] = {
    CheckName.ORDER: _check_order,
    CheckName.SPECIAL_VALUE: _check_special_value,
    CheckName.FE_CONSISTENCY: _check_fe_consistency,
    CheckName.DUALITY: _check_duality,
    CheckName.TABLES: _check_tables,
}


# Comprobaciones sobre variedades en característica p

def _check_charp_order(job: VerificationJob, W: WeilPolySet, n: int) -> CheckRecord:
    leading = charp.order_leading_at(W, n)
    return _record(
        CheckName.ORDER, W.label, n, CheckStatus.PASS,
        "ord_{t=q^-n} Z = sum (-1)^{i+1} m_i(n), Z* = lim (1-q^n t)^{-ord} Z",
        {"order": leading.order, "leading": leading.coefficient,
         "correction": charp.CORRECTION_FACTOR},
    )


def _check_detstar(job: VerificationJob, W: WeilPolySet, n: int) -> CheckRecord:
    report = charp.detstar_trivialization(W, n)
    values = {
        "detstar": report.value,
        "limit": report.limit_value,
        "semisimple": report.semisimple,
        "correction": report.correction_factor,
    }
    if W.hodge is not None:
        chi = charp.milne_chi(W.hodge, n)
        values["milne_chi"] = chi
        # factor residual |Z*| q^chi: se informa, no se afirma
        values["residual"] = abs(report.limit_value) * Fraction(W.q) ** chi
    provenance = "prod_i Det*(1 - phi q^-n | H^i)^{(-1)^{i+1}}"
    if not report.semisimple_at_zero:
        return _record(
            CheckName.DETSTAR, W.label, n, CheckStatus.UNRESOLVED,
            provenance, values,
            message="Frobenius no semisimple en cero: no se afirma Det* = Z*",
        )
    return _record(CheckName.DETSTAR, W.label, n, CheckStatus.PASS, provenance, values)


def _check_rank_order(job: VerificationJob, W: WeilPolySet, n: int) -> CheckRecord:
    report = charp.weil_etale_rank_order(W, n)
    return _record(
        CheckName.RANK_ORDER, W.label, n, CheckStatus.PASS,
        "rank H^i_W(Z(n)) = m_i(n) + m_{i-1}(n)",
        {"multiplicities": report.multiplicities, "ranks": report.ranks,
         "euler": report.euler_side, "t_order": report.t_order,
         "s_order": report.s_order},
    )


def _check_point_count(job: VerificationJob, W: WeilPolySet, n: int) -> CheckRecord:
    provenance = "#X(F_q) por enumeración; P_1 desde a_q"
    if W.curve is None or not sympy.isprime(W.q):
        return _record(
            CheckName.POINT_COUNT, W.label, n, CheckStatus.UNRESOLVED,
            provenance,
            message="Sin ecuación de curva sobre un cuerpo primo",
        )
    count = charp.point_count_curve(W.curve, W.q)
    values = {"counts": count.counts, "p1": count.p1, "declared": W.poly(1)}
    if count.p1 is None:
        return _record(
            CheckName.POINT_COUNT, W.label, n, CheckStatus.UNRESOLVED,
            provenance, values, message="; ".join(count.notes),
        )
    if tuple(count.p1) != W.poly(1):
        message = f"{W.label}: P_1 declarado {W.poly(1)} pero el conteo da {count.p1}"
        raise PredictionMismatchError(message, defect=str(count.p1))
    return _record(CheckName.POINT_COUNT, W.label, n, CheckStatus.PASS, provenance, values)


def _check_functional_equation(
    job: VerificationJob,
    W: WeilPolySet,
    n: int
) -> CheckRecord:
    sign, quotient = charp.zeta_functional_equation(W)
    zeta = charp.zeta_from_weil_polys(W, verify=False)
    return _record(
        CheckName.FUNCTIONAL_EQUATION, W.label, n, CheckStatus.PASS,
        "Z(1/(q^d t)) = +- q^{d chi/2} t^chi Z(t)",
        {"sign": sign, "quotient": quotient, "chi": zeta.euler_characteristic,
         "zeta": str(zeta)},
    )


def _check_riemann_hypothesis(
    job: VerificationJob,
    W: WeilPolySet,
    n: int
) -> CheckRecord:
    report = charp.riemann_hypothesis_check(W, job.tolerance)
    values = {"defects": report.worst_defect}
    duality = charp.poincare_duality_defects(W)
    values["poincare_defects"] = duality
    if not report.passed or duality:
        message = f"{W.label}: raíces fuera de |alpha| = q^(i/2) o sin dualidad"
        raise InvariantViolationError(message)
    return _record(
        CheckName.RIEMANN_HYPOTHESIS, W.label, n, CheckStatus.PASS,
        "||alpha| - q^{i/2}| < tol para cada P_i", values,
    )


VARIETY_RUNNERS: dict[CheckName, Callable] = {
    CheckName.ORDER: _check_charp_order,
    CheckName.DETSTAR: _check_detstar,
    CheckName.RANK_ORDER: _check_rank_order,
    CheckName.POINT_COUNT: _check_point_count,
    CheckName.FUNCTIONAL_EQUATION: _check_functional_equation,
    CheckName.RIEMANN_HYPOTHESIS: _check_riemann_hypothesis,
}


# Orquestación

def _defect(exc: SpecialValueError) -> Optional[str]:
    if isinstance(exc, (PredictionMismatchError, InconsistencyError)):
        return exc.defect
    if isinstance(exc, DualityViolationError):
        return str(list(exc.degrees))
    return None


def run_check(job: VerificationJob, check: CheckName, n: int) -> CheckRecord:
    """Ejecuta una comprobación; los errores del motor se vuelven ``fail``."""
    if job.field is not None:
        target, runner = job.field, FIELD_RUNNERS[check]
    else:
        target, runner = job.variety, VARIETY_RUNNERS[check]
    try:
        record = runner(job, target, n)
    except SpecialValueError as exc:
        logger.warning("%s %s n=%d: %s", target.label, check.value, n, exc)
        return _record(
            check, target.label, n, CheckStatus.FAIL,
            type(exc).__name__, defect=_defect(exc), message=str(exc),
        )
    logger.info(
        "%s %s n=%d: %s", target.label, check.value, n, record.status.value
    )
    return record


def _tasks(job: VerificationJob) -> list[tuple[CheckName, int]]:
    tasks = []
    for check in job.checks:
        twists = job.twists[:1] if check in TWIST_FREE else job.twists
        tasks.extend((check, n) for n in twists)
    return tasks


def _run_task(args: tuple[VerificationJob, CheckName, int]) -> CheckRecord:
    return run_check(*args)


def run_verification(job: VerificationJob, workers: Optional[int] = None) -> Report:
    """Ejecuta todas las comprobaciones del trabajo, una tarea por (check, n).

    El orden de los registros sigue el orden de las tareas, también con
    varios procesos.
    """
    workers = workers or get_settings().workers
    tasks = [(job, check, n) for check, n in _tasks(job)]
    logger.info(
        "Inicio del trabajo %s: %d tareas, %d procesos",
        job.label, len(tasks), workers
    )
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(_run_task, tasks))
    else:
        records = [_run_task(task) for task in tasks]
    report = Report(
        label=job.label,
        generated_at=datetime.now(timezone.utc).isoformat(timespec="seconds"),
        precision=job.precision,
        tolerance=job.tolerance,
        records=records,
    )
    logger.info("Fin del trabajo %s: %s", job.label, report.status.value)
    return report


def exit_code(report: Report) -> int:
    return 1 if report.status is CheckStatus.FAIL else 0


def report_to_dict(report: Report) -> dict:
    data = report.model_dump(mode="json")
    data["status"] = report.status.value
    return data


def render_json(report: Report) -> str:
    return json.dumps(report_to_dict(report), sort_keys=True, indent=2,
                      ensure_ascii=False)


def render_text(report: Report) -> str:
    lines = [
        f"# {report.label}  generado {report.generated_at}",
        f"# precisión {report.precision} bits, tolerancia {report.tolerance}",
    ]
    for r in report.records:
        line = f"{r.status.value:<20} {r.check.value:<20} n={r.n:<4} {r.target}"
        if r.radius is not None:
            line += f"  radio={r.radius}"
        if r.message:
            line += f"  ({r.message})"
        lines.append(line)
    lines.append(f"estado: {report.status.value}")
    return "\n".join(lines)


def render(report: Report, fmt: str = "json") -> str:
    if fmt == "text":
        return render_text(report)
    if fmt == "json":
        return render_json(report)
    message = f"Formato desconocido: {fmt}"
    raise DomainError(message)
