"""Operaciones de consulta compartidas por la CLI y la API HTTP."""
import logging
from typing import Iterable, Optional

from . import charp, weil_etale
from .dirichlet import dedekind_zeta_leading
from .models import CurveSpec, NumberFieldRecord, WeilPolySet
from .quadratic import quadratic_invariants, regulator_expression
from .settings import get_settings
from .verification import to_jsonable


logger = logging.getLogger(__name__)


def zeta_values(
    F: NumberFieldRecord,
    twists: Iterable[int],
    prec: Optional[int] = None
) -> dict:
    prec = prec or get_settings().default_precision
    result = {}
    for n in twists:
        leading = dedekind_zeta_leading(F, n, prec)
        result[n] = {
            "order": leading.order,
            "coefficient": leading.coefficient,
            "exact": leading.is_exact(),
            "ball": leading.ball(prec),
        }
    return to_jsonable({"label": F.label, "precision": prec, "values": result})


def vanishing_orders(
    F: NumberFieldRecord,
    twists: Iterable[int],
    prec: Optional[int] = None
) -> dict:
    prec = prec or get_settings().default_precision
    result = {}
    for n in twists:
        result[n] = {
            "closed_form": weil_etale.vanishing_order_prediction(F, n),
            "analytic": dedekind_zeta_leading(F, n, prec).order,
        }
    return to_jsonable({"label": F.label, "orders": result})


def cohomology_summary(F: NumberFieldRecord, twists: Iterable[int]) -> dict:
    result = {}
    for n in twists:
        tables = weil_etale.cohomology_tables(F, n)
        result[n] = {
            theory.value: {i: str(g) for i, g in sorted(t.entries.items())}
            for theory, t in tables.items()
        }
        result[n]["duality_defects"] = weil_etale.duality_report(F, n).violations
    return to_jsonable({"label": F.label, "tables": result})


def charp_summary(W: WeilPolySet, twists: Iterable[int]) -> dict:
    zeta = charp.zeta_from_weil_polys(W, verify=False)
    result = {}
    for n in twists:
        leading = charp.order_leading_at(W, n)
        detstar = charp.detstar_trivialization(W, n)
        entry = {
            "order": leading.order,
            "leading": leading.coefficient,
            "detstar": detstar.value,
            "semisimple": detstar.semisimple,
            "correction": charp.CORRECTION_FACTOR,
        }
        if W.hodge is not None:
            entry["milne_chi"] = charp.milne_chi(W.hodge, n)
        result[n] = entry
    return to_jsonable({
        "label": W.label,
        "zeta": str(zeta),
        "numerator": zeta.numerator,
        "denominator": zeta.denominator,
        "twists": result,
    })


def quadratic_oracle(D: int, prec: Optional[int] = None) -> dict:
    prec = prec or get_settings().default_precision
    h, R, w = quadratic_invariants(D, prec)
    data = {"D": D, "h": h, "R": R, "w": w}
    if D > 0:
        data["R_closed_form"] = regulator_expression(D)
    return to_jsonable(data)


def curve_oracle(curve: CurveSpec, q: int) -> dict:
    count = charp.point_count_curve(curve, q)
    return to_jsonable({
        "q": q,
        "genus": count.genus,
        "counts": count.counts,
        "trace": count.trace,
        "p1": count.p1,
        "notes": count.notes,
    })
