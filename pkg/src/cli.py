"""Línea de comandos: eval, order, tables, verify, charp, oracle, serve.

Código de salida: 0 si todo pasa, 1 si alguna comprobación falla, 2 ante
errores de entrada. Los rangos negativos de twists se escriben ``--n=-3..3``.
"""
import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

from .errors import SchemaError, SpecialValueError
from .ingest import ingest_field, ingest_variety, load_job, validate
from .models import CurveSpec, parse_twists
from .services import (
    charp_summary,
    cohomology_summary,
    curve_oracle,
    quadratic_oracle,
    vanishing_orders,
    zeta_values,
)
from .settings import get_settings
from .verification import exit_code, render, run_verification


logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_INPUT = 2


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="special-values",
        description="Verificación de valores especiales de funciones zeta"
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--prec", type=int, help="Precisión en bits (>= 64)")
    common.add_argument("--tol", type=float, help="Tolerancia relativa")
    common.add_argument("--n", dest="twists", help="Twist o rango a..b")
    common.add_argument("--out", type=Path, help="Archivo de salida")
    common.add_argument(
        "--format", choices=("json", "text"), default="json",
        help="Formato de salida"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    for name, text in (
        ("eval", "Datos principales de zeta_F en los twists"),
        ("order", "Órdenes de anulación: forma cerrada y analítico"),
        ("tables", "Tablas de cohomología Weil-étale y Arakelov"),
    ):
        cmd = sub.add_parser(name, parents=[common], help=text)
        cmd.add_argument("--field", type=Path, required=True)

    verify = sub.add_parser("verify", parents=[common], help="Trabajo completo")
    verify.add_argument("job", type=Path, help="Archivo JSON del trabajo")

    charp = sub.add_parser("charp", parents=[common], help="Rama de característica p")
    charp.add_argument("--variety", type=Path, required=True)

    oracle = sub.add_parser("oracle", help="Oráculos independientes")
    kinds = oracle.add_subparsers(dest="oracle", required=True)
    quadratic = kinds.add_parser("quadratic", parents=[common])
    quadratic.add_argument("D", type=int, help="Discriminante fundamental")
    curve = kinds.add_parser("curve", parents=[common])
    curve.add_argument(
        "--coeffs", required=True,
        help="Coeficientes de f(x), ascendentes, separados por comas"
    )
    curve.add_argument("--q", type=int, required=True)

    serve = sub.add_parser("serve", help="Servidor HTTP")
    serve.add_argument("--host", default="0.0.0.0")
    serve.add_argument("--port", type=int, default=8000)
    return parser


def _twists(args, default: str = "0..1") -> list[int]:
    return parse_twists(args.twists if args.twists is not None else default)


def _emit(text: str, out: Optional[Path]) -> None:
    if out is None:
        print(text)
    else:
        out.write_text(text + "\n", encoding="utf-8")
        logger.info("Informe escrito en %s", out)


def _dump(data: dict, args) -> None:
    if args.format == "text":
        lines = [f"{k}: {json.dumps(v, sort_keys=True)}" for k, v in data.items()]
        _emit("\n".join(lines), args.out)
    else:
        _emit(json.dumps(data, sort_keys=True, indent=2, ensure_ascii=False), args.out)


def _run_verify(args) -> int:
    job = load_job(args.job)
    overrides = {}
    if args.prec is not None:
        overrides["precision"] = args.prec
    if args.tol is not None:
        overrides["tolerance"] = args.tol
    if args.twists is not None:
        overrides["twists"] = parse_twists(args.twists)
    if overrides:
        data = job.model_dump()
        job = validate(type(job), {**data, **overrides}, str(args.job))
    report = run_verification(job)
    _emit(render(report, args.format), args.out)
    return exit_code(report)


def _dispatch(args) -> int:
    if args.command == "verify":
        return _run_verify(args)
    if args.command in ("eval", "order", "tables"):
        F = ingest_field(args.field)
        twists = _twists(args)
        if args.command == "eval":
            _dump(zeta_values(F, twists, args.prec), args)
        elif args.command == "order":
            _dump(vanishing_orders(F, twists, args.prec), args)
        else:
            _dump(cohomology_summary(F, twists), args)
        return EXIT_OK
    if args.command == "charp":
        W = ingest_variety(args.variety)
        _dump(charp_summary(W, _twists(args)), args)
        return EXIT_OK
    if args.command == "oracle":
        if args.oracle == "quadratic":
            _dump(quadratic_oracle(args.D, args.prec), args)
        else:
            coefficients = [int(c) for c in args.coeffs.split(",")]
            curve = validate(CurveSpec, {"coefficients": coefficients}, "--coeffs")
            _dump(curve_oracle(curve, args.q), args)
        return EXIT_OK
    message = f"Subcomando desconocido: {args.command}"
    raise SchemaError(message)


def main(argv: Optional[Sequence[str]] = None) -> int:
    settings = get_settings()
    logging.basicConfig(
        level=settings.log_level,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    parser = _build_parser()
    args = parser.parse_args(argv)

    if args.command == "serve":
        import uvicorn

        uvicorn.run("src.main:app", host=args.host, port=args.port)
        return EXIT_OK

    try:
        return _dispatch(args)
    except SchemaError as exc:
        logger.error("Entrada inválida: %s", exc)
        return EXIT_INPUT
    except ValueError as exc:
        logger.error("Argumento inválido: %s", exc)
        return EXIT_INPUT
    except SpecialValueError as exc:
        logger.error("%s: %s", type(exc).__name__, exc)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
