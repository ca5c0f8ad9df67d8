"""Lectura de registros JSON de cuerpos, variedades y trabajos."""
import json
import logging
from pathlib import Path
from typing import Any, Union

from pydantic import BaseModel, ValidationError

from .errors import SchemaError
from .models import NumberFieldRecord, VerificationJob, WeilPolySet


logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def _read_json(path: PathLike) -> Any:
    path = Path(path)
    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError as exc:
        message = f"No existe el archivo '{path}'"
        raise SchemaError(message) from exc
    except json.JSONDecodeError as exc:
        message = f"JSON inválido en '{path}': {exc.msg} (línea {exc.lineno})"
        raise SchemaError(message) from exc


def validate(model: type[BaseModel], data: Any, source: str = "entrada") -> Any:
    """Valida con pydantic y traduce los errores a ``SchemaError``."""
    try:
        return model.model_validate(data)
    except ValidationError as exc:
        first = exc.errors()[0]
        location = ".".join(str(part) for part in first["loc"]) or "raíz"
        message = f"{source}: {location}: {first['msg']}"
        raise SchemaError(message) from exc


def ingest_field(path: PathLike) -> NumberFieldRecord:
    """Registro de cuerpo validado, con las comprobaciones cruzadas de carga."""
    record = validate(NumberFieldRecord, _read_json(path), str(path))
    logger.info(
        "Cuerpo %s: grado %d, disc %d, %s",
        record.label, record.degree, record.disc,
        "abeliano" if record.is_abelian else "con tabla de valores"
    )
    return record


def ingest_variety(path: PathLike) -> WeilPolySet:
    record = validate(WeilPolySet, _read_json(path), str(path))
    logger.info("Variedad %s sobre F_%d, dim %d", record.label, record.q, record.dim)
    return record


def _resolve_target(value: Any, base: Path) -> Any:
    # Los objetivos pueden ir en línea o como ruta relativa al trabajo
    if isinstance(value, str):
        return _read_json(base / value)
    return value


def load_job(path: PathLike) -> VerificationJob:
    path = Path(path)
    data = _read_json(path)
    if not isinstance(data, dict):
        message = f"{path}: el trabajo debe ser un objeto JSON"
        raise SchemaError(message)
    for key in ("field", "variety"):
        if data.get(key) is not None:
            data[key] = _resolve_target(data[key], path.parent)
    job = validate(VerificationJob, data, str(path))
    logger.info(
        "Trabajo %s: objetivo %s, twists %s, checks %s",
        job.label, job.target_label, job.twists,
        [c.value for c in job.checks]
    )
    return job
