from contextlib import asynccontextmanager

import logging
from fastapi import APIRouter, FastAPI, HTTPException, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from .errors import SchemaError, SpecialValueError
from .models import VerificationJob
from .schemas import CurveRequest, FieldRequest, VarietyRequest
from .services import (
    charp_summary,
    cohomology_summary,
    curve_oracle,
    quadratic_oracle,
    vanishing_orders,
    zeta_values,
)
from .settings import get_settings
from .verification import report_to_dict, run_verification


# Obtener configuración
settings = get_settings()

# Crear routers para organizar endpoints
zeta_router = APIRouter(prefix="/zeta", tags=["Zeta"])
verify_router = APIRouter(tags=["Verification"])
oracle_router = APIRouter(prefix="/oracle", tags=["Oracles"])
health_router = APIRouter(tags=["Health"])


# Configurar logging
logging.basicConfig(
    level=settings.log_level,
    format="%(asctime)s %(levelname)s %(name)s: %(message)s"
)
logger = logging.getLogger("uvicorn")


@asynccontextmanager
async def lifespan(app: FastAPI):
    logger.info(
        "LIFESPAN startup - precision=%d tolerance=%g workers=%d",
        settings.default_precision, settings.tolerance, settings.workers
    )
    yield


# Crear la aplicación FastAPI
app = FastAPI(
    title="Special Values API",
    version="1.0",
    description="Verificación de valores especiales de funciones zeta",
    docs_url="/docs",
    redoc_url="/redoc",
    lifespan=lifespan
)

# Configuración de CORS
app.add_middleware(
    CORSMiddleware,
    allow_origins=["http://localhost:3000", "http://localhost:8080"],
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)


def _engine_error(exc: SpecialValueError) -> HTTPException:
    # Datos de entrada inválidos: 422; fallo del cálculo: 400
    status_code = 422 if isinstance(exc, SchemaError) else 400
    return HTTPException(status_code=status_code, detail=str(exc))


@app.exception_handler(SchemaError)
async def schema_error_handler(request: Request, exc: SchemaError):
    # Errores lanzados por los validadores de los modelos del cuerpo
    return JSONResponse(status_code=422, content={"detail": str(exc)})


@zeta_router.post("/eval", response_model=dict)
def endpoint_eval(request: FieldRequest):
    try:
        return zeta_values(request.field, request.twists, request.precision)
    except SpecialValueError as exc:
        raise _engine_error(exc) from exc


@zeta_router.post("/order", response_model=dict)
def endpoint_order(request: FieldRequest):
    try:
        return vanishing_orders(request.field, request.twists, request.precision)
    except SpecialValueError as exc:
        raise _engine_error(exc) from exc


@verify_router.post("/tables", response_model=dict)
def endpoint_tables(request: FieldRequest):
    try:
        return cohomology_summary(request.field, request.twists)
    except SpecialValueError as exc:
        raise _engine_error(exc) from exc


@verify_router.post("/verify", response_model=dict)
def endpoint_verify(job: VerificationJob):
    # Las comprobaciones fallidas vienen como registros, no como errores
    report = run_verification(job, workers=1)
    return report_to_dict(report)


@verify_router.post("/charp", response_model=dict)
def endpoint_charp(request: VarietyRequest):
    try:
        return charp_summary(request.variety, request.twists)
    except SpecialValueError as exc:
        raise _engine_error(exc) from exc


@oracle_router.get("/quadratic/{D}", response_model=dict)
def endpoint_quadratic(D: int):
    try:
        return quadratic_oracle(D)
    except SpecialValueError as exc:
        raise _engine_error(exc) from exc


@oracle_router.post("/curve", response_model=dict)
def endpoint_curve(request: CurveRequest):
    try:
        return curve_oracle(request.curve, request.q)
    except SpecialValueError as exc:
        raise _engine_error(exc) from exc


# Health check endpoint
@health_router.get("/health")
def health_check():
    return {"status": "healthy", "version": "1.0"}


app.include_router(zeta_router, prefix="/api/v1")
app.include_router(verify_router, prefix="/api/v1")
app.include_router(oracle_router, prefix="/api/v1")
app.include_router(health_router, prefix="/api/v1")
