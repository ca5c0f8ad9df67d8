import os
import sys
from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parent

if str(ROOT) not in sys.path:
    sys.path.insert(0, str(ROOT))

os.environ.setdefault("SVE_DEFAULT_PRECISION", "128")
os.environ.setdefault("SVE_TOLERANCE", "1e-20")
os.environ.setdefault("SVE_WORKERS", "1")
os.environ.setdefault("SVE_ENVIRONMENT", "test")
os.environ.setdefault("SVE_DEBUG", "true")

DATA = ROOT / "data"


@pytest.fixture
def data_dir() -> Path:
    return DATA


@pytest.fixture
def field():
    # Carga un registro de cuerpo de data/fields por nombre
    from src.ingest import ingest_field

    def _load(name: str):
        return ingest_field(DATA / "fields" / f"{name}.json")
    return _load


@pytest.fixture
def variety():
    from src.ingest import ingest_variety

    def _load(name: str):
        return ingest_variety(DATA / "varieties" / f"{name}.json")
    return _load
