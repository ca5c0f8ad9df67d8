from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict
from typing import Any, Callable, Dict, Tuple


class Settings(BaseSettings):
    default_precision: int = Field(
        128,
        ge=64,
        description="Precisión de trabajo por defecto, en bits"
    )
    tolerance: float = Field(
        1e-20,
        gt=0.0,
        lt=1.0,
        description="Tolerancia relativa para comparar valores especiales"
    )
    guard_bits: int = Field(
        16,
        ge=0,
        description="Bits de guarda sobre el radio final de cada bola"
    )
    max_quadratic_discriminant: int = Field(
        10**7,
        gt=0,
        description="Cota de |D| para el oráculo de cuerpos cuadráticos"
    )
    rational_denominator_bound: int = Field(
        10**4,
        gt=0,
        description="Denominador máximo en la reconstrucción racional"
    )
    euler_product_prime_bound: int = Field(
        10**4,
        gt=2,
        description="Primos usados en el producto de Euler truncado"
    )
    workers: int = Field(
        1,
        ge=1,
        description="Procesos para ejecutar trabajos (1 = en serie)"
    )
    environment: str = Field(
        "development",
        description="Entorno: development, test, production"
    )
    debug: bool = Field(False, description="Modo debug")
    log_level: str = Field("INFO", description="Nivel de logging")

    model_config = SettingsConfigDict(
        env_prefix="SVE_",
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",
    )


    # Validadores para transformar/validar valores de entorno
    @field_validator(
        "default_precision",
        "guard_bits",
        "max_quadratic_discriminant",
        "rational_denominator_bound",
        "euler_product_prime_bound",
        "workers",
        mode="before"
    )
    def _parse_int(cls, v):
        if isinstance(v, str):
            s = v.strip().replace("_", "")
            try:
                return int(s)
            except Exception as exc:
                message = f"Se esperaba un entero y se recibió '{v}'"
                raise ValueError(message) from exc
        return v


    @field_validator("tolerance", mode="before")
    def _parse_tolerance(cls, v):
        if isinstance(v, str):
            try:
                return float(v.strip())
            except Exception as exc:
                message = "SVE_TOLERANCE debe ser un número real"
                raise ValueError(message) from exc
        return v


    @field_validator("debug", mode="before")
    def _parse_debug(cls, v):
        if isinstance(v, str):
            s = v.strip().lower()
            return s in ("1", "true", "yes", "on")
        return bool(v)


    @field_validator("environment", "log_level", mode="before")
    def _strip(cls, v):
        # Sólo normaliza strings
        if isinstance(v, str):
            return v.strip()
        return v


    @field_validator("log_level")
    def _check_log_level(cls, v):
        level = v.upper()
        if level not in ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"):
            message = f"Nivel de logging desconocido: {v}"
            raise ValueError(message)
        return level

    # Personalizar fuentes de configuración para ignorar
    # variables de entorno nulas o vacías.
    @classmethod
    def settings_customise_sources(
        cls,
        settings_cls,
        init_settings,
        env_settings,
        dotenv_settings,
        file_secret_settings,
    ) -> Tuple[Callable[..., Dict[str, Any]], ...]:

        def _filtered_env() -> Dict[str, Any]:
            raw = env_settings() or {}
            mapped: Dict[str, Any] = {}

            for env_name, value in raw.items():
                # Ignorar valores nulos o strings vacíos
                if value is None or \
                    (isinstance(value, str) and value.strip() == ""):
                    continue
                mapped[env_name.lower()] = value
            return mapped

        return (
            init_settings,
            _filtered_env,
            dotenv_settings,
            file_secret_settings
        )



_settings: Settings | None = None

def get_settings() -> Settings:
    global _settings
    if _settings is None:
        _settings = Settings()
    return _settings


def reset_settings() -> None:
    # Usado por los tests al cambiar variables de entorno
    global _settings
    _settings = None
