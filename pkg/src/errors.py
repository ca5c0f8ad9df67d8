"""Jerarquía de errores del motor de valores especiales.

Los errores de entrada (``SchemaError`` y subclases) se traducen a código de
salida 2 en la CLI y a HTTP 422 en la API; el resto, dentro de un trabajo de
verificación, se convierte en un registro con estado ``fail``.
"""
from typing import Optional


class SpecialValueError(Exception):
    """Base de todos los errores del motor."""


class PoleError(SpecialValueError):
    pass


class DomainError(SpecialValueError):
    pass


class UnverifiedOrderError(SpecialValueError):
    """La bola del coeficiente candidato contiene 0."""


class OrderMismatchError(SpecialValueError):
    def __init__(self, message: str, analytic: int, predicted: int):
        super().__init__(message)
        self.analytic = analytic
        self.predicted = predicted


class InvariantViolationError(SpecialValueError):
    pass


class DualityViolationError(SpecialValueError):
    def __init__(self, message: str, degrees: tuple[int, ...]):
        super().__init__(message)
        self.degrees = degrees


class PredictionMismatchError(SpecialValueError):
    def __init__(self, message: str, defect: Optional[str] = None):
        super().__init__(message)
        self.defect = defect


class InconsistencyError(SpecialValueError):
    def __init__(self, message: str, defect: Optional[str] = None):
        super().__init__(message)
        self.defect = defect


class SingularCurveError(SpecialValueError):
    pass


class OverflowGuardError(SpecialValueError):
    pass


class SchemaError(SpecialValueError):
    """Entrada mal formada."""


class ConductorDiscriminantError(SchemaError):
    pass


class SignatureError(SchemaError):
    pass
