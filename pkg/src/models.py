from enum import Enum
from fractions import Fraction
from math import gcd
from typing import Any, Dict, List, Optional, Tuple

import sympy
from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    RootModel,
    field_validator,
    model_validator,
)

from .errors import (
    ConductorDiscriminantError,
    DomainError,
    SchemaError,
    SignatureError,
)
from .numeric import BallComplex, BallReal, LeadingTaylor, parse_real
from .settings import get_settings


def _pair_key(key: Any) -> Tuple[int, int]:
    # Las claves JSON llegan como "p,q"
    if isinstance(key, str):
        parts = key.replace(" ", "").split(",")
        if len(parts) != 2:
            message = f"Clave de par inválida: '{key}'"
            raise SchemaError(message)
        try:
            return int(parts[0]), int(parts[1])
        except ValueError as exc:
            message = f"Clave de par inválida: '{key}'"
            raise SchemaError(message) from exc
    if isinstance(key, (list, tuple)) and len(key) == 2:
        return int(key[0]), int(key[1])
    message = f"Clave de par inválida: {key!r}"
    raise SchemaError(message)


# Caracteres de Dirichlet

class DirichletCharacter(BaseModel):
    """Carácter de Dirichlet con valores chi(a) = exp(2 pi i k_a / order).

    Los exponentes ``k_a`` son la representación ciclotómica exacta; las
    bolas complejas sólo aparecen al evaluar.
    """
    model_config = ConfigDict(frozen=True)

    modulus: int = Field(..., ge=1, description="Módulo f del carácter")
    order: int = Field(
        ...,
        ge=1,
        description="Orden N de las raíces de la unidad usadas como valores"
    )
    values: Dict[int, int] = Field(
        ...,
        description="Exponente k de chi(a) para cada unidad a módulo f"
    )

    @model_validator(mode="before")
    @classmethod
    def _normalize_values(cls, data):
        if not isinstance(data, dict):
            return data
        raw = data.get("values")
        modulus = data.get("modulus")
        order = data.get("order")
        if raw is None or not isinstance(modulus, int) \
                or not isinstance(order, int) or modulus < 1 or order < 1:
            return data
        pairs = raw.items() if isinstance(raw, dict) else raw
        values: Dict[int, int] = {}
        for pair in pairs:
            try:
                a, k = (int(x) for x in pair)
            except (TypeError, ValueError) as exc:
                message = f"Fila de valores inválida: {pair!r}"
                raise SchemaError(message) from exc
            values[a % modulus] = k % order
        return {**data, "values": values}

    @model_validator(mode="after")
    def _check_character(self):
        f = self.modulus
        units = {a for a in range(f) if gcd(a, f) == 1}
        if set(self.values) != units:
            message = (
                f"El carácter mod {f} debe dar un valor para cada unidad "
                "y sólo para ellas"
            )
            raise SchemaError(message)
        if self.values[1 % f] != 0:
            message = "chi(1) debe ser 1"
            raise SchemaError(message)
        # (Z/f)^x está generado por los primos menores que f que no lo dividen
        generators = [p for p in sympy.primerange(2, f) if f % p]
        for a in units:
            for p in generators:
                lhs = self.values[(a * p) % f]
                rhs = (self.values[a] + self.values[p]) % self.order
                if lhs != rhs:
                    message = (
                        f"El carácter mod {f} no es multiplicativo "
                        f"en ({a}, {p})"
                    )
                    raise SchemaError(message)
        if (2 * self.values[(f - 1) % f]) % self.order:
            message = "chi(-1) debe ser +1 o -1"
            raise SchemaError(message)
        return self

    def exponent(self, a: int) -> Optional[int]:
        """Exponente de chi(a), o None cuando gcd(a, f) > 1."""
        return self.values.get(a % self.modulus)

    @property
    def is_principal(self) -> bool:
        return all(k == 0 for k in self.values.values())

    @property
    def is_real(self) -> bool:
        return all((2 * k) % self.order == 0 for k in self.values.values())

    @property
    def parity(self) -> str:
        return "even" if self.exponent(-1) == 0 else "odd"

    @property
    def kappa(self) -> int:
        return 0 if self.parity == "even" else 1

    def real_value(self, a: int) -> int:
        k = self.exponent(a)
        if k is None:
            return 0
        if (2 * k) % self.order:
            message = "El carácter no es real"
            raise DomainError(message)
        return 1 if k == 0 else -1

    def value(self, a: int, prec: int) -> BallComplex:
        k = self.exponent(a)
        if k is None:
            return BallComplex.from_real(BallReal.exact(0, prec))
        return BallComplex.root_of_unity(k, self.order, prec)

    def conductor(self) -> int:
        f = self.modulus
        for d in sympy.divisors(f):
            if all(
                k == 0 for a, k in self.values.items() if (a - 1) % d == 0
            ):
                return d
        return f

    @property
    def is_primitive(self) -> bool:
        return self.conductor() == self.modulus

    def conjugate(self) -> "DirichletCharacter":
        return DirichletCharacter(
            modulus=self.modulus,
            order=self.order,
            values={a: -k for a, k in self.values.items()},
        )

    def signature(self) -> Tuple[int, Tuple[Fraction, ...]]:
        # Forma canónica: módulo y valores como fracciones k/N
        return (
            self.modulus,
            tuple(
                Fraction(self.values[a], self.order)
                for a in sorted(self.values)
            ),
        )


# Datos de teoría K y registros de cuerpos

class KTheoryEntry(BaseModel):
    model_config = ConfigDict(frozen=True)

    h: int = Field(..., ge=1, description="Orden h_n de H^2(X_et, Z(n))")
    w: int = Field(..., ge=1, description="Orden w_n de la torsión de H^1")
    R: str = Field(
        ...,
        description="Regulador R_n: decimal, racional o expresión cerrada"
    )

    @field_validator("R", mode="before")
    def _check_regulator(cls, v):
        if isinstance(v, (int, float)):
            v = repr(v)
        if not isinstance(v, str) or not v.strip():
            message = "El regulador debe ser un texto no vacío"
            raise SchemaError(message)
        if not parse_real(v, 64).is_positive():
            message = f"El regulador {v} debe ser positivo"
            raise SchemaError(message)
        return v.strip()

    def regulator(self, prec: int) -> BallReal:
        return parse_real(self.R, prec)


class KTheoryData(RootModel[Dict[int, KTheoryEntry]]):
    """Entradas n -> (h_n, w_n, R_n); n=1 es (h, w, R) clásico."""
    model_config = ConfigDict(frozen=True)

    def get(self, n: int) -> Optional[KTheoryEntry]:
        return self.root.get(n)

    def __contains__(self, n: int) -> bool:
        return n in self.root


class ZetaValue(BaseModel):
    model_config = ConfigDict(frozen=True)

    order: int = Field(..., description="Orden de anulación en s=n")
    value: str = Field(..., description="Coeficiente principal")

    def leading(self, n: int, prec: int) -> LeadingTaylor:
        return LeadingTaylor(n, self.order, parse_real(self.value, prec))


class NumberFieldRecord(BaseModel):
    model_config = ConfigDict(frozen=True)

    label: str = Field(..., min_length=1, description="Etiqueta del cuerpo")
    degree: int = Field(..., ge=1, description="Grado [F:Q]")
    r1: int = Field(..., ge=0, description="Número de lugares reales")
    r2: int = Field(..., ge=0, description="Número de lugares complejos")
    disc: int = Field(..., description="Discriminante D_F")
    characters: Optional[List[DirichletCharacter]] = Field(
        None,
        description="Caracteres de Dirichlet primitivos del cuerpo abeliano"
    )
    invariants: Optional[KTheoryData] = Field(
        None,
        description="Datos externos n -> (h_n, w_n, R_n)"
    )
    zeta_values: Optional[Dict[int, ZetaValue]] = Field(
        None,
        description="Tabla externa de datos principales de zeta_F"
    )

    @field_validator("label")
    def _strip_label(cls, v):
        if not v.strip():
            message = "La etiqueta no puede estar vacía"
            raise SchemaError(message)
        return v.strip()

    @model_validator(mode="after")
    def _check_record(self):
        if self.r1 + 2 * self.r2 != self.degree:
            message = (
                f"Signatura ({self.r1}, {self.r2}) incompatible con "
                f"grado {self.degree}"
            )
            raise SignatureError(message)
        if self.disc == 0:
            message = "El discriminante no puede ser 0"
            raise SchemaError(message)
        if (self.disc > 0) != (self.r2 % 2 == 0):
            message = (
                f"El signo del discriminante {self.disc} no es (-1)^r2 "
                f"con r2={self.r2}"
            )
            raise SignatureError(message)
        if self.characters is not None:
            self._check_characters(self.characters)
        return self

    def _check_characters(self, characters: List[DirichletCharacter]) -> None:
        if len(characters) != self.degree:
            message = (
                f"Se esperaban {self.degree} caracteres y hay "
                f"{len(characters)}"
            )
            raise SchemaError(message)
        signatures = {chi.signature() for chi in characters}
        if len(signatures) != len(characters):
            message = "Caracteres repetidos"
            raise SchemaError(message)
        for chi in characters:
            if not chi.is_primitive:
                message = f"El carácter mod {chi.modulus} no es primitivo"
                raise SchemaError(message)
            if chi.conjugate().signature() not in signatures:
                message = "El conjunto de caracteres no es cerrado por inversión"
                raise SchemaError(message)
        if not any(chi.is_principal for chi in characters):
            message = "Falta el carácter principal"
            raise SchemaError(message)
        odd = sum(chi.parity == "odd" for chi in characters)
        if (self.r2 == 0 and odd) or (self.r2 > 0 and 2 * odd != self.degree):
            message = (
                f"Paridades de los caracteres ({odd} impares) incompatibles "
                f"con la signatura ({self.r1}, {self.r2})"
            )
            raise SignatureError(message)
        product = 1
        for chi in characters:
            product *= chi.conductor()
        if product != abs(self.disc):
            message = (
                f"Conductor-discriminante: producto de conductores {product} "
                f"!= |D_F| = {abs(self.disc)}"
            )
            raise ConductorDiscriminantError(message)

    @property
    def abs_disc(self) -> int:
        return abs(self.disc)

    @property
    def is_abelian(self) -> bool:
        return self.characters is not None

    def rho(self, n: int) -> int:
        """Orden de anulación de zeta_F en s=n (forma cerrada)."""
        if n < 0:
            return self.r2 if n % 2 else self.r1 + self.r2
        if n == 0:
            return self.r1 + self.r2 - 1
        if n == 1:
            return -1
        return 0

    def k_entry(self, n: int) -> Optional[KTheoryEntry]:
        if self.invariants is None:
            return None
        return self.invariants.get(n)


# Estructuras de Hodge

class HodgeStructure(BaseModel):
    """Números de Hodge de H^i(X(C), C) y el desdoblamiento del término medio."""
    model_config = ConfigDict(frozen=True)

    weight: int = Field(..., ge=0, description="Peso i")
    hpq: Dict[Tuple[int, int], int] = Field(
        ...,
        description="Números de Hodge h^{p,q} con p+q = i"
    )
    middle_split: Optional[Tuple[int, int]] = Field(
        None,
        description="(h^{i/2,+}, h^{i/2,-}) para peso par"
    )

    @field_validator("hpq", mode="before")
    def _parse_keys(cls, v):
        if isinstance(v, dict):
            return {_pair_key(k): val for k, val in v.items()}
        return v

    @model_validator(mode="after")
    def _check_hodge(self):
        i = self.weight
        for (p, q), h in self.hpq.items():
            if p < 0 or q < 0 or p + q != i:
                message = f"h^({p},{q}) no pertenece al peso {i}"
                raise SchemaError(message)
            if h < 0:
                message = f"h^({p},{q}) negativo"
                raise SchemaError(message)
            if self.hpq.get((q, p), 0) != h:
                message = f"Falta la simetría h^({p},{q}) = h^({q},{p})"
                raise SchemaError(message)
        if i % 2:
            if self.middle_split is not None:
                message = "El peso impar no admite desdoblamiento medio"
                raise SchemaError(message)
            return self
        middle = self.h(i // 2, i // 2)
        split = self.middle_split or (0, 0)
        if min(split) < 0 or sum(split) != middle:
            message = (
                f"El desdoblamiento {split} no suma h^({i // 2},{i // 2}) "
                f"= {middle}"
            )
            raise SchemaError(message)
        return self

    def h(self, p: int, q: int) -> int:
        return self.hpq.get((p, q), 0)

    def split(self) -> Tuple[int, int]:
        return self.middle_split or (0, 0)

    @property
    def dimension(self) -> int:
        return sum(self.hpq.values())


# Datos de característica p

class HodgeNumbersFp(RootModel[Dict[Tuple[int, int], int]]):
    """dim H^j(X, Omega^i) indexado por (i, j)."""
    model_config = ConfigDict(frozen=True)

    @model_validator(mode="before")
    @classmethod
    def _parse_keys(cls, v):
        if isinstance(v, dict):
            return {_pair_key(k): val for k, val in v.items()}
        return v

    @model_validator(mode="after")
    def _check_values(self):
        for (i, j), h in self.root.items():
            if i < 0 or j < 0 or h < 0:
                message = f"Número de Hodge inválido h^({i},{j}) = {h}"
                raise SchemaError(message)
        return self

    @property
    def hij(self) -> Dict[Tuple[int, int], int]:
        return self.root


class CurveSpec(BaseModel):
    """Curva y^2 = f(x); coeficientes de f en orden ascendente."""
    model_config = ConfigDict(frozen=True)

    coefficients: Tuple[int, ...] = Field(
        ...,
        description="Coeficientes de f(x), del término constante al principal"
    )

    @field_validator("coefficients")
    def _check_degree(cls, v):
        while len(v) > 1 and v[-1] == 0:
            v = v[:-1]
        if not 3 <= len(v) - 1 <= 6:
            message = "Sólo se admiten curvas y^2 = f(x) con 3 <= deg f <= 6"
            raise SchemaError(message)
        return v

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    @property
    def genus(self) -> int:
        return (self.degree - 1) // 2


class WeilPolySet(BaseModel):
    model_config = ConfigDict(frozen=True)

    label: str = Field("variety", min_length=1, description="Etiqueta")
    q: int = Field(..., ge=2, description="Cardinal del cuerpo finito")
    dim: int = Field(..., ge=0, description="Dimensión d-1 de la variedad")
    polys: Dict[int, Tuple[int, ...]] = Field(
        ...,
        description="P_i(t) por grado i, coeficientes ascendentes"
    )
    jordan: Optional[Dict[Tuple[int, int], Tuple[int, ...]]] = Field(
        None,
        description="Bloques de Jordan (i, autovalor) -> tamaños"
    )
    hodge: Optional[HodgeNumbersFp] = Field(
        None,
        description="Números de Hodge dim H^j(X, Omega^i)"
    )
    curve: Optional[CurveSpec] = Field(
        None,
        description="Ecuación de la curva, si la variedad es una curva"
    )

    @field_validator("jordan", mode="before")
    def _parse_jordan(cls, v):
        if isinstance(v, dict):
            return {_pair_key(k): val for k, val in v.items()}
        return v

    @model_validator(mode="after")
    def _check_polys(self):
        factors = sympy.factorint(self.q)
        if len(factors) != 1:
            message = f"q={self.q} no es potencia de un primo"
            raise SchemaError(message)
        top = 2 * self.dim
        for i, coeffs in self.polys.items():
            if not 0 <= i <= top:
                message = f"Grado {i} fuera de [0, {top}]"
                raise SchemaError(message)
            if not coeffs or coeffs[0] != 1:
                message = f"P_{i} debe tener término constante 1"
                raise SchemaError(message)
        if self.poly(0) != (1, -1):
            message = "P_0 debe ser 1 - t"
            raise SchemaError(message)
        if self.poly(top) != (1, -self.q ** self.dim):
            message = f"P_{top} debe ser 1 - q^{self.dim} t"
            raise SchemaError(message)
        for (i, eigenvalue), blocks in (self.jordan or {}).items():
            if not 0 <= i <= top or not blocks or min(blocks) < 1:
                message = f"Datos de Jordan inválidos en ({i}, {eigenvalue})"
                raise SchemaError(message)
        if self.hodge is not None:
            for i, j in self.hodge.hij:
                if i > self.dim or j > self.dim:
                    message = f"h^({i},{j}) fuera de 0 <= i,j <= {self.dim}"
                    raise SchemaError(message)
        if self.curve is not None and self.curve.genus != self.dim_h1() // 2:
            message = "El género de la curva no coincide con deg P_1 / 2"
            raise SchemaError(message)
        return self

    @property
    def p(self) -> int:
        return next(iter(sympy.factorint(self.q)))

    @property
    def top_degree(self) -> int:
        return 2 * self.dim

    def poly(self, i: int) -> Tuple[int, ...]:
        # Grados ausentes: cohomología nula
        coeffs = tuple(self.polys.get(i, (1,)))
        while len(coeffs) > 1 and coeffs[-1] == 0:
            coeffs = coeffs[:-1]
        return coeffs

    def dim_h1(self) -> int:
        return len(self.poly(1)) - 1

    def blocks(self, i: int, eigenvalue: int) -> Tuple[int, ...]:
        if self.jordan is None:
            return ()
        return self.jordan.get((i, eigenvalue), ())


# Trabajos e informes

class CheckName(str, Enum):
    ORDER = "order"
    SPECIAL_VALUE = "special-value"
    FE_CONSISTENCY = "fe-consistency"
    DUALITY = "duality"
    TABLES = "tables"
    DETSTAR = "detstar"
    RANK_ORDER = "rank-order"
    POINT_COUNT = "point-count"
    FUNCTIONAL_EQUATION = "functional-equation"
    RIEMANN_HYPOTHESIS = "riemann-hypothesis"


FIELD_CHECKS = (
    CheckName.ORDER,
    CheckName.SPECIAL_VALUE,
    CheckName.FE_CONSISTENCY,
    CheckName.DUALITY,
    CheckName.TABLES,
)

VARIETY_CHECKS = (
    CheckName.ORDER,
    CheckName.DETSTAR,
    CheckName.RANK_ORDER,
    CheckName.POINT_COUNT,
    CheckName.FUNCTIONAL_EQUATION,
    CheckName.RIEMANN_HYPOTHESIS,
)


class CheckStatus(str, Enum):
    PASS = "pass"
    FAIL = "fail"
    UNRESOLVED = "unresolved-symbolic"


def parse_twists(v: Any) -> List[int]:
    """Acepta "a..b", un entero, {"from": a, "to": b} o una lista."""
    if isinstance(v, int) and not isinstance(v, bool):
        return [v]
    if isinstance(v, str):
        s = v.strip()
        try:
            if ".." in s:
                lo, hi = (int(x) for x in s.split("..", 1))
                if lo > hi:
                    message = f"Rango vacío: '{v}'"
                    raise SchemaError(message)
                return list(range(lo, hi + 1))
            return [int(s)]
        except ValueError as exc:
            message = f"Rango de twists inválido: '{v}'"
            raise SchemaError(message) from exc
    if isinstance(v, dict) and {"from", "to"} <= set(v):
        return parse_twists(f"{v['from']}..{v['to']}")
    if isinstance(v, (list, tuple)):
        return [int(x) for x in v]
    message = f"Rango de twists inválido: {v!r}"
    raise SchemaError(message)


class VerificationJob(BaseModel):
    model_config = ConfigDict(frozen=True)

    label: str = Field("job", description="Etiqueta del trabajo")
    field: Optional[NumberFieldRecord] = Field(
        None,
        description="Cuerpo de números objetivo"
    )
    variety: Optional[WeilPolySet] = Field(
        None,
        description="Variedad sobre un cuerpo finito objetivo"
    )
    twists: List[int] = Field(..., min_length=1, description="Twists n")
    checks: List[CheckName] = Field(
        ...,
        min_length=1,
        description="Comprobaciones a ejecutar"
    )
    precision: int = Field(
        default_factory=lambda: get_settings().default_precision,
        ge=64,
        description="Precisión de trabajo en bits"
    )
    tolerance: float = Field(
        default_factory=lambda: get_settings().tolerance,
        gt=0.0,
        lt=1.0,
        description="Tolerancia relativa"
    )

    @field_validator("twists", mode="before")
    def _parse_twists(cls, v):
        return parse_twists(v)

    @model_validator(mode="before")
    @classmethod
    def _resolve_all(cls, data):
        if isinstance(data, dict) and data.get("checks") in ("all", ["all"]):
            allowed = VARIETY_CHECKS if data.get("variety") else FIELD_CHECKS
            data = {**data, "checks": [c.value for c in allowed]}
        return data

    @model_validator(mode="after")
    def _check_target(self):
        if (self.field is None) == (self.variety is None):
            message = "El trabajo necesita exactamente un objetivo"
            raise SchemaError(message)
        allowed = FIELD_CHECKS if self.field is not None else VARIETY_CHECKS
        extra = [c.value for c in self.checks if c not in allowed]
        if extra:
            message = f"Comprobaciones no aplicables al objetivo: {extra}"
            raise SchemaError(message)
        return self

    @property
    def target_label(self) -> str:
        target = self.field if self.field is not None else self.variety
        return target.label


class CheckRecord(BaseModel):
    check: CheckName
    target: str
    n: int
    status: CheckStatus
    provenance: str = Field(..., description="Fórmula usada")
    precision: Optional[int] = Field(
        None,
        description="Precisión de trabajo de las afirmaciones numéricas"
    )
    radius: Optional[str] = Field(
        None,
        description="Radio final de la bola comparada"
    )
    values: Dict[str, Any] = Field(default_factory=dict)
    defect: Optional[str] = None
    message: Optional[str] = None


class Report(BaseModel):
    label: str
    generated_at: str
    precision: int
    tolerance: float
    records: List[CheckRecord] = Field(default_factory=list)

    @property
    def status(self) -> CheckStatus:
        statuses = {r.status for r in self.records}
        if CheckStatus.FAIL in statuses:
            return CheckStatus.FAIL
        if CheckStatus.UNRESOLVED in statuses:
            return CheckStatus.UNRESOLVED
        return CheckStatus.PASS
