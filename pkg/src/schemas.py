from typing import List, Optional

from pydantic import BaseModel, Field, field_validator

from .models import CurveSpec, NumberFieldRecord, WeilPolySet, parse_twists


class FieldRequest(BaseModel):
    field: NumberFieldRecord
    twists: List[int] = Field(..., min_length=1, description="Twists n")
    precision: Optional[int] = Field(None, ge=64, description="Bits")

    @field_validator("twists", mode="before")
    def _parse_twists(cls, v):
        return parse_twists(v)


class VarietyRequest(BaseModel):
    variety: WeilPolySet
    twists: List[int] = Field(..., min_length=1, description="Twists n")

    @field_validator("twists", mode="before")
    def _parse_twists(cls, v):
        return parse_twists(v)


class CurveRequest(BaseModel):
    curve: CurveSpec
    q: int = Field(..., ge=3, description="Primo del cuerpo finito")
