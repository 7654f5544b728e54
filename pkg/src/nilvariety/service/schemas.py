"""Pydantic request/response models mirroring the JSON wire formats."""

from __future__ import annotations

from typing import Dict, List, Literal, Optional

from pydantic import BaseModel, Field


class FieldSpecModel(BaseModel):
    kind: Literal["Q", "Fp"]
    p: Optional[int] = None


class QuadrupleModel(BaseModel):
    variety: Literal["N", "S"] = "N"
    n: int
    field: FieldSpecModel
    X: List[List[str]]
    Y: List[List[str]]
    i: List[str]
    j: List[str]


class ClassifyRequest(BaseModel):
    variety: Literal["N", "S"] = "N"
    quadruple: QuadrupleModel


class ClassifyResponse(BaseModel):
    variety: Literal["N", "S"]
    r: int
    s: int
    commuting: Optional[bool] = None


class MembershipResponse(BaseModel):
    member: bool


class PsiResponse(BaseModel):
    n: int
    field: FieldSpecModel
    t: int
    right_orientation: str
    a: List[str]
    left_orientation: str
    b: List[str]
    pretty: str


class CanonicalRequest(BaseModel):
    n: int
    t: int
    field: FieldSpecModel
    a: List[str]
    b: List[str]


class StabilizerResponse(BaseModel):
    dim: int
    basis: List[List[List[str]]]


class OrbitEquivalentRequest(BaseModel):
    first: QuadrupleModel
    second: QuadrupleModel


class OrbitEquivalentResponse(BaseModel):
    equivalent: bool
    conjugator: Optional[List[List[str]]] = None


class TriangularizeResponse(BaseModel):
    g: List[List[str]]
    g_inverse: List[List[str]]


class DeformRequest(BaseModel):
    quadruple: QuadrupleModel
    tau: str
    r: Optional[int] = None


class SliceBuildRequest(BaseModel):
    kind: Literal["slice"] = "slice"
    n: int
    r: int
    field: FieldSpecModel
    X1: List[List[str]]
    Y1: List[List[str]]
    i: List[str]
    X2: List[List[str]]
    Y2: List[List[str]]
    alpha: Dict[str, List[str]] = Field(default_factory=dict)
    beta: Dict[str, List[str]] = Field(default_factory=dict)


class SliceRegularRequest(BaseModel):
    kind: Literal["regular"] = "regular"
    n: int
    r: int
    field: FieldSpecModel
    c: List[str] = Field(default_factory=list)
    d: List[str] = Field(default_factory=list)
    alpha: List[List[str]] = Field(default_factory=list)
    beta: List[str] = Field(default_factory=list)


class SliceJumpRequest(BaseModel):
    quadruple: QuadrupleModel
    seed: int = 0


class SliceJumpResponse(BaseModel):
    quadruple: QuadrupleModel
    t: int


class CensusRequest(BaseModel):
    variety: Literal["N", "S"] = "N"
    n: int
    q: int
    stratified: bool = False
    jobs: int = 1


class CensusRecordModel(BaseModel):
    variety: str
    n: int
    q: int
    r: Optional[int] = None
    s: Optional[int] = None
    commuting: Optional[bool] = None
    count: str


class CensusResponse(BaseModel):
    records: List[CensusRecordModel]


class SlopeRequest(BaseModel):
    records: List[CensusRecordModel]
    filter: str = ""


class SlopeResponse(BaseModel):
    variety: str
    n: int
    pairs: List[List[str]]
    slope: str
    slope_float: float
    residuals: List[float]


class SCanonicalRequest(BaseModel):
    n: int
    r: int
    field: FieldSpecModel
    corner: Optional[List[List[str]]] = None


class TracePairingRequest(BaseModel):
    quadruple: QuadrupleModel
    maxlen: int


class TracePairingResponse(BaseModel):
    ok: bool
