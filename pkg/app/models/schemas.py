from typing import List, Optional, Tuple

from pydantic import BaseModel, Field

# complex numbers travel as [re, im]
ComplexPair = Tuple[float, float]


class ToeplitzDTO(BaseModel):
    n: int = Field(ge=1)
    t: List[ComplexPair]  # ascending k = -n+1 .. n-1


class FRElementDTO(BaseModel):
    n: int = Field(ge=1)
    a: List[ComplexPair]


class CirculantDTO(BaseModel):
    m: int = Field(ge=1)
    c: List[ComplexPair]


class SpectralFactorDTO(BaseModel):
    q: List[ComplexPair]
    residual: float


class DecompositionDTO(BaseModel):
    rank: int
    angles: List[float]
    weights: List[float]


class MultiplicityReq(BaseModel):
    matrix: ToeplitzDTO
    max_k: Optional[int] = None
    step: float = 1.0


class MultiplicityDTO(BaseModel):
    multiplicity: int
    rank: int


class StateCheckDTO(BaseModel):
    density: FRElementDTO
    pure: Optional[bool] = None
    angles: Optional[List[float]] = None
    value: Optional[float] = None


class PureStateReq(BaseModel):
    angles: List[float]


class PureStateDTO(BaseModel):
    xi: List[ComplexPair]
    angles: List[float]
    density: FRElementDTO


class EvaluateReq(BaseModel):
    density: FRElementDTO
    matrix: ToeplitzDTO


class ValueDTO(BaseModel):
    value: float


class DistanceReq(BaseModel):
    phi: FRElementDTO
    psi: FRElementDTO


class ConvexProgramDTO(BaseModel):
    value: float
    lower: float
    upper: float
    iterations: int
    converged: bool
    optimizer: ToeplitzDTO


class DistanceDTO(BaseModel):
    connes: ConvexProgramDTO
    kantorovich: float
    inequality_ok: bool
    dual_route: Optional[float] = None


class CompleteReq(BaseModel):
    matrix: ToeplitzDTO
    m: int


class CompressReq(BaseModel):
    matrix: CirculantDTO
    n: int


class EigenvaluesDTO(BaseModel):
    eigenvalues: List[ComplexPair]
    positive: bool


class TensorRankDTO(BaseModel):
    n: int
    m: int
    rank: int
    full: bool
    prime: bool


class PropagationReq(BaseModel):
    system: str = Field(pattern="^(toeplitz|circulant|full)$")
    size: int = Field(ge=1)
    max_k: int = Field(default=8, ge=1)


class PropagationDTO(BaseModel):
    prop: int
    dims: List[int]


class GeometryCheckItemDTO(BaseModel):
    name: str
    passed: bool
    value: float
    bound: float


class GeometryCheckDTO(BaseModel):
    passed: bool
    checks: List[GeometryCheckItemDTO]


class SampleReq(BaseModel):
    kind: str
    count: int = Field(default=200, ge=0)
    slice_d: float = -0.4


class SampleDTO(BaseModel):
    columns: List[str]
    rows: List[List[float]]


class ErrorDTO(BaseModel):
    error: str
    detail: str
