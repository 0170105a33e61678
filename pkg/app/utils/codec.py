import csv
from typing import Iterable, List, Sequence, TextIO

import numpy as np

from app.core.errors import InvalidInputError
from app.models.domain import (
    CirculantMatrix,
    ConvexProgramResult,
    FRElement,
    GeometryCheck,
    SpectralFactor,
    ToeplitzMatrix,
    VandermondeDecomposition,
)
from app.models.schemas import (
    CirculantDTO,
    ComplexPair,
    ConvexProgramDTO,
    DecompositionDTO,
    FRElementDTO,
    GeometryCheckDTO,
    GeometryCheckItemDTO,
    SpectralFactorDTO,
    ToeplitzDTO,
)


def to_pairs(values: Iterable[complex]) -> List[ComplexPair]:
    return [(float(z.real), float(z.imag)) for z in np.asarray(list(values), dtype=complex)]


def from_pairs(pairs: Sequence[ComplexPair]) -> np.ndarray:
    if len(pairs) == 0:
        return np.zeros(0, dtype=complex)
    values = np.asarray(pairs, dtype=float)
    return values[:, 0] + 1j * values[:, 1]


def toeplitz_from_dto(dto: ToeplitzDTO) -> ToeplitzMatrix:
    return ToeplitzMatrix(dto.n, from_pairs(dto.t))


def toeplitz_to_dto(T: ToeplitzMatrix) -> ToeplitzDTO:
    return ToeplitzDTO(n=T.n, t=to_pairs(T.t))


def fr_from_dto(dto: FRElementDTO) -> FRElement:
    return FRElement(dto.n, from_pairs(dto.a))


def fr_to_dto(a: FRElement) -> FRElementDTO:
    return FRElementDTO(n=a.n, a=to_pairs(a.a))


def circulant_from_dto(dto: CirculantDTO) -> CirculantMatrix:
    return CirculantMatrix(dto.m, from_pairs(dto.c))


def circulant_to_dto(C: CirculantMatrix) -> CirculantDTO:
    return CirculantDTO(m=C.m, c=to_pairs(C.c))


def factor_to_dto(factor: SpectralFactor) -> SpectralFactorDTO:
    return SpectralFactorDTO(q=to_pairs(factor.q), residual=factor.residual)


def decomposition_to_dto(vd: VandermondeDecomposition) -> DecompositionDTO:
    return DecompositionDTO(
        rank=vd.rank,
        angles=[float(x) for x in vd.angles],
        weights=[float(w) for w in vd.weights]
    )


def program_to_dto(result: ConvexProgramResult) -> ConvexProgramDTO:
    return ConvexProgramDTO(
        value=result.value,
        lower=result.lower,
        upper=result.upper,
        iterations=result.iterations,
        converged=result.converged,
        optimizer=toeplitz_to_dto(result.optimizer)
    )


def checks_to_dto(checks: Sequence[GeometryCheck]) -> GeometryCheckDTO:
    return GeometryCheckDTO(
        passed=all(check.passed for check in checks),
        checks=[GeometryCheckItemDTO(name=c.name, passed=c.passed, value=c.value, bound=c.bound) for c in checks]
    )


def write_csv(handle: TextIO, columns: Sequence[str], rows: np.ndarray) -> None:
    """Header row, then one row per point in shortest round-trip form."""
    if rows.ndim != 2 or rows.shape[1] != len(columns):
        raise InvalidInputError(f"rows of width {rows.shape[-1]} do not match {len(columns)} columns")
    writer = csv.writer(handle, lineterminator="\n")
    writer.writerow(columns)
    writer.writerows([repr(float(value)) for value in row] for row in rows)
