from fastapi import APIRouter, Depends, HTTPException, Query

from app.core.errors import ToeplitzError
from app.dependencies import SolverOptions, solver_options
from app.models.schemas import CirculantDTO, CompleteReq, CompressReq, EigenvaluesDTO, TensorRankDTO, ToeplitzDTO
from app.services.circulant_service import (
    circulant_eigenvalues,
    circulant_is_positive,
    complete_toeplitz,
    compress_circulant,
    is_prime_order,
    tensor_map_rank,
)
from app.utils.codec import circulant_from_dto, circulant_to_dto, to_pairs, toeplitz_from_dto, toeplitz_to_dto

router = APIRouter(
    prefix="/circulant",
    tags=["Circulant"]
)


@router.post("/complete", response_model=CirculantDTO, responses={400: {"description": "Completion size too small"}})
def api_complete(data: CompleteReq):
    """
    Circulant of size m whose upper-left corner is the given Toeplitz matrix.
    """
    try:
        return circulant_to_dto(complete_toeplitz(toeplitz_from_dto(data.matrix), data.m))
    except ToeplitzError as exc:
        raise HTTPException(status_code=400, detail=str(exc))


@router.post("/compress", response_model=ToeplitzDTO)
def api_compress(data: CompressReq):
    try:
        return toeplitz_to_dto(compress_circulant(circulant_from_dto(data.matrix), data.n))
    except ToeplitzError as exc:
        raise HTTPException(status_code=400, detail=str(exc))


@router.post("/eigenvalues", response_model=EigenvaluesDTO)
def api_eigenvalues(data: CirculantDTO, options: SolverOptions = Depends(solver_options)):
    try:
        C = circulant_from_dto(data)
        return EigenvaluesDTO(
            eigenvalues=to_pairs(circulant_eigenvalues(C)),
            positive=circulant_is_positive(C, tol=options.tol)
        )
    except ToeplitzError as exc:
        raise HTTPException(status_code=400, detail=str(exc))


@router.post("/tensor-rank", response_model=TensorRankDTO)
def api_tensor_rank(n: int = Query(ge=2, le=12)):
    """
    Rank of the map l^inf(C_m) (x) Toep(n) -> M_m(C) with m = 2n-1; full exactly when m is prime.
    """
    m = 2 * n - 1
    rank = tensor_map_rank(n)
    return TensorRankDTO(n=n, m=m, rank=rank, full=rank == m * m, prime=is_prime_order(n))
