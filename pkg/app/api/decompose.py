from fastapi import APIRouter, Depends, HTTPException

from app.core.errors import ToeplitzError
from app.dependencies import SolverOptions, solver_options
from app.models.schemas import DecompositionDTO, MultiplicityDTO, MultiplicityReq, ToeplitzDTO
from app.services.decompose_service import det_multiplicity, numerical_rank, vandermonde_decompose
from app.utils.codec import decomposition_to_dto, toeplitz_from_dto

router = APIRouter(
    prefix="/decompose",
    tags=["Decompose"]
)


@router.post("", response_model=DecompositionDTO, responses={400: {"description": "Not a positive Toeplitz matrix"}})
def api_decompose(data: ToeplitzDTO, options: SolverOptions = Depends(solver_options)):
    """
    Caratheodory-Vandermonde decomposition T = sum_i d_i gamma(lambda_i).
    """
    try:
        return decomposition_to_dto(vandermonde_decompose(toeplitz_from_dto(data), tol=options.tol))
    except ToeplitzError as exc:
        raise HTTPException(status_code=400, detail=str(exc))


@router.post("/multiplicity", response_model=MultiplicityDTO)
def api_multiplicity(data: MultiplicityReq, options: SolverOptions = Depends(solver_options)):
    try:
        T = toeplitz_from_dto(data.matrix)
        return MultiplicityDTO(
            multiplicity=det_multiplicity(T, max_k=data.max_k, step=data.step, seed=options.seed),
            rank=numerical_rank(T, tol=options.tol)
        )
    except ToeplitzError as exc:
        raise HTTPException(status_code=400, detail=str(exc))
