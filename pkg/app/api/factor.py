from fastapi import APIRouter, Depends, HTTPException

from app.core.errors import ToeplitzError
from app.dependencies import SolverOptions, solver_options
from app.models.schemas import FRElementDTO, SpectralFactorDTO
from app.services.factor_service import fejer_riesz_factorize
from app.utils.codec import factor_to_dto, fr_from_dto

router = APIRouter(
    prefix="/factor",
    tags=["Factor"]
)


@router.post("", response_model=SpectralFactorDTO, responses={400: {"description": "Not a positive density"}})
def api_factorize(data: FRElementDTO, options: SolverOptions = Depends(solver_options)):
    """
    Fejer-Riesz factor q of a positive trigonometric polynomial, |q|^2 = a on the circle.
    """
    try:
        return factor_to_dto(fejer_riesz_factorize(fr_from_dto(data), tol=options.tol))
    except ToeplitzError as exc:
        raise HTTPException(status_code=400, detail=str(exc))
