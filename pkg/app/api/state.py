from fastapi import APIRouter, Depends, HTTPException

from app.core.errors import ToeplitzError
from app.dependencies import SolverOptions, solver_options
from app.models.schemas import EvaluateReq, FRElementDTO, PureStateDTO, PureStateReq, StateCheckDTO, ValueDTO
from app.services.state_service import evaluate, is_pure, pure_state_from_angles, root_angles, state_from_density, vector_state
from app.utils.codec import fr_from_dto, fr_to_dto, to_pairs, toeplitz_from_dto

router = APIRouter(
    prefix="/state",
    tags=["State"]
)


@router.post("/check", response_model=StateCheckDTO, responses={400: {"description": "Not a state density"}})
def api_check_state(data: FRElementDTO, options: SolverOptions = Depends(solver_options)):
    """
    Normalizes a density to a state and reports whether it is pure.
    """
    try:
        state = state_from_density(fr_from_dto(data), tol=options.tol)
        pure = is_pure(state)
        return StateCheckDTO(
            density=fr_to_dto(state.density),
            pure=pure,
            angles=[float(x) for x in root_angles(state)] if pure and state.n > 1 else None
        )
    except ToeplitzError as exc:
        raise HTTPException(status_code=400, detail=str(exc))


@router.post("/pure", response_model=PureStateDTO)
def api_pure_state(data: PureStateReq):
    vector = pure_state_from_angles(data.angles)
    return PureStateDTO(
        xi=to_pairs(vector.xi),
        angles=[float(x) for x in vector.root_angles],
        density=fr_to_dto(vector_state(vector.xi).density)
    )


@router.post("/evaluate", response_model=ValueDTO)
def api_evaluate(data: EvaluateReq, options: SolverOptions = Depends(solver_options)):
    try:
        state = state_from_density(fr_from_dto(data.density), tol=options.tol)
        return ValueDTO(value=evaluate(state, toeplitz_from_dto(data.matrix)))
    except ToeplitzError as exc:
        raise HTTPException(status_code=400, detail=str(exc))
