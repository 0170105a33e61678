from fastapi import APIRouter, Depends, HTTPException

from app.core.errors import ToeplitzError
from app.dependencies import SolverOptions, solver_options
from app.models.schemas import ConvexProgramDTO, DistanceDTO, DistanceReq, ValueDTO
from app.services.metric_service import compare_distances, connes_distance, kantorovich
from app.services.state_service import state_from_density
from app.utils.codec import fr_from_dto, program_to_dto

router = APIRouter(
    prefix="/distance",
    tags=["Distance"]
)


def _states(data: DistanceReq, tol: float):
    return state_from_density(fr_from_dto(data.phi), tol=tol), state_from_density(fr_from_dto(data.psi), tol=tol)


@router.post("", response_model=DistanceDTO, responses={400: {"description": "Invalid state densities"}})
def api_distance(data: DistanceReq, dual_route: bool = False, options: SolverOptions = Depends(solver_options)):
    """
    Connes distance with its certificate, the Kantorovich distance and their comparison.
    """
    try:
        phi, psi = _states(data, options.tol)
        connes, transport, dominates, dual = compare_distances(
            phi, psi, gap=options.gap, quad_tol=options.quad_tol, with_dual_route=dual_route
        )
        return DistanceDTO(
            connes=program_to_dto(connes),
            kantorovich=transport,
            inequality_ok=dominates,
            dual_route=dual
        )
    except ToeplitzError as exc:
        raise HTTPException(status_code=400, detail=str(exc))


@router.post("/connes", response_model=ConvexProgramDTO)
def api_connes(data: DistanceReq, options: SolverOptions = Depends(solver_options)):
    try:
        phi, psi = _states(data, options.tol)
        return program_to_dto(connes_distance(phi, psi, gap=options.gap))
    except ToeplitzError as exc:
        raise HTTPException(status_code=400, detail=str(exc))


@router.post("/kantorovich", response_model=ValueDTO)
def api_kantorovich(data: DistanceReq, options: SolverOptions = Depends(solver_options)):
    try:
        phi, psi = _states(data, options.tol)
        return ValueDTO(value=kantorovich(phi, psi, quad_tol=options.quad_tol))
    except ToeplitzError as exc:
        raise HTTPException(status_code=400, detail=str(exc))
