from fastapi import APIRouter, Depends, HTTPException, Query

from app.core.errors import ToeplitzError
from app.dependencies import SolverOptions, solver_options
from app.models.schemas import GeometryCheckDTO, SampleDTO, SampleReq
from app.services.geometry3_service import run_checks, sample_surfaces
from app.utils.codec import checks_to_dto

router = APIRouter(
    prefix="/geometry3",
    tags=["Geometry3"]
)


@router.post("/check", response_model=GeometryCheckDTO)
def api_check(samples: int = Query(default=1000, ge=1, le=100_000), options: SolverOptions = Depends(solver_options)):
    """
    Runs the sampled identities of the Toep(3) cone and its state space.
    """
    return checks_to_dto(run_checks(seed=options.seed, samples=samples))


@router.post("/sample", response_model=SampleDTO, responses={400: {"description": "Unknown sample kind"}})
def api_sample(data: SampleReq, options: SolverOptions = Depends(solver_options)):
    try:
        columns, rows = sample_surfaces(data.kind, data.count, seed=options.seed, slice_d=data.slice_d)
        return SampleDTO(columns=list(columns), rows=rows.tolist())
    except ToeplitzError as exc:
        raise HTTPException(status_code=400, detail=str(exc))
