from fastapi import APIRouter, HTTPException

from app.core.errors import ToeplitzError
from app.models.schemas import PropagationDTO, PropagationReq
from app.services.opsys_service import build_system, propagation_profile

router = APIRouter(
    prefix="/propagation",
    tags=["Propagation"]
)


@router.post("", response_model=PropagationDTO, responses={400: {"description": "Invalid system"}})
def api_propagation(data: PropagationReq):
    """
    Propagation number of a built-in operator system with the product span dimensions behind it.
    """
    try:
        system = build_system(data.system, data.size)
        prop, dims = propagation_profile(system, max_k=data.max_k)
        return PropagationDTO(prop=prop, dims=dims)
    except ToeplitzError as exc:
        raise HTTPException(status_code=400, detail=str(exc))
