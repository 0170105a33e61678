from dataclasses import dataclass

from fastapi import Query

from app.core.config import settings


@dataclass
class SolverOptions:
    gap: float
    tol: float
    quad_tol: float
    seed: int


def solver_options(
    gap: float = Query(default=None, gt=0),
    tol: float = Query(default=None, gt=0),
    quad_tol: float = Query(default=None, gt=0),
    seed: int = Query(default=None)
) -> SolverOptions:
    """
    Tolerances of a request, falling back to the configured defaults.
    """
    return SolverOptions(
        gap=settings.gap if gap is None else gap,
        tol=settings.tol if tol is None else tol,
        quad_tol=settings.quad_tol if quad_tol is None else quad_tol,
        seed=settings.seed if seed is None else seed
    )
