import logging
from typing import Sequence

import numpy as np
from numpy.polynomial import polynomial as P

from app.core.config import settings
from app.core.errors import InvalidInputError, InvalidStateError, NotHermitianError, NotPositiveError
from app.models.domain import FRElement, PureStateVector, State, ToeplitzMatrix
from app.services.factor_service import circle_root_halves, circle_root_mask, laurent_roots
from app.services.toeplitz_service import delta, fr_is_positive, pairing, rotate_density, vector_density
from app.utils.polynomials import wrap_angles

logger = logging.getLogger(__name__)


def state_from_density(a: FRElement, tol: float = None) -> State:
    """Wrap a positive self-adjoint density, rescaling it to a_0 = 1."""
    tol = settings.tol if tol is None else tol
    if not a.selfadjoint:
        raise NotHermitianError("density is not self-adjoint (a_{-k} != conj(a_k))")
    a0 = a.coeff(0).real
    if a0 <= 0:
        raise InvalidStateError(f"density must have a_0 > 0, got {a0}")
    normalized = a * (1.0 / a0)
    if not fr_is_positive(normalized, tol):
        raise NotPositiveError("density takes negative values on the circle")
    return State(normalized)


def trace_state(n: int) -> State:
    return State(delta(n))


def vector_state(xi: Sequence[complex]) -> State:
    """The state T -> <xi, T xi> / <xi, xi>."""
    xi = np.asarray(xi, dtype=complex)
    norm = np.linalg.norm(xi)
    if norm == 0:
        raise InvalidStateError("zero vector defines no state")
    return State(vector_density(xi / norm))


def evaluate(s: State, T: ToeplitzMatrix) -> float:
    if T.n != s.n:
        raise InvalidInputError(f"size mismatch: state on Toep({s.n}), matrix of size {T.n}")
    if not T.hermitian:
        raise NotHermitianError("states are evaluated on hermitian elements")
    return float(pairing(T, s.density).real)


def mixture(states: Sequence[State], weights: Sequence[float]) -> State:
    weights = np.asarray(weights, dtype=float)
    if len(states) == 0 or len(states) != len(weights):
        raise InvalidInputError("need one weight per state")
    if np.any(weights < 0) or weights.sum() <= 0:
        raise InvalidInputError("mixture weights must be non-negative with positive sum")
    n = states[0].n
    if any(s.n != n for s in states):
        raise InvalidInputError("all states must live on the same Toep(n)")
    density = sum((w * s.density.a for w, s in zip(weights, states)), np.zeros(2 * n - 1, dtype=complex))
    return State(FRElement(n, density / weights.sum()))


def rotate_state(s: State, alpha: float) -> State:
    return State(rotate_density(s.density, alpha))


def pure_state_from_angles(angles: Sequence[float]) -> PureStateVector:
    """
    Pure state vector xi with xi_j the j-th elementary symmetric polynomial of
    lambda_k = e^{i theta_k}, normalized. The polynomial sum_k xi_k z^{n-1-k}
    is proportional to prod_k (z + lambda_k).
    """
    angles = wrap_angles(np.atleast_1d(angles))
    lambdas = np.exp(1j * angles)
    xi = P.polyfromroots(-lambdas)[::-1] if len(lambdas) else np.ones(1, dtype=complex)
    xi = np.asarray(xi, dtype=complex)
    return PureStateVector(xi / np.linalg.norm(xi), np.sort(angles))


def pure_state(angles: Sequence[float]) -> State:
    return vector_state(pure_state_from_angles(angles).xi)


def is_pure(s: State, tol: float = None) -> bool:
    """
    Extremality of the state: the density has all of its 2(n-1) roots on the circle.

    A root counts as on the circle when the density vanishes at its angle, so
    the members of a multiple root pass however far roundoff spreads them.
    """
    tol = settings.circle_tol if tol is None else tol
    if s.n == 1:
        return True
    roots = laurent_roots(s.density)
    expected = 2 * (s.n - 1)
    if len(roots) != expected:
        logger.info(
            "density has %d of %d roots; degenerate leading coefficients are classified not pure",
            len(roots), expected
        )
        return False
    return bool(np.all(circle_root_mask(s.density, roots, tol)))


def root_angles(s: State, tol: float = None) -> np.ndarray:
    """Angles theta_k of a pure state, recovered from the double circle roots of its density."""
    tol = settings.circle_tol if tol is None else tol
    halves = circle_root_halves(s.density, laurent_roots(s.density), tol)
    return np.sort(wrap_angles([np.angle(-np.conj(z)) for z in halves]))
