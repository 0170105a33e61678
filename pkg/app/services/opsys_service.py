import logging
from typing import List, Tuple

import numpy as np
import scipy.linalg

from app.core.errors import InvalidInputError
from app.models.domain import MatrixSystem
from app.services.circulant_service import cyclic_shift
from app.services.toeplitz_service import shift

logger = logging.getLogger(__name__)

RANK_RTOL = 1e-9


def _orthonormal_span(matrices: np.ndarray) -> np.ndarray:
    """Orthonormal basis (columns) of the span of a stack of matrices, flattened."""
    flat = matrices.reshape(len(matrices), -1).T
    if flat.size == 0:
        return flat
    return scipy.linalg.orth(flat, rcond=RANK_RTOL)


def validate_system(sys: MatrixSystem) -> None:
    """Identity in the span and closure under the adjoint."""
    stack = sys.stacked()
    span = _orthonormal_span(stack)
    for candidate, name in [(np.eye(sys.N), "identity")] + [(b.conj().T, "adjoint") for b in stack]:
        vector = candidate.reshape(-1)
        residual = vector - span @ (span.conj().T @ vector)
        if np.linalg.norm(residual) > 1e-8 * max(np.linalg.norm(vector), 1.0):
            raise InvalidInputError(f"basis is not an operator system: {name} is not in the span")


def toeplitz_system(n: int) -> MatrixSystem:
    return MatrixSystem(n, tuple(shift(j, n).dense() for j in range(-n + 1, n)), name=f"Toep({n})")


def circulant_system(m: int) -> MatrixSystem:
    S = cyclic_shift(m)
    return MatrixSystem(m, tuple(np.linalg.matrix_power(S, k) for k in range(m)), name=f"Circ({m})")


def full_matrix_system(N: int) -> MatrixSystem:
    units = []
    for row in range(N):
        for col in range(N):
            unit = np.zeros((N, N), dtype=complex)
            unit[row, col] = 1.0
            units.append(unit)
    return MatrixSystem(N, tuple(units), name=f"M({N})")


def product_span_dims(sys: MatrixSystem, k: int) -> List[int]:
    """Dimensions of the spans of products of at most 1, 2, .., k basis elements."""
    if k < 1:
        raise InvalidInputError(f"k must be at least 1, got {k}")
    basis = sys.stacked()
    span = _orthonormal_span(basis)
    dims = [span.shape[1]]
    for _ in range(k - 1):
        elements = span.T.reshape(-1, sys.N, sys.N)
        products = np.einsum("aij,bjk->abik", elements, basis).reshape(-1, sys.N, sys.N)
        span = _orthonormal_span(np.concatenate([elements, products]))
        dims.append(span.shape[1])
    return dims


def product_span_dim(sys: MatrixSystem, k: int) -> int:
    return product_span_dims(sys, k)[-1]


def propagation_profile(sys: MatrixSystem, max_k: int = 8) -> Tuple[int, List[int]]:
    """
    Smallest k whose product span is already an algebra, with the span
    dimensions up to order k + 1.

    The product span of order k is multiplicatively closed once adding one
    more factor does not enlarge it. Returns max_k + 1 when not reached.
    """
    if max_k < 1:
        raise InvalidInputError(f"max_k must be at least 1, got {max_k}")
    dims = product_span_dims(sys, max_k + 1)
    for k in range(1, max_k + 1):
        if dims[k - 1] == dims[k]:
            return k, dims[:k + 1]
    logger.warning("%s did not stabilise within %d products", sys.name or "system", max_k)
    return max_k + 1, dims


def propagation_number(sys: MatrixSystem, max_k: int = 8) -> int:
    return propagation_profile(sys, max_k)[0]


SYSTEM_BUILDERS = {
    "toeplitz": toeplitz_system,
    "circulant": circulant_system,
    "full": full_matrix_system,
}


def build_system(kind: str, size: int) -> MatrixSystem:
    if kind not in SYSTEM_BUILDERS:
        raise InvalidInputError(f"unknown system {kind!r}, expected one of {sorted(SYSTEM_BUILDERS)}")
    if size < 1:
        raise InvalidInputError(f"size must be positive, got {size}")
    return SYSTEM_BUILDERS[kind](size)
