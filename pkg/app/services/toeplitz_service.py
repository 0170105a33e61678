import logging
from typing import Mapping, Sequence, Tuple

import numpy as np
import scipy.linalg

from app.core.config import settings
from app.core.errors import InvalidInputError, NotHermitianError
from app.models.domain import FourierVector, FRElement, ToeplitzMatrix
from app.utils.polynomials import laurent_polyroots

logger = logging.getLogger(__name__)

UNIT_CIRCLE_TOL = 1e-12


def toeplitz_from_coeffs(t: Sequence[complex]) -> ToeplitzMatrix:
    """Build a Toeplitz element from t_{-n+1} .. t_{n-1} (ascending k)."""
    t = np.asarray(t, dtype=complex).reshape(-1)
    if len(t) % 2 == 0:
        raise InvalidInputError(f"coefficient sequence must have odd length 2n-1, got {len(t)}")
    return ToeplitzMatrix((len(t) + 1) // 2, t)


def fr_from_coeffs(a: Sequence[complex]) -> FRElement:
    a = np.asarray(a, dtype=complex).reshape(-1)
    if len(a) % 2 == 0:
        raise InvalidInputError(f"coefficient sequence must have odd length 2n-1, got {len(a)}")
    return FRElement((len(a) + 1) // 2, a)


def delta(n: int, k: int = 0) -> FRElement:
    coeffs = np.zeros(2 * n - 1, dtype=complex)
    coeffs[k + n - 1] = 1.0
    return FRElement(n, coeffs)


def identity(n: int) -> ToeplitzMatrix:
    return shift(0, n)


def shift(j: int, n: int) -> ToeplitzMatrix:
    """The basis element tau_j: unit coefficient on diagonal j."""
    if abs(j) >= n:
        raise InvalidInputError(f"diagonal {j} outside a {n}x{n} matrix")
    coeffs = np.zeros(2 * n - 1, dtype=complex)
    coeffs[j + n - 1] = 1.0
    return ToeplitzMatrix(n, coeffs)


def compress_symbol(fourier_coeffs: Mapping[int, complex], n: int) -> ToeplitzMatrix:
    """Truncation P_n f P_n of a circle function given by its Fourier coefficients."""
    t = [complex(fourier_coeffs.get(k, 0.0)) for k in range(-n + 1, n)]
    return ToeplitzMatrix(n, t)


def _require_hermitian(T: ToeplitzMatrix) -> None:
    if not T.hermitian:
        raise NotHermitianError("Toeplitz element is not hermitian (t_{-k} != conj(t_k))")


def _require_same_size(n: int, m: int) -> None:
    if n != m:
        raise InvalidInputError(f"size mismatch: {n} vs {m}")


def operator_norm(T: ToeplitzMatrix) -> float:
    if T.hermitian:
        eigenvalues = scipy.linalg.eigvalsh(T.dense())
        return float(max(abs(eigenvalues[0]), abs(eigenvalues[-1])))
    return float(scipy.linalg.svdvals(T.dense())[0])


def min_eigenvalue(T: ToeplitzMatrix) -> float:
    _require_hermitian(T)
    return float(scipy.linalg.eigvalsh(T.dense())[0])


def is_positive(T: ToeplitzMatrix, tol: float = None) -> Tuple[bool, float]:
    tol = settings.tol if tol is None else tol
    _require_hermitian(T)
    eigenvalues = scipy.linalg.eigvalsh(T.dense())
    scale = max(abs(eigenvalues[0]), abs(eigenvalues[-1]))
    lowest = float(eigenvalues[0])
    return bool(lowest >= -tol * scale), lowest


def pairing(T: ToeplitzMatrix, a: FRElement) -> complex:
    """phi_T(a) = sum_k a_k t_{-k}."""
    _require_same_size(T.n, a.n)
    return complex(np.dot(a.a, T.t[::-1]))


def fr_convolve(a: FRElement, b: FRElement) -> FRElement:
    return FRElement(a.n + b.n - 1, np.convolve(a.a, b.a))


def vector_density(xi: Sequence[complex]) -> FRElement:
    """xi* * xi for xi supported in 0..n-1, as an element of the same support bound n."""
    xi = np.asarray(xi, dtype=complex).reshape(-1)
    if len(xi) == 0:
        raise InvalidInputError("vector must be non-empty")
    return FRElement(len(xi), np.convolve(xi, xi[::-1].conj()))


def _stationary_angles(a: FRElement) -> np.ndarray:
    derivative = 1j * a.indices * a.a
    roots = laurent_polyroots(derivative)
    roots = roots[np.abs(roots) > 0]
    return np.angle(roots)


def fr_min(a: FRElement) -> Tuple[float, float]:
    """Minimum of the real trigonometric polynomial sum_k a_k e^{ik theta} and its location."""
    if not a.selfadjoint:
        raise NotHermitianError("element is not self-adjoint (a_{-k} != conj(a_k))")
    grid = 2 * np.pi * np.arange(2 * a.n - 1) / (2 * a.n - 1)
    candidates = np.concatenate([grid, _stationary_angles(a)])
    values = a.evaluate(candidates).real
    best = int(np.argmin(values))
    return float(values[best]), float(np.mod(candidates[best], 2 * np.pi))


def fr_is_positive(a: FRElement, tol: float = None) -> bool:
    tol = settings.tol if tol is None else tol
    lowest, _ = fr_min(a)
    return lowest >= -tol * a.norm1()


def fourier_vector(z: complex, n: int) -> FourierVector:
    return FourierVector(n, complex(z))


def extreme_ray(lam: complex, n: int) -> ToeplitzMatrix:
    """gamma(lambda) = |f_lambda><f_lambda|, entries lambda^{k-l}/n."""
    lam = complex(lam)
    if abs(abs(lam) - 1.0) > UNIT_CIRCLE_TOL:
        raise InvalidInputError(f"node {lam} is not on the unit circle")
    powers = lam ** np.arange(n) / n
    return ToeplitzMatrix(n, np.concatenate([powers[1:][::-1].conj(), powers]))


def rotate_density(a: FRElement, alpha: float) -> FRElement:
    """The circle action a_k -> e^{ik alpha} a_k."""
    return FRElement(a.n, a.a * np.exp(1j * alpha * a.indices))


def rotate_toeplitz(T: ToeplitzMatrix, alpha: float) -> ToeplitzMatrix:
    return ToeplitzMatrix(T.n, T.t * np.exp(1j * alpha * np.arange(-T.n + 1, T.n)))
