import logging
from typing import List

import numpy as np
import scipy.linalg
from numpy.polynomial import polynomial as P
from scipy.optimize import least_squares

from app.core.config import settings
from app.core.errors import FactorizationError, InvalidInputError, NotHermitianError, NotPositiveError
from app.models.domain import FRElement, SpectralFactor, ToeplitzMatrix
from app.services.toeplitz_service import fr_is_positive, is_positive, vector_density
from app.utils.polynomials import circular_mean, laurent_polyroots, trim_support

logger = logging.getLogger(__name__)


def laurent_roots(a: FRElement) -> np.ndarray:
    """Roots with multiplicity of z^{n-1} a(z), excluding the trivial roots at 0 and infinity."""
    if not np.any(a.a):
        raise InvalidInputError("the zero element has no root set")
    return laurent_polyroots(a.a)


def circle_root_mask(a: FRElement, roots: np.ndarray, tol: float) -> np.ndarray:
    """
    Roots belonging to zeros of a on the circle.

    a vanishes at the angle of every member of a split multiple circle root,
    however far the members drift from the circle, and stays positive at the
    angle of a root off it.
    """
    if len(roots) == 0:
        return np.zeros(0, dtype=bool)
    return a.evaluate(np.angle(roots)).real <= tol * a.norm1()


def circle_root_halves(a: FRElement, roots: np.ndarray, tol: float) -> List[complex]:
    """
    Halve the circle roots of a non-negative a: a zero of order 2k contributes
    k copies of its centre.

    Neighbouring roots belong to the same zero when a does not rise between them.
    """
    if len(roots) == 0:
        return []
    floor = tol * a.norm1()
    units = np.exp(1j * np.angle(roots))
    order = np.argsort(np.mod(np.angle(units), 2 * np.pi), kind="stable")
    groups = [[order[0]]]
    for prev, cur in zip(order[:-1], order[1:]):
        middle = np.angle(units[prev] + units[cur])
        if a.evaluate(middle).real <= floor:
            groups[-1].append(cur)
        else:
            groups.append([cur])
    if len(groups) > 1 and a.evaluate(np.angle(units[order[-1]] + units[order[0]])).real <= floor:
        groups[0] = groups.pop() + groups[0]

    halves = []
    for group in groups:
        if len(group) % 2:
            raise FactorizationError(
                "circle root of odd multiplicity; the input is not numerically positive"
            )
        halves.extend([circular_mean(roots[group])] * (len(group) // 2))
    return halves


def _coefficient_residual(q: np.ndarray, a: FRElement) -> float:
    return float(np.sum(np.abs(vector_density(q).a - a.a)))


def _polish(q: np.ndarray, a: FRElement) -> np.ndarray:
    """Least-squares refinement of |q|^2 = a from a nearby factor."""
    n = len(q)

    def mismatch(x: np.ndarray) -> np.ndarray:
        diff = vector_density(x[:n] + 1j * x[n:]).a[n - 1:] - a.a[n - 1:]
        return np.concatenate([diff.real, diff.imag])

    result = least_squares(mismatch, np.concatenate([q.real, q.imag]), method="lm", xtol=1e-15, ftol=1e-15)
    return result.x[:n] + 1j * result.x[n:]


def _canonical(q: np.ndarray) -> np.ndarray:
    pivot = q[0]
    if abs(pivot) > 0:
        return q * (np.conj(pivot) / abs(pivot))
    return q


def fejer_riesz_factorize(a: FRElement, tol: float = None) -> SpectralFactor:
    """
    Fejer-Riesz factorization a(z) = |q(z)|^2 on the circle.

    q is minimum-phase (no roots outside the closed disc) with q_0 real and
    non-negative, which makes it unique. Raises FactorizationError when the
    coefficient residual stays above tol * ||a||_1.
    """
    tol = settings.tol if tol is None else tol
    if not a.selfadjoint:
        raise NotHermitianError("element is not self-adjoint (a_{-k} != conj(a_k))")
    if not fr_is_positive(a, tol):
        raise NotPositiveError("trigonometric polynomial takes negative values on the circle")

    a0 = a.coeff(0).real
    if a0 <= 0:
        raise NotPositiveError("zero element has no spectral factor")
    lo, hi = trim_support(a.a)
    half_degree = max(a.n - 1 - lo, hi - (a.n - 1))
    q = np.zeros(a.n, dtype=complex)
    if half_degree == 0:
        q[0] = np.sqrt(a0)
        return SpectralFactor(q, residual=0.0)

    window = a.a[a.n - 1 - half_degree:a.n + half_degree]
    roots = laurent_polyroots(window)
    on_circle = circle_root_mask(a, roots, tol)
    off = roots[~on_circle]
    selected = list(off[np.abs(off) < 1.0]) + circle_root_halves(a, roots[on_circle], tol)
    if len(selected) != half_degree:
        raise FactorizationError(
            f"root pairing produced {len(selected)} roots for half-degree {half_degree}"
        )

    monic = P.polyfromroots(selected) if selected else np.ones(1, dtype=complex)
    monic = monic * np.sqrt(a0 / np.sum(np.abs(monic) ** 2))
    q[:len(monic)] = _canonical(monic)

    bound = tol * a.norm1()
    residual = _coefficient_residual(q, a)
    if residual > bound:
        logger.info("polishing Fejer-Riesz factor with residual %.3e", residual)
        q = _canonical(_polish(q, a))
        residual = _coefficient_residual(q, a)
    if residual > bound:
        raise FactorizationError(f"Fejer-Riesz residual {residual:.3e} exceeds tolerance {bound:.3e}")
    return SpectralFactor(q, residual=residual)


def annihilating_densities(T: ToeplitzMatrix, tol: float = None) -> List[FRElement]:
    """Densities xi* * xi of a kernel basis of a positive T; all are killed by the pairing with T."""
    tol = settings.tol if tol is None else tol
    positive, _ = is_positive(T, tol)
    if not positive:
        raise NotPositiveError("Toeplitz element is not positive")
    eigenvalues, vectors = scipy.linalg.eigh(T.dense())
    scale = max(abs(eigenvalues[0]), abs(eigenvalues[-1]), np.finfo(float).tiny)
    kernel = vectors[:, eigenvalues <= tol * scale]
    return [vector_density(kernel[:, j]) for j in range(kernel.shape[1])]
