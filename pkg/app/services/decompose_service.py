"""
Caratheodory-Vandermonde decomposition T = V diag(d) V* of positive Toeplitz
matrices, the faces they span and the rank stratification of the boundary.
"""
import logging
from typing import List, Optional, Tuple

import numpy as np
import scipy.linalg
from scipy.optimize import least_squares

from app.core.config import settings
from app.core.errors import DecompositionError, InvalidInputError, NotPositiveError, NotSingularError
from app.models.domain import ToeplitzMatrix, VandermondeDecomposition
from app.services.toeplitz_service import extreme_ray, is_positive, operator_norm, shift
from app.utils.polynomials import circular_mean, cluster_points, polyroots, wrap_angles

logger = logging.getLogger(__name__)

GRID_SIZE = 256
# det(M + eps E) with |M|, |E| <= 1 is bounded by (1 + radius)**n on the contour
ZERO_ATOL = 1e-12


def _kernel_dim(M: np.ndarray, tol: float) -> int:
    eigenvalues = scipy.linalg.eigvalsh(M)
    scale = max(abs(eigenvalues[0]), abs(eigenvalues[-1]))
    if scale == 0.0:
        return len(eigenvalues)
    return int(np.count_nonzero(eigenvalues <= tol * scale))


def _common_roots(kernel: np.ndarray, rank: int, cluster_radius: float) -> Tuple[Optional[np.ndarray], float]:
    """
    Common circle roots of the polynomials sum_k conj(xi_k) z^k over the kernel,
    with the worst score among them (None when there are too few roots).

    A root of a generic combination of them is scored by its distance from the circle
    plus the worst residual of the remaining kernel polynomials there.
    """
    if rank == 0:
        return np.zeros(0, dtype=complex), 0.0
    n, dim = kernel.shape
    weights = np.linspace(1.0, 2.0, dim)
    combined = kernel @ (weights / np.linalg.norm(weights))
    roots = polyroots(combined.conj())
    roots = roots[np.abs(roots) > 0]
    if len(roots) < rank:
        return None, np.inf

    units = roots / np.abs(roots)
    powers = units[:, None] ** np.arange(n)[None, :] / np.sqrt(n)
    residuals = np.max(np.abs(powers @ kernel.conj()), axis=1)
    scores = np.abs(np.log(np.abs(roots))) + residuals
    best = np.argsort(scores, kind="stable")[:rank]
    nodes = units[best]
    clustered = np.array([circular_mean(nodes[group]) for group in cluster_points(nodes, cluster_radius)])
    return clustered, float(np.max(scores[best]))


def _reconstruction_error(T: ToeplitzMatrix, nodes: np.ndarray, weights: np.ndarray) -> float:
    fitted = np.zeros(2 * T.n - 1, dtype=complex)
    for lam, weight in zip(nodes, weights):
        fitted += weight * extreme_ray(lam, T.n).t
    return float(np.max(np.abs(fitted - T.t)))


def _refine(T: ToeplitzMatrix, nodes: np.ndarray, weights: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Least-squares refinement of node angles and weights against the coefficients of T."""
    r = len(nodes)
    if r == 0:
        return nodes, weights
    k = np.arange(-T.n + 1, T.n)

    def mismatch(x: np.ndarray) -> np.ndarray:
        diff = np.exp(1j * np.outer(k, x[:r])) @ x[r:] / T.n - T.t
        return np.concatenate([diff.real, diff.imag])

    start = np.concatenate([np.angle(nodes), weights])
    result = least_squares(mismatch, start, method="lm", xtol=1e-15, ftol=1e-15)
    return np.exp(1j * result.x[:r]), np.clip(result.x[r:], 0.0, None)


def _search_nodes(T: ToeplitzMatrix, tol: float, cluster_radius: float, circle_tol: float, at_least: int = 0):
    """
    Nodes and weights of a singular positive T.

    The eigenvalue threshold can overstate the kernel by a dimension when nodes
    nearly coincide, so smaller kernels are tried in turn. Nodes within
    circle_tol of common roots that reconstruct T within tol are accepted
    outright; otherwise candidates are refined and the first one that
    reconstructs T is.
    """
    eigenvalues, vectors = scipy.linalg.eigh(T.dense())
    scale = max(abs(eigenvalues[0]), abs(eigenvalues[-1]))
    detected = max(int(np.count_nonzero(eigenvalues <= tol * scale)), at_least)
    if detected == 0:
        raise NotSingularError("Toeplitz element is nonsingular; its kernel is trivial")
    bound = tol * scale

    candidates = []
    worst_seen = np.inf
    for dim in range(detected, max(at_least, 1) - 1, -1):
        nodes, worst = _common_roots(vectors[:, :dim], T.n - dim, cluster_radius)
        if nodes is None:
            continue
        worst_seen = min(worst_seen, worst)
        weights = _weights(T, nodes, tol)
        if worst <= circle_tol and _reconstruction_error(T, nodes, weights) <= bound:
            return nodes, weights
        candidates.append((nodes, weights))

    for nodes, weights in candidates:
        nodes, weights = _refine(T, nodes, weights)
        error = _reconstruction_error(T, nodes, weights)
        if error <= bound:
            logger.info("accepting refined nodes; reconstruction error %.3e", error)
            return nodes, weights
    raise DecompositionError(
        f"kernel has no common roots on the circle (best score {worst_seen:.2e}) that reconstruct the matrix"
    )


def kernel_roots(T: ToeplitzMatrix, tol: float = None, cluster_radius: float = None,
                 circle_tol: float = None) -> np.ndarray:
    """Nodes lambda_i of a singular positive T: the common roots of its kernel vectors."""
    tol = settings.tol if tol is None else tol
    cluster_radius = settings.cluster_radius if cluster_radius is None else cluster_radius
    circle_tol = settings.circle_tol if circle_tol is None else circle_tol
    positive, _ = is_positive(T, tol)
    if not positive:
        raise NotPositiveError("Toeplitz element is not positive")
    return _search_nodes(T, tol, cluster_radius, circle_tol)[0]


def _weights(T: ToeplitzMatrix, nodes: np.ndarray, tol: float) -> np.ndarray:
    if len(nodes) == 0:
        return np.zeros(0)
    k = np.arange(-T.n + 1, T.n)
    system = nodes[None, :] ** k[:, None] / T.n
    solution, *_ = scipy.linalg.lstsq(system, T.t)
    weights = solution.real
    floor = -tol * max(operator_norm(T), 1.0)
    if np.any(weights < floor):
        logger.warning("clamping negative Vandermonde weights %s", weights[weights < floor])
    return np.clip(weights, 0.0, None)


def peel_bound(T: ToeplitzMatrix, lam: complex) -> float:
    """Largest s with T - s * gamma(lambda) still positive: 1 / <f, T^{-1} f>."""
    f = lam ** np.arange(T.n) / np.sqrt(T.n)
    try:
        factor = scipy.linalg.cho_factor(T.dense())
    except scipy.linalg.LinAlgError:
        return 0.0
    return float(1.0 / np.real(np.vdot(f, scipy.linalg.cho_solve(factor, f))))


def _peel_node(T: ToeplitzMatrix) -> complex:
    grid = np.exp(2j * np.pi * np.arange(GRID_SIZE) / GRID_SIZE)
    F = grid[None, :] ** np.arange(T.n)[:, None] / np.sqrt(T.n)
    energy = np.real(np.sum(F.conj() * (T.dense() @ F), axis=0))
    return complex(grid[int(np.argmax(energy))])


def vandermonde_decompose(T: ToeplitzMatrix, tol: float = None, cluster_radius: float = None,
                          circle_tol: float = None) -> VandermondeDecomposition:
    """
    Write a positive T as sum_i d_i gamma(lambda_i).

    Below full rank the nodes are the common kernel roots and the decomposition
    is unique. At full rank one extreme ray is peeled off first; that choice
    is not canonical.
    """
    tol = settings.tol if tol is None else tol
    cluster_radius = settings.cluster_radius if cluster_radius is None else cluster_radius
    circle_tol = settings.circle_tol if circle_tol is None else circle_tol
    positive, lowest = is_positive(T, tol)
    if not positive:
        raise NotPositiveError(f"Toeplitz element is not positive (lowest eigenvalue {lowest:.3e})")
    scale = operator_norm(T)
    if scale == 0.0:
        return VandermondeDecomposition([], [])

    if lowest <= tol * scale:
        nodes, weights = _search_nodes(T, tol, cluster_radius, circle_tol)
    else:
        lam = _peel_node(T)
        s = peel_bound(T, lam)
        remainder = T - s * extreme_ray(lam, T.n)
        nodes, weights = _search_nodes(remainder, tol, cluster_radius, circle_tol, at_least=1)
        nodes = np.append(nodes, lam)
        weights = np.append(weights, s)

    angles = wrap_angles(np.angle(nodes))
    order = np.argsort(angles, kind="stable")
    return VandermondeDecomposition(angles[order], weights[order])


def reconstruct(vd: VandermondeDecomposition, n: int) -> ToeplitzMatrix:
    if np.any(vd.weights < 0):
        raise InvalidInputError("Vandermonde weights must be non-negative")
    t = np.zeros(2 * n - 1, dtype=complex)
    result = ToeplitzMatrix(n, t)
    for lam, weight in zip(vd.nodes, vd.weights):
        result = result + float(weight) * extreme_ray(lam, n)
    return result


def face_generators(T: ToeplitzMatrix, tol: float = None) -> List[ToeplitzMatrix]:
    """Extreme rays spanning the face of Toep(n)+ that contains a singular positive T."""
    return [extreme_ray(lam, T.n) for lam in kernel_roots(T, tol)]


def is_interior(T: ToeplitzMatrix, tol: float = None) -> bool:
    tol = settings.tol if tol is None else tol
    positive, lowest = is_positive(T, tol)
    return positive and lowest > tol * operator_norm(T)


def hermitian_directions(n: int) -> List[np.ndarray]:
    directions = [shift(0, n).dense()]
    for j in range(1, n):
        up, down = shift(j, n).dense(), shift(-j, n).dense()
        directions.append(up + down)
        directions.append(1j * (up - down))
    return directions


def _vanishing_order(M: np.ndarray, E: np.ndarray, radius: float, max_k: int) -> int:
    """Order of the zero at 0 of eps -> det(M + eps E), from exact contour coefficients."""
    n = M.shape[0]
    samples = 2 * n + 2
    circle = radius * np.exp(2j * np.pi * np.arange(samples) / samples)
    values = np.array([np.linalg.det(M + eps * E) for eps in circle])
    # scaled Taylor coefficients c_k * radius**k, exact since the degree n is below the sample count
    coeffs = np.fft.fft(values) / samples
    floor = ZERO_ATOL * (1.0 + radius) ** n
    for k in range(min(n, max_k) + 1):
        if abs(coeffs[k]) > floor:
            return k
    return max_k


def det_multiplicity(T: ToeplitzMatrix, max_k: Optional[int] = None, step: float = 1.0,
                     directions: int = 3, seed: int = None) -> int:
    """
    Smallest m with a non-vanishing m-th directional derivative of det at T.

    det(T + eps E) is a polynomial of degree n in eps; its Taylor coefficients
    are read off exactly from samples on a circle of radius `step` (in units
    of the operator norm of T), which replaces finite differences.
    """
    seed = settings.seed if seed is None else seed
    max_k = T.n if max_k is None else max_k
    scale = operator_norm(T)
    if scale == 0.0:
        return min(T.n, max_k)
    M = T.dense() / scale
    basis = hermitian_directions(T.n)
    rng = np.random.default_rng(seed)
    mixes = rng.standard_normal((directions, len(basis)))
    basis.extend(np.tensordot(mixes, np.array(basis), axes=1))
    orders = []
    for E in basis:
        E = E / np.linalg.norm(E, 2)
        orders.append(_vanishing_order(M, E, step, max_k))
    return int(min(orders))


def numerical_rank(T: ToeplitzMatrix, tol: float = None) -> int:
    tol = settings.tol if tol is None else tol
    return T.n - _kernel_dim(T.dense(), tol)
