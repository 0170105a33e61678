"""
Connes distance on the truncated circle and the surrounding norms.

The distance and the dual norm are both of the form

    sup { <c, x> : || sum_k x_k B_k || <= 1 }

over real coordinates x of a hermitian Toeplitz element, and share one
cutting-plane solver: the spectral-norm ball is approximated from outside by
the linear cuts -1 <= <v, H v> <= 1 taken at extremal eigenvectors v, the
outer linear program gives the upper bound and the iterate rescaled into the
ball gives a feasible lower bound.
"""
import logging
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np
import scipy.linalg
from scipy.optimize import linprog, minimize_scalar

from app.core.config import settings
from app.core.errors import InvalidInputError, NotHermitianError
from app.models.domain import ConvexProgramResult, DiracTruncation, FRElement, State, ToeplitzMatrix
from app.services.toeplitz_service import delta, fr_min, pairing
from app.utils.metrics import solver_cuts_total, solver_runs_total, timed
from app.utils.polynomials import laurent_polyroots

logger = logging.getLogger(__name__)

SEED_GRID_FACTOR = 4
CROSSING_BAND = 1e-4
PRIMITIVE_RTOL = 1e-12


def dirac(n: int) -> DiracTruncation:
    return DiracTruncation(n)


def dirac_commutator(T: ToeplitzMatrix) -> ToeplitzMatrix:
    """i[D, T]: the coefficient map t_j -> i j t_j."""
    return ToeplitzMatrix(T.n, 1j * np.arange(-T.n + 1, T.n) * T.t)


def derivative_transpose(B: FRElement) -> FRElement:
    return FRElement(B.n, 1j * B.indices * B.a)


def primitive(b: FRElement) -> FRElement:
    """Inverse of the transpose derivative on the subspace b_0 = 0."""
    if abs(b.coeff(0)) > PRIMITIVE_RTOL * max(b.norm1(), 1.0):
        raise InvalidInputError(f"primitive needs b_0 = 0, got {b.coeff(0)}")
    k = b.indices
    coeffs = np.zeros(len(k), dtype=complex)
    nonzero = k != 0
    coeffs[nonzero] = b.a[nonzero] / (1j * k[nonzero])
    return FRElement(b.n, coeffs)


def _hermitian_basis(n: int, with_identity: bool) -> List[ToeplitzMatrix]:
    """Real basis of hermitian Toeplitz elements: t_j = t_{-j} = 1 and t_j = i = -t_{-j}."""
    basis = []
    if with_identity:
        coeffs = np.zeros(2 * n - 1, dtype=complex)
        coeffs[n - 1] = 1.0
        basis.append(ToeplitzMatrix(n, coeffs))
    for j in range(1, n):
        for phase in (1.0, 1j):
            coeffs = np.zeros(2 * n - 1, dtype=complex)
            coeffs[n - 1 + j] = phase
            coeffs[n - 1 - j] = np.conj(phase)
            basis.append(ToeplitzMatrix(n, coeffs))
    return basis


def _canonical_phase(v: np.ndarray) -> np.ndarray:
    pivot = np.flatnonzero(np.abs(v) > 1e-12)
    if len(pivot) == 0:
        return v
    entry = v[pivot[0]]
    return v * (np.conj(entry) / abs(entry))


@dataclass
class _CuttingPlane:
    objective: np.ndarray
    constraints: np.ndarray
    box: np.ndarray
    program: str

    def cut(self, v: np.ndarray) -> np.ndarray:
        v = _canonical_phase(v)
        return np.einsum("i,kij,j->k", v.conj(), self.constraints, v).real

    def operator(self, x: np.ndarray) -> np.ndarray:
        return np.tensordot(x, self.constraints, axes=1)

    def box_bound(self) -> float:
        """Upper bound valid before any linear program is solved: the box contains the ball."""
        return float(np.abs(self.objective) @ self.box)

    def solve(self, gap: float, max_cuts: int) -> Tuple[np.ndarray, float, float, int, bool]:
        dim = len(self.objective)
        if not np.any(self.objective):
            return np.zeros(dim), 0.0, 0.0, 0, True

        n = self.constraints.shape[1]
        rows = []
        for lam in np.exp(2j * np.pi * np.arange(SEED_GRID_FACTOR * n) / (SEED_GRID_FACTOR * n)):
            row = self.cut(lam ** np.arange(n) / np.sqrt(n))
            rows.extend([row, -row])
        bounds = list(zip(-self.box, self.box))

        best_x, lower, upper = np.zeros(dim), 0.0, np.inf
        added, iterations = 0, 0
        while True:
            iterations += 1
            result = linprog(
                -self.objective,
                A_ub=np.array(rows),
                b_ub=np.ones(len(rows)),
                bounds=bounds,
                method="highs"
            )
            if result.status != 0:
                solver_runs_total.labels(program=self.program, status="failed").inc()
                logger.warning(
                    "%s outer linear program failed at iteration %d (%s); returning bounds [%.3e, %.3e]",
                    self.program, iterations, result.message, lower, upper
                )
                return best_x, lower, min(upper, self.box_bound()), iterations, False
            x = result.x
            upper = min(upper, -result.fun)

            eigenvalues, vectors = scipy.linalg.eigh(self.operator(x))
            norm = max(abs(eigenvalues[0]), abs(eigenvalues[-1]))
            scaled = x / max(norm, 1.0)
            value = float(self.objective @ scaled)
            if value > lower:
                best_x, lower = scaled, value
            if upper - lower <= gap:
                solver_runs_total.labels(program=self.program, status="converged").inc()
                return best_x, lower, upper, iterations, True

            violated = np.flatnonzero(np.abs(eigenvalues) > 1.0)
            for index in violated:
                rows.append(np.sign(eigenvalues[index]) * self.cut(vectors[:, index]))
            added += len(violated)
            solver_cuts_total.labels(program=self.program).inc(len(violated))
            if added >= max_cuts or len(violated) == 0:
                solver_runs_total.labels(program=self.program, status="capped").inc()
                logger.warning(
                    "%s stopped after %d cuts with gap %.3e (requested %.3e)",
                    self.program, added, upper - lower, gap
                )
                return best_x, lower, upper, iterations, False


def _assemble(basis: List[ToeplitzMatrix], x: np.ndarray, n: int) -> ToeplitzMatrix:
    t = np.zeros(2 * n - 1, dtype=complex)
    for coefficient, element in zip(x, basis):
        t = t + coefficient * element.t
    return ToeplitzMatrix(n, t)


def _require_selfadjoint(b: FRElement) -> None:
    if not b.selfadjoint:
        raise NotHermitianError("functional is not self-adjoint (b_{-k} != conj(b_k))")


def _certified(basis, constraints, objective, box, n, program, gap, max_cuts) -> ConvexProgramResult:
    solver = _CuttingPlane(objective, constraints, box, program)
    with timed(program):
        x, lower, upper, iterations, converged = solver.solve(gap, max_cuts)
    return ConvexProgramResult(
        value=lower,
        lower=lower,
        upper=upper,
        optimizer=_assemble(basis, x, n),
        iterations=iterations,
        converged=converged
    )


def connes_distance(phi: State, psi: State, gap: float = None, max_cuts: int = None) -> ConvexProgramResult:
    """
    sup (phi - psi)(A) over hermitian Toeplitz A with ||i[D, A]|| <= 1.

    Constants do not move the objective, so A is taken trace-free.
    """
    gap = settings.gap if gap is None else gap
    max_cuts = settings.max_cuts if max_cuts is None else max_cuts
    if phi.n != psi.n:
        raise InvalidInputError(f"size mismatch: {phi.n} vs {psi.n}")
    n = phi.n
    b = phi.density - psi.density
    _require_selfadjoint(b)
    basis = _hermitian_basis(n, with_identity=False)
    objective = np.array([pairing(E, b).real for E in basis])
    constraints = np.array([dirac_commutator(E).dense() for E in basis]).reshape(len(basis), n, n)
    box = np.repeat(1.0 / np.arange(1, n), 2) if n > 1 else np.zeros(0)
    return _certified(basis, constraints, objective, box, n, "connes_distance", gap, max_cuts)


def dual_norm(b: FRElement, gap: float = None, max_cuts: int = None) -> ConvexProgramResult:
    """The norm dual to the Toeplitz operator norm: sup |sum_k b_k t_{-k}| over ||T|| <= 1."""
    gap = settings.gap if gap is None else gap
    max_cuts = settings.max_cuts if max_cuts is None else max_cuts
    _require_selfadjoint(b)
    basis = _hermitian_basis(b.n, with_identity=True)
    objective = np.array([pairing(E, b).real for E in basis])
    constraints = np.array([E.dense() for E in basis])
    box = np.ones(len(basis))
    return _certified(basis, constraints, objective, box, b.n, "dual_norm", gap, max_cuts)


def dual_route_distance(phi: State, psi: State, gap: float = None) -> float:
    """inf over real c of the dual norm of (primitive of phi - psi) - c delta_0."""
    gap = settings.gap if gap is None else gap
    if phi.n != psi.n:
        raise InvalidInputError(f"size mismatch: {phi.n} vs {psi.n}")
    B = primitive(phi.density - psi.density)
    radius = B.norm1()
    if radius == 0.0:
        return 0.0
    unit = delta(B.n)

    def objective(c: float) -> float:
        return dual_norm(B - unit * float(c), gap=gap).value

    result = minimize_scalar(objective, bounds=(-radius, radius), method="bounded",
                             options={"xatol": gap / 10})
    return float(min(result.fun, objective(0.0)))


def _abs_integral(g: FRElement) -> float:
    """Exact integral of |g| over [0, 2 pi] for a real trigonometric polynomial g."""
    k = g.indices
    nonzero = k != 0
    if not np.any(g.a[nonzero]):
        return float(2 * np.pi * abs(g.coeff(0).real))

    def antiderivative(x: np.ndarray) -> np.ndarray:
        phases = np.exp(1j * np.multiply.outer(x, k[nonzero]))
        return (g.coeff(0).real * x + (phases @ (g.a[nonzero] / (1j * k[nonzero]))).real)

    roots = laurent_polyroots(g.a)
    crossings = np.mod(np.angle(roots[np.abs(np.abs(roots) - 1.0) <= CROSSING_BAND]), 2 * np.pi)
    breakpoints = np.unique(np.concatenate([[0.0, 2 * np.pi], crossings]))
    return float(np.sum(np.abs(np.diff(antiderivative(breakpoints)))))


def l1_norm(b: FRElement) -> float:
    """Circle L1 norm of b with respect to d theta / 2 pi."""
    _require_selfadjoint(b)
    return _abs_integral(b) / (2 * np.pi)


def cumulative_difference(phi: State, psi: State) -> FRElement:
    """alpha(x) = mu([0, x]) - nu([0, x]) as a trigonometric polynomial."""
    b = phi.density - psi.density
    k = b.indices
    nonzero = k != 0
    coeffs = np.zeros(len(k), dtype=complex)
    coeffs[nonzero] = b.a[nonzero] / (2j * np.pi * k[nonzero])
    coeffs[b.n - 1] = -np.sum(coeffs[nonzero])
    return FRElement(b.n, coeffs)


def kantorovich(phi: State, psi: State, quad_tol: float = None) -> float:
    """Kantorovich distance inf_a int_0^{2 pi} |alpha(x) - a| dx between the two circle measures."""
    quad_tol = settings.quad_tol if quad_tol is None else quad_tol
    if phi.n != psi.n:
        raise InvalidInputError(f"size mismatch: {phi.n} vs {psi.n}")
    alpha = cumulative_difference(phi, psi)
    if not np.any(alpha.a):
        return 0.0
    low, _ = fr_min(alpha)
    high = -fr_min(alpha * -1.0)[0]
    unit = delta(alpha.n)

    def transport_cost(a: float) -> float:
        return _abs_integral(alpha - unit * float(a))

    if high - low <= quad_tol:
        return transport_cost(0.5 * (low + high))
    with timed("kantorovich"):
        result = minimize_scalar(transport_cost, bounds=(low, high), method="bounded",
                                 options={"xatol": quad_tol})
    return float(result.fun)


def compare_distances(phi: State, psi: State, gap: float = None, quad_tol: float = None,
                      with_dual_route: bool = False) -> Tuple[ConvexProgramResult, float, bool, Optional[float]]:
    """Connes distance, Kantorovich distance and whether the first dominates the second."""
    gap = settings.gap if gap is None else gap
    quad_tol = settings.quad_tol if quad_tol is None else quad_tol
    connes = connes_distance(phi, psi, gap=gap)
    transport = kantorovich(phi, psi, quad_tol=quad_tol)
    dominates = connes.upper >= transport - (gap + quad_tol)
    if not dominates:
        logger.warning("connes bound %.6g below kantorovich %.6g", connes.upper, transport)
    dual = dual_route_distance(phi, psi, gap=gap) if with_dual_route else None
    return connes, transport, bool(dominates), dual
