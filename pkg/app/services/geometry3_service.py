"""
The cone Toep(3)+ and its state space in explicit coordinates.

A hermitian Toeplitz(3) element is written (a, b, c, d, u) with t_0 = u,
t_1 = a + ib and t_2 = c + id; a functional on it is written (W, X, Y, Z),
acting as aW + bX + cY + dZ + u. Every identity below is checked on seeded
samples by `run_checks`.
"""
import logging
from typing import Callable, List, Sequence, Tuple

import numpy as np
import scipy.linalg

from app.core.config import settings
from app.core.errors import InvalidInputError, NotHermitianError
from app.models.domain import ConeCoords, FRElement, GeometryCheck, StateCoords, ToeplitzMatrix
from app.services.state_service import pure_state
from app.services.toeplitz_service import extreme_ray
from app.utils.metrics import timed

logger = logging.getLogger(__name__)

SAMPLE_KINDS = {
    "cone-slice": ("a", "b", "c", "d"),
    "state-surface": ("x", "y", "W", "X", "Y", "Z"),
    "boundary": ("x", "y", "s", "W", "X", "Y", "Z"),
}

IDENTITY_TOL = 1e-10
DISCRIMINANT_TOL = 1e-8
REGULARITY_FLOOR = 1e-3

# (coefficient, powers of W, X, Y, Z)
_DISCRIMINANT_TERMS = np.array([
    (1, 6, 0, 0, 0), (3, 4, 2, 0, 0), (15, 4, 0, 2, 0), (-18, 4, 0, 1, 0), (-12, 4, 0, 0, 2), (-1, 4, 0, 0, 0),
    (108, 3, 1, 1, 1), (-36, 3, 1, 0, 1),
    (3, 2, 4, 0, 0), (-78, 2, 2, 2, 0), (84, 2, 2, 0, 2), (-2, 2, 2, 0, 0),
    (48, 2, 0, 4, 0), (-144, 2, 0, 3, 0), (96, 2, 0, 2, 2), (80, 2, 0, 2, 0), (-144, 2, 0, 1, 2),
    (16, 2, 0, 1, 0), (48, 2, 0, 0, 4), (80, 2, 0, 0, 2),
    (-108, 1, 3, 1, 1), (-36, 1, 3, 0, 1), (-288, 1, 1, 2, 1), (-288, 1, 1, 0, 3), (32, 1, 1, 0, 1),
    (1, 0, 6, 0, 0), (15, 0, 4, 2, 0), (18, 0, 4, 1, 0), (-12, 0, 4, 0, 2), (-1, 0, 4, 0, 0),
    (48, 0, 2, 4, 0), (144, 0, 2, 3, 0), (96, 0, 2, 2, 2), (80, 0, 2, 2, 0), (144, 0, 2, 1, 2),
    (-16, 0, 2, 1, 0), (48, 0, 2, 0, 4), (80, 0, 2, 0, 2),
    (-64, 0, 0, 6, 0), (-192, 0, 0, 4, 2), (128, 0, 0, 4, 0), (-192, 0, 0, 2, 4), (256, 0, 0, 2, 2),
    (-64, 0, 0, 2, 0),
    (-64, 0, 0, 0, 6), (128, 0, 0, 0, 4), (-64, 0, 0, 0, 2),
], dtype=float)
_COEFFS = _DISCRIMINANT_TERMS[:, 0]
_POWERS = _DISCRIMINANT_TERMS[:, 1:].astype(int)


def cone_to_toeplitz(p: ConeCoords) -> ToeplitzMatrix:
    t1, t2 = complex(p.a, p.b), complex(p.c, p.d)
    return ToeplitzMatrix(3, [t2.conjugate(), t1.conjugate(), p.u, t1, t2])


def toeplitz_to_cone(T: ToeplitzMatrix) -> ConeCoords:
    if T.n != 3:
        raise InvalidInputError(f"cone coordinates describe Toep(3), got n={T.n}")
    if not T.hermitian:
        raise NotHermitianError("cone coordinates need a hermitian element")
    t1, t2 = T.coeff(1), T.coeff(2)
    return ConeCoords(t1.real, t1.imag, t2.real, t2.imag, T.coeff(0).real)


def cone_determinant(p: ConeCoords) -> float:
    """det of the Toeplitz(3) element, a cubic in (a, b, c, d, u)."""
    a, b, c, d, u = p
    return (u ** 3 - 2 * u * (a * a + b * b) - u * (c * c + d * d)
            + 2 * a * a * c - 2 * b * b * c + 4 * a * b * d)


def delta(p: ConeCoords) -> float:
    """The determinant on the slice u = 1."""
    a, b, c, d = p[:4]
    return 2 * a * a * (c - 1) + 4 * a * b * d - 2 * b * b * (c + 1) - c * c - d * d + 1


def delta_gradient(p: ConeCoords) -> np.ndarray:
    a, b, c, d = p[:4]
    return np.array([
        4 * a * (c - 1) + 4 * b * d,
        4 * a * d - 4 * b * (c + 1),
        2 * (a * a - b * b - c),
        4 * a * b - 2 * d,
    ])


def gamma_curve(x: float) -> ConeCoords:
    """Extreme points of the slice u = 1; the matrix is 3 * extreme_ray(e^{ix}, 3)."""
    return ConeCoords(np.cos(x), np.sin(x), np.cos(2 * x), np.sin(2 * x))


def _gamma_derivative(x: float) -> np.ndarray:
    return np.array([-np.sin(x), np.cos(x), -2 * np.sin(2 * x), 2 * np.cos(2 * x)])


def sigma(x: float, y: float, s: float) -> ConeCoords:
    point = s * np.array(gamma_curve(x)[:4]) + (1 - s) * np.array(gamma_curve(y)[:4])
    return ConeCoords(*point)


def sigma_jacobian_minors(x: float, y: float, s: float) -> np.ndarray:
    """The four 3x3 minors of d(sigma)/d(x, y, s), minor r omitting coordinate r."""
    jacobian = np.column_stack([
        s * _gamma_derivative(x),
        (1 - s) * _gamma_derivative(y),
        np.array(gamma_curve(x)[:4]) - np.array(gamma_curve(y)[:4]),
    ])
    return np.array([np.linalg.det(np.delete(jacobian, row, axis=0)) for row in range(4)])


def sigma_minor_norm(x: float, y: float, s: float) -> float:
    """Closed form of the sum of squared minors; zero exactly when s is 0 or 1 or x = y."""
    half = np.sin((x - y) / 2)
    return 64 * s ** 2 * (1 - s) ** 2 * half ** 8 * (1 + 8 * (1 + np.cos(x - y)))


def epsilon_state(x: float, y: float) -> StateCoords:
    scale = np.cos(x - y) + 2
    return StateCoords(
        2 * (np.cos(x) + np.cos(y)) / scale,
        2 * (np.sin(x) + np.sin(y)) / scale,
        np.cos(x + y) / scale,
        np.sin(x + y) / scale,
    )


def beta(x: float, y: float, s: float) -> StateCoords:
    point = s * epsilon_state(x, y).as_array() + (1 - s) * epsilon_state(x, y + np.pi).as_array()
    return StateCoords(*point)


def state_value(w: StateCoords, p: ConeCoords) -> float:
    return w.W * p.a + w.X * p.b + w.Y * p.c + w.Z * p.d + p.u


def state_coords_to_density(w: StateCoords) -> FRElement:
    first, second = complex(w.W, w.X) / 2, complex(w.Y, w.Z) / 2
    return FRElement(3, [second.conjugate(), first.conjugate(), 1.0, first, second])


def density_to_state_coords(a: FRElement) -> StateCoords:
    if a.n != 3:
        raise InvalidInputError(f"state coordinates describe densities with n=3, got n={a.n}")
    if not a.selfadjoint:
        raise NotHermitianError("density is not self-adjoint")
    a0 = a.coeff(0).real
    if a0 <= 0:
        raise InvalidInputError(f"density must have a_0 > 0, got {a0}")
    first, second = 2 * a.coeff(1) / a0, 2 * a.coeff(2) / a0
    return StateCoords(first.real, first.imag, second.real, second.imag)


def surface_residual(X: float, Y: float, Z: float) -> float:
    X2, Z2 = X * X, Z * Z
    return (X2 * X2 + 8 * X2 * Y * Y + 8 * X2 * Y + 8 * X2 * Z2
            + 16 * Y * Y * Z2 + 16 * Z2 * Z2 - 16 * Z2)


def quartic_residuals(w: StateCoords) -> Tuple[float, float]:
    W, X, Y, Z = w
    first = W * W * X * X + 2 * W * W * Z * Z - 4 * W * X * Z + 2 * X * X * Z * Z
    second = W * W * (X * X + 4 * Z * Z) + 4 * Z * Z * (X * X + 4 * (Y * Y + Z * Z - 1))
    return first, second


def discriminant(w: StateCoords) -> float:
    """The sextic d(W, X, Y, Z) whose zero set contains the boundary of the state space."""
    point = np.asarray(w, dtype=float)
    return float(_COEFFS @ np.prod(point[None, :] ** _POWERS, axis=1))


def discriminant_gradient(w: StateCoords) -> np.ndarray:
    point = np.asarray(w, dtype=float)
    gradient = np.zeros(4)
    for var in range(4):
        factor = _POWERS[:, var]
        lowered = _POWERS.copy()
        lowered[:, var] = np.maximum(factor - 1, 0)
        gradient[var] = (_COEFFS * factor) @ np.prod(point[None, :] ** lowered, axis=1)
    return gradient


def _cone_slice(count: int, rng: np.random.Generator, slice_d: float) -> np.ndarray:
    if not abs(slice_d) < 1:
        raise InvalidInputError(f"slice d={slice_d} misses the interior of the cone (need |d| < 1)")
    base = cone_to_toeplitz(ConeCoords(0.0, 0.0, 0.0, slice_d)).dense()
    directions = rng.standard_normal((count, 3))
    directions /= np.linalg.norm(directions, axis=1, keepdims=True)
    rows = []
    for ua, ub, uc in directions:
        step = cone_to_toeplitz(ConeCoords(ua, ub, uc, 0.0, 0.0)).dense()
        lowest = scipy.linalg.eigh(step, base, eigvals_only=True)[0]
        radius = -1.0 / lowest
        rows.append((radius * ua, radius * ub, radius * uc, slice_d))
    return np.array(rows).reshape(count, 4)


def sample_surfaces(kind: str, count: int, seed: int = None, slice_d: float = -0.4) -> Tuple[Tuple[str, ...], np.ndarray]:
    """
    Point clouds for plotting: the boundary of the slice {d = slice_d} of the
    cone, the surface of epsilon states, or the boundary of the state space.
    """
    seed = settings.seed if seed is None else seed
    if kind not in SAMPLE_KINDS:
        raise InvalidInputError(f"unknown sample kind {kind!r}, expected one of {sorted(SAMPLE_KINDS)}")
    if count < 0:
        raise InvalidInputError(f"count must be non-negative, got {count}")
    columns = SAMPLE_KINDS[kind]
    rng = np.random.default_rng(seed)
    if kind == "cone-slice":
        return columns, _cone_slice(count, rng, slice_d)
    angles = rng.uniform(0.0, 2 * np.pi, size=(count, 2))
    if kind == "state-surface":
        rows = [(x, y, *epsilon_state(x, y)) for x, y in angles]
    else:
        weights = rng.uniform(0.0, 1.0, size=count)
        rows = [(x, y, s, *beta(x, y, s)) for (x, y), s in zip(angles, weights)]
    return columns, np.array(rows, dtype=float).reshape(count, len(columns))


def _worst(name: str, residual: Callable[..., float], samples: Sequence[tuple], bound: float) -> GeometryCheck:
    value = max((abs(residual(*sample)) for sample in samples), default=0.0)
    return GeometryCheck(name, bool(value <= bound), float(value), bound)


def _curve_matches_ray(x: float) -> float:
    bridge = cone_to_toeplitz(gamma_curve(x)).dense() - 3 * extreme_ray(np.exp(1j * x), 3).dense()
    return float(np.max(np.abs(bridge)))


def _epsilon_matches_pure_state(x: float, y: float) -> float:
    expected = pure_state([x, y]).density.a
    return float(np.max(np.abs(state_coords_to_density(epsilon_state(x, y)).a - expected)))


def _regular_on_beta(samples: Sequence[tuple]) -> GeometryCheck:
    value = min((float(np.linalg.norm(discriminant_gradient(beta(x, y, s)))) for x, y, s in samples),
                default=np.inf)
    return GeometryCheck("discriminant_regular_on_beta", bool(value >= REGULARITY_FLOOR), value, REGULARITY_FLOOR)


def run_checks(seed: int = None, samples: int = 1000) -> List[GeometryCheck]:
    """Evaluate every identity of the n=3 picture on seeded random samples."""
    seed = settings.seed if seed is None else seed
    rng = np.random.default_rng(seed)
    points = [tuple(p) for p in rng.uniform(-1.0, 1.0, size=(samples, 4))]
    xs = rng.uniform(0.0, 2 * np.pi, size=samples)
    xys = [tuple(p) for p in rng.uniform(0.0, 2 * np.pi, size=(samples, 2))]
    xyss = [(x, y, s) for (x, y), s in zip(xys, rng.uniform(0.0, 1.0, size=samples))]
    inner = [(x, y, s) for (x, y), s in zip(xys, rng.uniform(0.1, 0.9, size=samples))]
    ts = rng.uniform(0.0, 1.0, size=samples)

    with timed("geometry3_checks"):
        checks = [
            _worst("delta_matches_determinant",
                   lambda *p: delta(ConeCoords(*p)) - np.linalg.det(cone_to_toeplitz(ConeCoords(*p)).dense()).real,
                   points, IDENTITY_TOL),
            _worst("cubic_matches_determinant",
                   lambda *p: cone_determinant(ConeCoords(*p[:3], p[3], 0.5 + abs(p[0])))
                   - np.linalg.det(cone_to_toeplitz(ConeCoords(*p[:3], p[3], 0.5 + abs(p[0]))).dense()).real,
                   points, IDENTITY_TOL),
            _worst("delta_vanishes_on_sigma", lambda x, y, s: delta(sigma(x, y, s)), xyss, IDENTITY_TOL),
            _worst("delta_singular_on_curve",
                   lambda x: np.linalg.norm(delta_gradient(gamma_curve(x))), [(x,) for x in xs], IDENTITY_TOL),
            _worst("curve_is_extreme_ray", _curve_matches_ray, [(x,) for x in xs], IDENTITY_TOL),
            _worst("trace_segment",
                   lambda x, t: delta(ConeCoords(*(t * np.array(gamma_curve(x)[:4])))) - (t - 1) ** 2 * (2 * t + 1),
                   list(zip(xs, ts)), IDENTITY_TOL),
            _worst("sigma_minor_law",
                   lambda x, y, s: np.sum(sigma_jacobian_minors(x, y, s) ** 2) - sigma_minor_norm(x, y, s),
                   xyss, IDENTITY_TOL),
            _worst("epsilon_supports_sigma",
                   lambda x, y, s: state_value(epsilon_state(x + np.pi, y + np.pi), sigma(x, y, s)),
                   xyss, IDENTITY_TOL),
            _worst("epsilon_symmetric",
                   lambda x, y: np.max(np.abs(epsilon_state(x, y).as_array() - epsilon_state(y, x).as_array())),
                   xys, IDENTITY_TOL),
            _worst("epsilon_is_pure_state", _epsilon_matches_pure_state, xys, IDENTITY_TOL),
            _worst("surface_contains_epsilon",
                   lambda x, y: surface_residual(*epsilon_state(x, y)[1:]), xys, IDENTITY_TOL),
            _worst("quartics_contain_epsilon",
                   lambda x, y: max(map(abs, quartic_residuals(epsilon_state(x, y)))), xys, IDENTITY_TOL),
            _worst("discriminant_vanishes_on_beta",
                   lambda x, y, s: discriminant(beta(x, y, s)), xyss, DISCRIMINANT_TOL),
            _worst("discriminant_singular_on_epsilon",
                   lambda x, y: np.linalg.norm(discriminant_gradient(epsilon_state(x, y))), xys, DISCRIMINANT_TOL),
            _regular_on_beta(inner),
            _worst("beta_critical_circle",
                   lambda x, y: np.max(np.abs(beta(x, y, (np.cos(x - y) + 2) / 4).as_array()
                                              - np.array([np.cos(x), np.sin(x), 0.0, 0.0]))),
                   xys, IDENTITY_TOL),
        ]
    for check in checks:
        if not check.passed:
            logger.warning("identity %s failed: %.3e against bound %.1e", check.name, check.value, check.bound)
    return checks
