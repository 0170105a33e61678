"""
Numeric domain types.

Coefficient sequences are stored in ascending order k = -n+1 .. n-1 as
complex numpy arrays of length 2n-1; index k lives at position k + n - 1.
Instances are immutable: the arrays are copied and flagged read-only.
"""
from dataclasses import dataclass, field
from typing import NamedTuple, Tuple

import numpy as np
import scipy.linalg

from app.core.errors import InvalidInputError

HERMITIAN_RTOL = 1e-12


def _frozen(values, dtype=complex) -> np.ndarray:
    array = np.array(values, dtype=dtype).reshape(-1)
    array.setflags(write=False)
    return array


def _check_length(n: int, values: np.ndarray, name: str) -> None:
    if n < 1:
        raise InvalidInputError(f"size must be positive, got n={n}")
    if len(values) != 2 * n - 1:
        raise InvalidInputError(f"{name} must have length 2n-1={2 * n - 1}, got {len(values)}")


def _is_palindromic(values: np.ndarray) -> bool:
    scale = max(float(np.max(np.abs(values))), 1.0) if len(values) else 1.0
    return bool(np.max(np.abs(values[::-1] - values.conj())) <= HERMITIAN_RTOL * scale)


@dataclass(frozen=True, eq=False)
class ToeplitzMatrix:
    """n x n matrix with constant diagonals, entry (k, l) equal to t_{k-l}."""
    n: int
    t: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "t", _frozen(self.t))
        _check_length(self.n, self.t, "t")

    def coeff(self, k: int) -> complex:
        if abs(k) >= self.n:
            return 0j
        return complex(self.t[k + self.n - 1])

    @property
    def hermitian(self) -> bool:
        return _is_palindromic(self.t)

    def dense(self) -> np.ndarray:
        column = self.t[self.n - 1:]
        row = self.t[:self.n][::-1]
        return scipy.linalg.toeplitz(column, row)

    def trace(self) -> complex:
        return self.n * self.coeff(0)

    def __add__(self, other: "ToeplitzMatrix") -> "ToeplitzMatrix":
        if other.n != self.n:
            raise InvalidInputError(f"size mismatch: {self.n} vs {other.n}")
        return ToeplitzMatrix(self.n, self.t + other.t)

    def __sub__(self, other: "ToeplitzMatrix") -> "ToeplitzMatrix":
        if other.n != self.n:
            raise InvalidInputError(f"size mismatch: {self.n} vs {other.n}")
        return ToeplitzMatrix(self.n, self.t - other.t)

    def __mul__(self, scalar: complex) -> "ToeplitzMatrix":
        return ToeplitzMatrix(self.n, self.t * scalar)

    __rmul__ = __mul__

    def __neg__(self) -> "ToeplitzMatrix":
        return ToeplitzMatrix(self.n, -self.t)


@dataclass(frozen=True, eq=False)
class FRElement:
    """Laurent coefficient sequence supported in (-n, n)."""
    n: int
    a: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "a", _frozen(self.a))
        _check_length(self.n, self.a, "a")

    def coeff(self, k: int) -> complex:
        if abs(k) >= self.n:
            return 0j
        return complex(self.a[k + self.n - 1])

    @property
    def indices(self) -> np.ndarray:
        return np.arange(-self.n + 1, self.n)

    @property
    def selfadjoint(self) -> bool:
        return _is_palindromic(self.a)

    def adjoint(self) -> "FRElement":
        return FRElement(self.n, self.a[::-1].conj())

    def norm1(self) -> float:
        """Sum of coefficient moduli; dominates the sup norm on the circle."""
        return float(np.sum(np.abs(self.a)))

    def evaluate(self, theta) -> np.ndarray:
        theta = np.asarray(theta, dtype=float)
        phases = np.exp(1j * np.multiply.outer(theta, self.indices))
        return phases @ self.a

    def __add__(self, other: "FRElement") -> "FRElement":
        if other.n != self.n:
            raise InvalidInputError(f"size mismatch: {self.n} vs {other.n}")
        return FRElement(self.n, self.a + other.a)

    def __sub__(self, other: "FRElement") -> "FRElement":
        if other.n != self.n:
            raise InvalidInputError(f"size mismatch: {self.n} vs {other.n}")
        return FRElement(self.n, self.a - other.a)

    def __mul__(self, scalar: complex) -> "FRElement":
        return FRElement(self.n, self.a * scalar)

    __rmul__ = __mul__


@dataclass(frozen=True, eq=False)
class FourierVector:
    n: int
    z: complex

    @property
    def v(self) -> np.ndarray:
        return self.z ** np.arange(self.n) / np.sqrt(self.n)


@dataclass(frozen=True, eq=False)
class SpectralFactor:
    """Minimum-phase factor q with |q(z)|^2 = a(z) on the circle."""
    q: np.ndarray
    residual: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "q", _frozen(self.q))

    @property
    def n(self) -> int:
        return len(self.q)


@dataclass(frozen=True, eq=False)
class VandermondeDecomposition:
    angles: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "angles", _frozen(self.angles, float))
        object.__setattr__(self, "weights", _frozen(self.weights, float))
        if len(self.angles) != len(self.weights):
            raise InvalidInputError("angles and weights must have equal length")

    @property
    def rank(self) -> int:
        return len(self.angles)

    @property
    def nodes(self) -> np.ndarray:
        return np.exp(1j * self.angles)


@dataclass(frozen=True, eq=False)
class State:
    """A state on Toep(n) stored through its density (a_0 = 1, positive)."""
    density: FRElement

    @property
    def n(self) -> int:
        return self.density.n


@dataclass(frozen=True, eq=False)
class PureStateVector:
    xi: np.ndarray
    root_angles: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "xi", _frozen(self.xi))
        object.__setattr__(self, "root_angles", _frozen(self.root_angles, float))

    @property
    def n(self) -> int:
        return len(self.xi)


@dataclass(frozen=True, eq=False)
class DiracTruncation:
    n: int

    @property
    def eigenvalues(self) -> np.ndarray:
        return np.arange(1, self.n + 1, dtype=float)

    def dense(self) -> np.ndarray:
        return np.diag(self.eigenvalues).astype(complex)


@dataclass(frozen=True, eq=False)
class ConvexProgramResult:
    value: float
    lower: float
    upper: float
    optimizer: ToeplitzMatrix
    iterations: int
    converged: bool = True

    @property
    def gap(self) -> float:
        return self.upper - self.lower


@dataclass(frozen=True, eq=False)
class CirculantMatrix:
    """m x m circulant, entry (k, l) equal to c_{(k-l) mod m}."""
    m: int
    c: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "c", _frozen(self.c))
        if self.m < 1 or len(self.c) != self.m:
            raise InvalidInputError(f"c must have length m={self.m}, got {len(self.c)}")

    def dense(self) -> np.ndarray:
        return scipy.linalg.circulant(self.c)


@dataclass(frozen=True, eq=False)
class MatrixSystem:
    N: int
    basis: Tuple[np.ndarray, ...] = field(default_factory=tuple)
    name: str = ""

    def stacked(self) -> np.ndarray:
        return np.array([np.asarray(b, dtype=complex) for b in self.basis]).reshape(len(self.basis), self.N, self.N)


class ConeCoords(NamedTuple):
    """Hermitian Toeplitz(3) with t_0 = u, t_1 = a + ib, t_2 = c + id."""
    a: float
    b: float
    c: float
    d: float
    u: float = 1.0


class StateCoords(NamedTuple):
    """Linear functional aW + bX + cY + dZ + u on ConeCoords."""
    W: float
    X: float
    Y: float
    Z: float

    def as_array(self) -> np.ndarray:
        return np.array(self, dtype=float)


@dataclass(frozen=True)
class GeometryCheck:
    """Outcome of one sampled identity; `value` is the worst residual, or the smallest magnitude for lower-bound checks."""
    name: str
    passed: bool
    value: float
    bound: float
