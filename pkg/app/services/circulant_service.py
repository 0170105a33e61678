"""
Circulant matrices, the finite Fourier transform on C_m and the passage
between Toeplitz and circulant systems.

Roots of unity: zeta = exp(2 pi i / m) and xi = conj(zeta); the transform
F(psi)(k) = sum_l psi(l) xi^{kl} is numpy's forward FFT.
"""
import logging
from typing import Sequence

import numpy as np

from app.core.config import settings
from app.core.errors import InvalidInputError
from app.models.domain import CirculantMatrix, ToeplitzMatrix

logger = logging.getLogger(__name__)

RANK_RTOL = 1e-9


def _sequence(values: Sequence[complex]) -> np.ndarray:
    values = np.asarray(values, dtype=complex).reshape(-1)
    if len(values) == 0:
        raise InvalidInputError("sequence on C_m needs m >= 1")
    return values


def fourier_transform(f: Sequence[complex]) -> np.ndarray:
    return np.fft.fft(_sequence(f))


def inverse_fourier_transform(f: Sequence[complex]) -> np.ndarray:
    """F-bar, the transform with zeta in place of xi; F-bar F = m id."""
    f = _sequence(f)
    return np.fft.ifft(f) * len(f)


def cyclic_convolve(f: Sequence[complex], g: Sequence[complex]) -> np.ndarray:
    f, g = _sequence(f), _sequence(g)
    if len(f) != len(g):
        raise InvalidInputError(f"size mismatch: {len(f)} vs {len(g)}")
    return np.fft.ifft(np.fft.fft(f) * np.fft.fft(g))


def group_pairing(f: Sequence[complex], g: Sequence[complex]) -> complex:
    """<f, g> = (f * g)(0) = sum_l f_l g_{-l mod m}."""
    f, g = _sequence(f), _sequence(g)
    if len(f) != len(g):
        raise InvalidInputError(f"size mismatch: {len(f)} vs {len(g)}")
    reflected = np.roll(g[::-1], 1)
    return complex(np.dot(f, reflected))


def circulant(c: Sequence[complex]) -> CirculantMatrix:
    c = _sequence(c)
    return CirculantMatrix(len(c), c)


def circulant_eigenvalues(C: CirculantMatrix) -> np.ndarray:
    """sum_l c_l xi^{kl}; column (-k mod m) of fourier_unitary(m) is the matching eigenvector."""
    return np.fft.fft(C.c)


def fourier_unitary(m: int) -> np.ndarray:
    """m^{-1/2} F with F[k, l] = xi^{kl}."""
    k = np.arange(m)
    return np.exp(-2j * np.pi * np.outer(k, k) / m) / np.sqrt(m)


def circulant_is_positive(C: CirculantMatrix, tol: float = None) -> bool:
    tol = settings.tol if tol is None else tol
    eigenvalues = circulant_eigenvalues(C)
    scale = max(np.max(np.abs(eigenvalues)), np.finfo(float).tiny)
    if np.max(np.abs(eigenvalues.imag)) > max(tol, 1e-12) * scale:
        return False
    return bool(np.min(eigenvalues.real) >= -tol * scale)


def complete_toeplitz(T: ToeplitzMatrix, m: int) -> CirculantMatrix:
    """Circulant whose upper-left n x n corner is T; free coefficients are zero."""
    if m < 2 * T.n - 1:
        raise InvalidInputError(f"completion needs m >= 2n-1 = {2 * T.n - 1}, got {m}")
    c = np.zeros(m, dtype=complex)
    for k in range(T.n):
        c[k] = T.coeff(k)
    for k in range(1, T.n):
        c[m - k] = T.coeff(-k)
    return CirculantMatrix(m, c)


def compress_circulant(C: CirculantMatrix, n: int) -> ToeplitzMatrix:
    if n > C.m:
        raise InvalidInputError(f"cannot compress an {C.m}x{C.m} circulant to size {n}")
    if n < 1:
        raise InvalidInputError(f"size must be positive, got n={n}")
    return ToeplitzMatrix(n, [C.c[k % C.m] for k in range(-n + 1, n)])


def cyclic_shift(m: int) -> np.ndarray:
    """S e_k = e_{k+1 mod m}."""
    return np.roll(np.eye(m, dtype=complex), 1, axis=0)


def tensor_map_matrix(n: int) -> np.ndarray:
    """Matrix of delta_k (x) tau_j -> S^k (tau_j + 0) S^{-k}, columns over the basis pairs."""
    if n < 2:
        raise InvalidInputError(f"tensor map needs n >= 2, got {n}")
    m = 2 * n - 1
    S = cyclic_shift(m)
    columns = []
    for k in range(m):
        Sk = np.linalg.matrix_power(S, k)
        for j in range(-n + 1, n):
            block = np.zeros((m, m), dtype=complex)
            block[:n, :n] = np.eye(n, k=-j)
            columns.append((Sk @ block @ Sk.conj().T).reshape(-1))
    return np.array(columns).T


def _is_prime(m: int) -> bool:
    return m > 1 and all(m % p for p in range(2, int(np.sqrt(m)) + 1))


def tensor_map_rank(n: int) -> int:
    matrix = tensor_map_matrix(n)
    singular = np.linalg.svd(matrix, compute_uv=False)
    rank = int(np.count_nonzero(singular > RANK_RTOL * singular[0]))
    m = 2 * n - 1
    if not _is_prime(m):
        logger.info("tensor map for composite m=%d has rank %d of %d", m, rank, m * m)
    return rank


def is_prime_order(n: int) -> bool:
    return _is_prime(2 * n - 1)
