"""
Polynomial root helpers shared by the factor, decompose and state services.

Coefficient arrays are ascending (index j multiplies z**j), the convention
of numpy.polynomial.polynomial.
"""
from typing import List

import numpy as np
from numpy.polynomial import polynomial as P
from scipy.cluster.hierarchy import fcluster, linkage

TRIM_RTOL = 1e-14


def trim_support(coeffs: np.ndarray, rtol: float = TRIM_RTOL) -> tuple[int, int]:
    """Return (lo, hi) such that coeffs[lo:hi+1] holds every non-negligible entry."""
    magnitude = np.abs(coeffs)
    scale = magnitude.max() if len(magnitude) else 0.0
    if scale == 0.0:
        return 0, -1
    significant = np.flatnonzero(magnitude > rtol * scale)
    return int(significant[0]), int(significant[-1])


def polyroots(coeffs: np.ndarray, rtol: float = TRIM_RTOL) -> np.ndarray:
    """Roots of an ascending coefficient array via companion-matrix eigenvalues.

    Negligible leading coefficients are dropped, so the degree may shrink.
    """
    coeffs = np.asarray(coeffs, dtype=complex)
    _, hi = trim_support(coeffs, rtol)
    if hi < 1:
        return np.zeros(0, dtype=complex)
    return np.asarray(P.polyroots(coeffs[:hi + 1]), dtype=complex)


def laurent_polyroots(coeffs: np.ndarray, rtol: float = TRIM_RTOL) -> np.ndarray:
    """Finite non-zero roots of a Laurent polynomial given on a contiguous index range."""
    coeffs = np.asarray(coeffs, dtype=complex)
    lo, hi = trim_support(coeffs, rtol)
    if hi <= lo:
        return np.zeros(0, dtype=complex)
    return np.asarray(P.polyroots(coeffs[lo:hi + 1]), dtype=complex)


def cluster_points(points: np.ndarray, radius: float) -> List[np.ndarray]:
    """Single-linkage clusters of complex points; chains closer than radius merge."""
    points = np.asarray(points, dtype=complex)
    if len(points) == 0:
        return []
    if len(points) == 1:
        return [np.array([0])]
    plane = np.column_stack([points.real, points.imag])
    labels = fcluster(linkage(plane, method="single"), t=radius, criterion="distance")
    groups = [np.flatnonzero(labels == label) for label in np.unique(labels)]
    return sorted(groups, key=lambda group: float(np.angle(points[group].mean()) % (2 * np.pi)))


def circular_mean(points: np.ndarray) -> complex:
    """Mean direction of points near the unit circle, projected back onto it."""
    centre = np.mean(np.asarray(points, dtype=complex))
    return complex(np.exp(1j * np.angle(centre)))


def wrap_angles(angles) -> np.ndarray:
    return np.mod(np.asarray(angles, dtype=float), 2 * np.pi)
