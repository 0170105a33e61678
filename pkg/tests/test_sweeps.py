import numpy as np
import pytest
from numpy.polynomial import polynomial as P
from numpy.testing import assert_allclose

from app.services.decompose_service import det_multiplicity, reconstruct, vandermonde_decompose
from app.services.factor_service import fejer_riesz_factorize
from app.services.metric_service import compare_distances, connes_distance, dual_route_distance
from app.services.state_service import state_from_density
from app.services.toeplitz_service import delta, identity, operator_norm, pairing, vector_density
from app.utils.polynomials import polyroots

pytestmark = pytest.mark.slow

GRID = np.linspace(0, 2 * np.pi, 2048, endpoint=False)


def _separated(rng, r):
    return 2 * np.pi * (np.arange(r) + 0.5 * rng.uniform(size=r)) / r


def _factor_vector(rng, n):
    """Degree n-1 coefficients: generic, every root on the circle, or a mix."""
    kind = int(rng.integers(3))
    if kind == 0 or n == 1:
        return rng.standard_normal(n) + 1j * rng.standard_normal(n)
    on_circle = n - 1 if kind == 1 else int(rng.integers(1, n))
    roots = list(np.exp(1j * _separated(rng, on_circle)))
    for _ in range(n - 1 - on_circle):
        radius = rng.uniform(0.2, 0.9) if rng.uniform() < 0.5 else rng.uniform(1.1, 3.0)
        roots.append(radius * np.exp(2j * np.pi * rng.uniform()))
    return P.polyfromroots(roots)


def _random_state(rng, n):
    xi = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return state_from_density(vector_density(xi) + delta(n) * float(rng.uniform(0.1, 1.0)))


def test_fejer_riesz_sweep(rng):
    for _ in range(500):
        n = int(rng.integers(1, 17))
        a = vector_density(_factor_vector(rng, n))

        factor = fejer_riesz_factorize(a)

        error = np.max(np.abs(vector_density(factor.q).evaluate(GRID) - a.evaluate(GRID)))
        assert error <= 1e-8 * a.norm1()
        assert np.all(np.abs(polyroots(factor.q)) <= 1 + 1e-6)


def test_vandermonde_sweep(rng, make_rays):
    for _ in range(500):
        n = int(rng.integers(1, 13))
        r = int(rng.integers(0, n + 1))
        weights = rng.uniform(0.5, 2.0, size=r)
        if r < n:
            angles = _separated(rng, r)
            T = make_rays(angles, weights, n)
        else:
            angles = rng.uniform(0, 2 * np.pi, size=r)
            T = make_rays(angles, weights, n) + identity(n) * float(rng.uniform(0.1, 1.0))

        vd = vandermonde_decompose(T)

        assert np.all(vd.weights >= 0)
        assert np.max(np.abs(reconstruct(vd, n).t - T.t), initial=0.0) <= 1e-8 * operator_norm(T)
        if r < n:
            again = vandermonde_decompose(make_rays(angles[::-1], weights[::-1], n))
            order = np.argsort(np.mod(angles, 2 * np.pi))
            assert vd.rank == again.rank == r
            assert_allclose(vd.angles, again.angles, atol=1e-6)
            assert_allclose(vd.angles, np.mod(angles, 2 * np.pi)[order], atol=1e-6)
            assert_allclose(vd.weights, weights[order], rtol=1e-6)


def test_boundary_stratification_sweep(rng, make_boundary):
    for _ in range(200):
        n = int(rng.integers(2, 7))
        r = int(rng.integers(1, n))
        T, _, _ = make_boundary(n, r)

        assert det_multiplicity(T) + r == n


def test_positive_pairing_sweep(rng, make_rays, random_hermitian):
    for _ in range(200):
        n = int(rng.integers(2, 9))
        r = int(rng.integers(1, n + 1))
        T = make_rays(rng.uniform(0, 2 * np.pi, size=r), rng.uniform(0.2, 2.0, size=r), n)
        scale = operator_norm(T)
        for _ in range(50):
            a = vector_density(rng.standard_normal(n) + 1j * rng.standard_normal(n))
            assert pairing(T, a).real >= -1e-10 * scale * a.norm1()

        H = random_hermitian(n)
        eigenvalues, vectors = np.linalg.eigh(H.dense())
        witness = pairing(H, vector_density(vectors[:, 0])).real
        assert witness == pytest.approx(eigenvalues[0], abs=1e-10 * operator_norm(H))


def test_connes_dominates_kantorovich_sweep(rng):
    gap, quad_tol = 1e-4, 1e-8
    for _ in range(100):
        n = int(rng.integers(2, 9))
        phi, psi = _random_state(rng, n), _random_state(rng, n)

        connes, transport, dominates, _ = compare_distances(phi, psi, gap=gap, quad_tol=quad_tol)

        assert dominates
        assert connes.upper >= transport - (gap + quad_tol)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_dual_route_sweep(rng, n):
    gap = 1e-5
    for _ in range(3):
        phi, psi = _random_state(rng, n), _random_state(rng, n)

        direct = connes_distance(phi, psi, gap=gap).value
        dual = dual_route_distance(phi, psi, gap=gap)

        assert abs(dual - direct) <= 2 * gap
