import numpy as np
import pytest
from numpy.polynomial import polynomial as P
from numpy.testing import assert_allclose

from app.core.errors import FactorizationError, InvalidInputError, NotHermitianError, NotPositiveError
from app.models.domain import FRElement
from app.services.factor_service import annihilating_densities, fejer_riesz_factorize, laurent_roots
from app.services.state_service import pure_state
from app.services.toeplitz_service import extreme_ray, fr_is_positive, pairing, vector_density


def test_one_plus_cosine():
    factor = fejer_riesz_factorize(FRElement(2, [0.5, 1, 0.5]))

    assert_allclose(factor.q, [1 / np.sqrt(2), 1 / np.sqrt(2)], atol=1e-7)
    assert factor.residual < 1e-7


def test_constant_density():
    factor = fejer_riesz_factorize(FRElement(2, [0, 2, 0]))

    assert_allclose(factor.q, [np.sqrt(2), 0])
    assert factor.residual == 0.0


@pytest.mark.parametrize("n", [2, 3, 5, 8])
def test_generic_density_round_trip(rng, n):
    xi = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    a = vector_density(xi) + FRElement(n, np.eye(1, 2 * n - 1, n - 1)[0] * 0.1)

    factor = fejer_riesz_factorize(a)

    assert factor.n == n
    assert_allclose(vector_density(factor.q).a, a.a, atol=1e-8 * a.norm1())
    assert factor.q[0].real >= 0 and abs(factor.q[0].imag) < 1e-12
    roots = P.polyroots(factor.q)
    assert np.all(np.abs(roots) <= 1 + 1e-8)


@pytest.mark.parametrize("angles", [[0.4], [0.3, 2.0], [0.1, 1.9, 4.0], [0.5, 1.5, 3.0, 5.0]])
def test_density_with_circle_zeros(angles):
    a = pure_state(angles).density

    factor = fejer_riesz_factorize(a)

    assert_allclose(vector_density(factor.q).a, a.a, atol=1e-8)


def test_recovers_a_factor_with_roots_in_the_disc():
    xi = P.polyfromroots([0.5, -0.3j, 0.2 + 0.4j])

    q = fejer_riesz_factorize(vector_density(xi)).q

    assert_allclose(q, xi * np.conj(xi[0]) / abs(xi[0]), atol=1e-10)


def test_rejects_negative_density():
    with pytest.raises(NotPositiveError):
        fejer_riesz_factorize(FRElement(2, [0.6, 1, 0.6]))


def test_rejects_non_selfadjoint_density():
    with pytest.raises(NotHermitianError):
        fejer_riesz_factorize(FRElement(2, [1j, 1, 1j]))


def test_laurent_roots_of_zero():
    with pytest.raises(InvalidInputError):
        laurent_roots(FRElement(2, [0, 0, 0]))


def test_laurent_roots_of_one_plus_cosine():
    roots = laurent_roots(FRElement(2, [0.5, 1, 0.5]))

    assert_allclose(roots, [-1, -1], atol=1e-7)


def test_kernel_densities_are_annihilated():
    T = extreme_ray(1, 3) + extreme_ray(-1, 3)

    densities = annihilating_densities(T)

    assert len(densities) == 1
    for a in densities:
        assert abs(pairing(T, a)) < 1e-12
        assert fr_is_positive(a)


def test_kernel_densities_need_positive_matrix():
    with pytest.raises(NotPositiveError):
        annihilating_densities(extreme_ray(1, 3) * -1.0)


def test_double_circle_root_factor():
    a = vector_density([1, -2, 1])

    factor = fejer_riesz_factorize(a)

    assert_allclose(factor.q, [1, -2, 1], atol=1e-8)
    assert factor.residual <= 1e-9 * a.norm1()


@pytest.mark.parametrize("angles", [[1.0, 1.0], [1.0, 1.0, 1.0], [1.0] * 4, [0.2, 0.2, 3.0]])
def test_repeated_circle_zeros_factor(angles):
    a = pure_state(angles).density

    factor = fejer_riesz_factorize(a)

    assert factor.residual <= 1e-9 * a.norm1()
    grid = np.linspace(0, 2 * np.pi, 512, endpoint=False)
    assert np.max(np.abs(vector_density(factor.q).evaluate(grid) - a.evaluate(grid))) <= 1e-8 * a.norm1()


def test_unrecoverable_factor_is_rejected(monkeypatch):
    monkeypatch.setattr(
        "app.services.factor_service.circular_mean",
        lambda points: complex(np.exp(1j * (np.angle(np.mean(points)) + 0.1)))
    )
    monkeypatch.setattr("app.services.factor_service._polish", lambda q, a: q)

    with pytest.raises(FactorizationError):
        fejer_riesz_factorize(pure_state([0.4, 2.0]).density)
