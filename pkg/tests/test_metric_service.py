from types import SimpleNamespace

import numpy as np
import pytest
from numpy.testing import assert_allclose
from prometheus_client import REGISTRY
from scipy.optimize import linprog

from app.core.errors import InvalidInputError, NotHermitianError
from app.models.domain import FRElement, State, ToeplitzMatrix
from app.services.metric_service import (
    compare_distances,
    connes_distance,
    cumulative_difference,
    derivative_transpose,
    dirac,
    dirac_commutator,
    dual_norm,
    dual_route_distance,
    kantorovich,
    l1_norm,
    primitive,
)
from app.services.state_service import pure_state, rotate_state, state_from_density, trace_state
from app.services.toeplitz_service import delta, identity, shift


def _disc_state(w):
    """n = 2 state acting as u + w . (a, b) on t_1 = a + ib."""
    return state_from_density(FRElement(2, [(w[0] - 1j * w[1]) / 2, 1.0, (w[0] + 1j * w[1]) / 2]))


def _random_state(rng, n):
    xi = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    density = FRElement(n, np.convolve(xi, xi[::-1].conj()))
    return state_from_density(density + delta(n) * 0.5)


def test_dirac_spectrum():
    D = dirac(4)

    assert_allclose(D.eigenvalues, [1, 2, 3, 4])
    assert_allclose(np.diag(D.dense()).real, [1, 2, 3, 4])


def test_commutator_matches_matrix_commutator(random_hermitian):
    T = random_hermitian(4)
    D = dirac(4).dense()

    expected = 1j * (D @ T.dense() - T.dense() @ D)
    assert_allclose(dirac_commutator(T).dense(), expected, atol=1e-12)


def test_commutator_kernel_and_shift():
    assert_allclose(dirac_commutator(identity(3)).t, np.zeros(5))
    assert_allclose(dirac_commutator(shift(1, 3)).t, 1j * shift(1, 3).t)


def test_commutator_norm_for_two_by_two():
    a, b = 0.3, -1.1
    T = ToeplitzMatrix(2, [a - 1j * b, 0.7, a + 1j * b])

    assert np.linalg.norm(dirac_commutator(T).dense(), 2) == pytest.approx(np.hypot(a, b))


def test_primitive_divides_coefficients():
    b = FRElement(2, [-1j, 0, 1j])

    B = primitive(b)

    assert_allclose(B.a, [1, 0, 1])
    assert_allclose(derivative_transpose(B).a, b.a)


def test_primitive_needs_zero_mean():
    with pytest.raises(InvalidInputError):
        primitive(FRElement(2, [0, 1, 0]))


def test_distance_to_itself_is_zero():
    s = pure_state([0.4])

    result = connes_distance(s, s)

    assert result.value == 0.0
    assert result.converged


def test_two_by_two_closed_form():
    w, v = np.array([0.3, -0.4]), np.array([-0.5, 0.2])

    result = connes_distance(_disc_state(w), _disc_state(v), gap=1e-6)

    assert result.converged
    assert result.value == pytest.approx(np.linalg.norm(w - v), abs=1e-6)
    assert result.lower <= result.value <= result.upper
    assert result.upper - result.lower <= 1e-6


def test_certificate_and_feasibility(rng):
    phi, psi = _random_state(rng, 3), _random_state(rng, 3)

    result = connes_distance(phi, psi, gap=1e-5)

    assert result.gap <= 1e-5
    assert result.optimizer.hermitian
    assert np.linalg.norm(dirac_commutator(result.optimizer).dense(), 2) <= 1 + 1e-9
    objective = np.dot((phi.density - psi.density).a, result.optimizer.t[::-1]).real
    assert objective == pytest.approx(result.lower, abs=1e-9)


def test_symmetry(rng):
    phi, psi = _random_state(rng, 3), _random_state(rng, 3)

    forward = connes_distance(phi, psi, gap=1e-5).value
    backward = connes_distance(psi, phi, gap=1e-5).value

    assert forward == pytest.approx(backward, abs=2e-5)


def test_triangle_inequality(rng):
    a, b, c = (_random_state(rng, 3) for _ in range(3))
    gap = 1e-5

    ab = connes_distance(a, b, gap=gap).value
    bc = connes_distance(b, c, gap=gap).value
    ac = connes_distance(a, c, gap=gap).value

    assert ac <= ab + bc + 2 * gap


@pytest.mark.parametrize("n", [2, 3, 4])
def test_connes_dominates_kantorovich(rng, n):
    for _ in range(2):
        phi, psi = _random_state(rng, n), _random_state(rng, n)

        connes, transport, dominates, _ = compare_distances(phi, psi, gap=1e-4, quad_tol=1e-8)

        assert dominates
        assert connes.upper >= transport - 1e-4 - 1e-8


def test_dual_route_matches_distance(rng):
    phi, psi = _random_state(rng, 2), _random_state(rng, 2)
    gap = 1e-5

    direct = connes_distance(phi, psi, gap=gap).value
    dual = dual_route_distance(phi, psi, gap=gap)

    assert dual == pytest.approx(direct, abs=5 * gap)


def test_dual_norm_of_zero():
    assert dual_norm(FRElement(3, np.zeros(5))).value == 0.0


def test_dual_norm_of_cosine():
    result = dual_norm(FRElement(2, [1, 0, 1]), gap=1e-6)

    assert result.value == pytest.approx(2.0, abs=1e-6)


def test_dual_norm_dominates_l1(rng):
    for _ in range(3):
        upper = rng.standard_normal(2) + 1j * rng.standard_normal(2)
        b = FRElement(3, np.concatenate([upper[::-1].conj(), [0.0], upper]))

        assert dual_norm(b, gap=1e-5).upper >= l1_norm(b) - 1e-9


def test_dual_norm_needs_selfadjoint():
    with pytest.raises(NotHermitianError):
        dual_norm(FRElement(2, [1j, 0, 1j]))


def test_l1_norm_examples():
    assert l1_norm(FRElement(2, [0.5, 1, 0.5])) == pytest.approx(1.0)
    assert l1_norm(FRElement(2, [1, 0, 1])) == pytest.approx(4 / np.pi)
    assert l1_norm(FRElement(2, [0, 3, 0])) == pytest.approx(3.0)


def test_cumulative_difference_vanishes_at_zero(rng):
    alpha = cumulative_difference(_random_state(rng, 4), _random_state(rng, 4))

    assert alpha.evaluate(0.0).real == pytest.approx(0.0, abs=1e-12)
    assert alpha.evaluate(2 * np.pi).real == pytest.approx(0.0, abs=1e-12)


def test_kantorovich_uniform_against_cosine():
    uniform = State(delta(2))
    bump = state_from_density(FRElement(2, [0.5, 1, 0.5]))

    assert kantorovich(uniform, bump) == pytest.approx(2 / np.pi, abs=1e-7)


def test_kantorovich_to_itself():
    assert kantorovich(trace_state(3), trace_state(3)) == 0.0


def test_kantorovich_is_rotation_invariant(rng):
    phi, psi = _random_state(rng, 3), _random_state(rng, 3)

    before = kantorovich(phi, psi)
    after = kantorovich(rotate_state(phi, 1.3), rotate_state(psi, 1.3))

    assert after == pytest.approx(before, abs=1e-6)


def _linprog_failing_after(calls_allowed):
    calls = []

    def fake(*args, **kwargs):
        calls.append(args)
        if len(calls) > calls_allowed:
            return SimpleNamespace(status=4, message="Numerical difficulties encountered", x=None, fun=None)
        return linprog(*args, **kwargs)
    return fake


def _failed_runs():
    return REGISTRY.get_sample_value(
        "toeplitz_solver_runs_total", {"program": "connes_distance", "status": "failed"}
    ) or 0.0


def test_failed_linear_program_keeps_the_bounds_so_far(rng, monkeypatch):
    phi, psi = _random_state(rng, 3), _random_state(rng, 3)
    reference = connes_distance(phi, psi, gap=1e-6)
    before = _failed_runs()
    monkeypatch.setattr("app.services.metric_service.linprog", _linprog_failing_after(1))

    result = connes_distance(phi, psi, gap=1e-12)

    assert not result.converged
    assert result.iterations == 2
    assert 0 < result.lower <= reference.upper + 1e-9
    assert result.upper >= reference.lower - 1e-9
    assert np.linalg.norm(dirac_commutator(result.optimizer).dense(), 2) <= 1 + 1e-9
    assert _failed_runs() == before + 1


def test_failed_first_linear_program_falls_back_to_the_box(rng, monkeypatch):
    phi, psi = _random_state(rng, 3), _random_state(rng, 3)
    reference = connes_distance(phi, psi, gap=1e-6)
    monkeypatch.setattr("app.services.metric_service.linprog", _linprog_failing_after(0))

    result = connes_distance(phi, psi)

    assert not result.converged
    assert result.lower == 0.0
    assert np.isfinite(result.upper)
    assert result.upper >= reference.lower
    assert not np.any(result.optimizer.t)
