import math

import numpy as np
import pytest

from clonebound.errors import DimensionMismatchError, InvalidEffectError
from clonebound.linalg import kron
from clonebound.metrics import (
    Angle,
    angle,
    angle_from_fidelity,
    check_triangle,
    fidelity,
    fidelity_product,
    measurement_deviation_bound,
    monotonicity_check,
)
from clonebound.sampling import random_effect, random_unitary
from clonebound.states import pure_state, validate

from conftest import random_state


class TestFidelity:
    def test_self_fidelity(self, rng):
        rho = random_state(rng, 3)
        assert fidelity(rho, rho) == pytest.approx(1.0, abs=1e-12)

    def test_pure_states_reduce_to_overlap(self, rng):
        for _ in range(10):
            u = rng.normal(size=2) + 1j * rng.normal(size=2)
            v = rng.normal(size=2) + 1j * rng.normal(size=2)
            u /= np.linalg.norm(u)
            v /= np.linalg.norm(v)
            expected = abs(np.vdot(u, v)) ** 2
            assert fidelity(pure_state(u), pure_state(v)) == pytest.approx(
                expected, abs=1e-12
            )

    def test_mixed_vs_pure_hand_value(self):
        # sqrt(chi) omega sqrt(chi) = diag(1/2, 0) -> F = 1/2
        half = validate(np.eye(2) / 2)
        assert fidelity(half, pure_state([1, 0])) == pytest.approx(0.5, abs=1e-12)

    def test_symmetry(self, rng):
        for _ in range(20):
            a, b = random_state(rng, 3), random_state(rng, 3)
            assert abs(fidelity(a, b) - fidelity(b, a)) <= 1e-9

    def test_unitary_invariance(self, rng):
        for _ in range(20):
            a, b = random_state(rng, 3), random_state(rng, 3)
            u = random_unitary(rng, 3)
            ua = validate(u @ a.matrix @ u.conj().T)
            ub = validate(u @ b.matrix @ u.conj().T)
            assert abs(fidelity(a, b) - fidelity(ua, ub)) <= 1e-8

    def test_dimension_mismatch(self, rng):
        with pytest.raises(DimensionMismatchError):
            fidelity(random_state(rng, 2), random_state(rng, 3))


class TestAngle:
    def test_identical_states(self, rng):
        rho = random_state(rng, 2)
        assert angle(rho, rho).radians == pytest.approx(0.0, abs=1e-7)

    def test_orthogonal_pure_states(self):
        a = angle(pure_state([1, 0]), pure_state([0, 1]))
        assert a.radians == pytest.approx(math.pi / 2, abs=1e-12)

    def test_half_fidelity(self):
        assert angle_from_fidelity(0.5).radians == pytest.approx(math.pi / 4, abs=1e-12)

    def test_clamps_round_off(self):
        assert angle_from_fidelity(1.0 + 1e-15).radians == 0.0
        assert angle_from_fidelity(-1e-15).radians == pytest.approx(math.pi / 2)

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            Angle(-0.1)


class TestTriangle:
    def test_coincident_states(self, rng):
        rho = random_state(rng, 2)
        assert check_triangle(rho, rho, rho) == pytest.approx(0.0, abs=1e-6)

    def test_two_equal_arguments(self, rng):
        chi = random_state(rng, 2)
        rho = random_state(rng, 2)
        residual = check_triangle(chi, chi, rho)
        assert residual == pytest.approx(2 * angle(chi, rho).radians, abs=1e-6)
        assert residual >= -1e-8

    @pytest.mark.parametrize("dim", [2, 3])
    def test_randomized_sweep(self, rng, dim):
        worst = math.inf
        for _ in range(500):
            a, b, c = (random_state(rng, dim) for _ in range(3))
            worst = min(worst, check_triangle(a, b, c))
        assert worst >= -1e-8


class TestMeasurementBound:
    def test_identical_states(self, rng):
        rho = random_state(rng, 2)
        lhs, rhs = measurement_deviation_bound(rho, rho, np.eye(2) / 2)
        assert lhs == pytest.approx(0.0, abs=1e-12)
        assert rhs == pytest.approx(0.0, abs=1e-6)

    def test_orthogonal_states_saturate(self):
        lhs, rhs = measurement_deviation_bound(
            pure_state([1, 0]), pure_state([0, 1]), np.diag([1.0, 0.0])
        )
        assert lhs == pytest.approx(1.0, abs=1e-12)
        assert rhs == pytest.approx(1.0, abs=1e-12)

    def test_randomized_sweep(self, rng):
        for _ in range(500):
            chi, omega = random_state(rng, 2), random_state(rng, 2)
            effect = random_effect(rng, 2)
            lhs, rhs = measurement_deviation_bound(chi, omega, effect)
            assert lhs <= rhs + 1e-8

    def test_rejects_non_hermitian_effect(self, rng):
        with pytest.raises(InvalidEffectError):
            measurement_deviation_bound(
                random_state(rng, 2), random_state(rng, 2), np.array([[0, 1], [0, 0]])
            )

    def test_rejects_out_of_range_spectrum(self, rng):
        with pytest.raises(InvalidEffectError):
            measurement_deviation_bound(
                random_state(rng, 2), random_state(rng, 2), 2.0 * np.eye(2)
            )


class TestFidelityProduct:
    def test_single_pair(self, rng):
        a, b = random_state(rng, 2), random_state(rng, 2)
        assert fidelity_product([(a, b)]) == pytest.approx(fidelity(a, b), abs=1e-12)

    def test_unit_factor(self, rng):
        a, b = random_state(rng, 2), random_state(rng, 2)
        before = fidelity_product([(a, b)])
        with_unit = fidelity_product([(a, b), (a, a)])
        assert with_unit == pytest.approx(before, abs=1e-9)

    def test_matches_tensor_fidelity(self, rng):
        # direct 4x4 computation is the oracle
        for _ in range(20):
            a, c = random_state(rng, 2), random_state(rng, 2)
            b, d = random_state(rng, 2), random_state(rng, 2)
            product = fidelity_product([(a, c), (b, d)])
            direct = fidelity(
                validate(kron(a.matrix, b.matrix)), validate(kron(c.matrix, d.matrix))
            )
            assert product == pytest.approx(direct, abs=1e-7)


class TestMonotonicity:
    def test_product_state_equality(self, rng):
        r1, r2 = random_state(rng, 2), random_state(rng, 2)
        sigma = random_state(rng, 2)
        chi = validate(kron(r1.matrix, sigma.matrix))
        omega = validate(kron(r2.matrix, sigma.matrix))
        before, after = monotonicity_check(chi, omega, [2, 2], keep=(0,))
        assert after == pytest.approx(fidelity(r1, r2), abs=1e-9)
        assert before == pytest.approx(after, abs=1e-9)

    def test_trace_to_trivial_subsystem(self, rng):
        # keeping a one-dimensional factor discards everything: fidelity 1
        chi = random_state(rng, 2)
        omega = random_state(rng, 2)
        chi_ext = validate(kron(chi.matrix, np.eye(1)))
        _, after = monotonicity_check(chi_ext, validate(kron(omega.matrix, np.eye(1))), [2, 1], keep=(1,))
        assert after == pytest.approx(1.0, abs=1e-12)

    def test_randomized_sweep(self, rng):
        for _ in range(300):
            chi = random_state(rng, 4)
            omega = random_state(rng, 4)
            before, after = monotonicity_check(chi, omega, [2, 2], keep=(0,))
            assert after >= before - 1e-8
