import numpy as np
import pytest

from clonebound.errors import (
    DegenerateFidelityError,
    DimensionMismatchError,
    NotHermitianError,
    NotPSDError,
    RangeError,
    TraceNotOneError,
)
from clonebound.linalg import partial_trace
from clonebound.metrics import fidelity
from clonebound.states import (
    CloningProblem,
    Ensemble,
    optimal_purification_pair,
    pure_state,
    purify,
    sufficient_ancilla,
    validate,
)

from conftest import random_state


class TestValidate:
    def test_accepts_maximally_mixed(self):
        state = validate(np.eye(2) / 2)
        assert state.dim == 2

    def test_rejects_negative_eigenvalue(self):
        with pytest.raises(NotPSDError):
            validate(np.diag([1.2, -0.2]))

    def test_rejects_wrong_trace(self):
        with pytest.raises(TraceNotOneError):
            validate(np.diag([0.6, 0.6]))

    def test_rejects_non_hermitian(self):
        with pytest.raises(NotHermitianError):
            validate(np.array([[0.5, 0.5], [0.0, 0.5]]))

    def test_error_reports_residual(self):
        with pytest.raises(TraceNotOneError, match="trace"):
            validate(np.diag([0.6, 0.6]))

    def test_matrix_is_read_only(self):
        state = validate(np.eye(2) / 2)
        with pytest.raises(ValueError):
            state.matrix[0, 0] = 9.0


class TestEnsemble:
    def test_priors_must_sum_to_one(self, rng):
        states = (random_state(rng, 2), random_state(rng, 2))
        with pytest.raises(RangeError):
            Ensemble(states, np.array([0.6, 0.6]))

    def test_rejects_negative_prior(self, rng):
        states = (random_state(rng, 2), random_state(rng, 2))
        with pytest.raises(RangeError):
            Ensemble(states, np.array([1.4, -0.4]))

    def test_rejects_mixed_dimensions(self, rng):
        with pytest.raises(DimensionMismatchError):
            Ensemble((random_state(rng, 2), random_state(rng, 3)), np.array([0.5, 0.5]))


class TestCloningProblem:
    def test_requires_more_copies_out(self, rng):
        ens = Ensemble((random_state(rng, 2), random_state(rng, 2)), np.array([0.5, 0.5]))
        with pytest.raises(RangeError):
            CloningProblem(ens, 2, 2)

    def test_infers_ancilla_env_dim(self, rng):
        ens = Ensemble((random_state(rng, 2), random_state(rng, 2)), np.array([0.5, 0.5]))
        anc = Ensemble((random_state(rng, 6), random_state(rng, 6)), np.array([0.5, 0.5]))
        problem = CloningProblem(ens, 1, 2, anc)
        assert problem.ancilla_env_dim == 3

    def test_rejects_incompatible_ancilla(self, rng):
        ens = Ensemble((random_state(rng, 2), random_state(rng, 2)), np.array([0.5, 0.5]))
        anc = Ensemble((random_state(rng, 3), random_state(rng, 3)), np.array([0.5, 0.5]))
        with pytest.raises(DimensionMismatchError):
            CloningProblem(ens, 1, 2, anc)


class TestPurify:
    def test_pure_state_round_trip(self):
        zero = pure_state([1.0, 0.0])
        p = purify(zero)
        np.testing.assert_allclose(p.reduced_state().matrix, zero.matrix, atol=1e-12)
        # environment factor of a pure state stays in the first basis state
        env = partial_trace(p.projector(), [2, 2], keep=(1,))
        np.testing.assert_allclose(env, np.diag([1.0, 0.0]), atol=1e-12)

    def test_maximally_mixed_gives_maximal_entanglement(self):
        p = purify(validate(np.eye(2) / 2))
        np.testing.assert_allclose(p.reduced_state().matrix, np.eye(2) / 2, atol=1e-12)
        env = partial_trace(p.projector(), [2, 2], keep=(1,))
        np.testing.assert_allclose(env, np.eye(2) / 2, atol=1e-12)

    @pytest.mark.parametrize("dim", [2, 3, 4])
    def test_round_trip_random(self, rng, dim):
        for _ in range(10):
            rho = random_state(rng, dim)
            p = purify(rho)
            assert p.env_dim == dim
            np.testing.assert_allclose(p.reduced_state().matrix, rho.matrix, atol=1e-9)


class TestOptimalPurificationPair:
    def test_identical_states_full_overlap(self, rng):
        rho = random_state(rng, 3)
        px, py = optimal_purification_pair(rho, rho)
        assert abs(np.vdot(px.vector, py.vector)) ** 2 == pytest.approx(1.0, abs=1e-12)

    def test_orthogonal_pure_states(self):
        px, py = optimal_purification_pair(pure_state([1, 0]), pure_state([0, 1]))
        assert abs(np.vdot(px.vector, py.vector)) ** 2 == pytest.approx(0.0, abs=1e-12)

    @pytest.mark.parametrize("dim", [2, 3, 4])
    def test_overlap_equals_fidelity(self, rng, dim):
        for _ in range(20):
            chi = random_state(rng, dim)
            omega = random_state(rng, dim)
            px, py = optimal_purification_pair(chi, omega)
            overlap = abs(np.vdot(px.vector, py.vector)) ** 2
            assert overlap == pytest.approx(fidelity(chi, omega), abs=1e-6)
            # both vectors purify their own state
            np.testing.assert_allclose(px.reduced_state().matrix, chi.matrix, atol=1e-9)
            np.testing.assert_allclose(py.reduced_state().matrix, omega.matrix, atol=1e-9)

    def test_dimension_mismatch(self, rng):
        with pytest.raises(DimensionMismatchError):
            optimal_purification_pair(random_state(rng, 2), random_state(rng, 3))


class TestSufficientAncilla:
    def test_full_overlap_target(self, rng):
        chi, omega = random_state(rng, 2), random_state(rng, 2)
        f = fidelity(chi, omega)
        pair = sufficient_ancilla(chi, omega, f)
        assert fidelity(pair.first, pair.second) == pytest.approx(f, abs=1e-6)

    def test_zero_target(self, rng):
        chi, omega = random_state(rng, 2), random_state(rng, 2)
        pair = sufficient_ancilla(chi, omega, 0.0)
        assert fidelity(pair.first, pair.second) == pytest.approx(0.0, abs=1e-6)

    def test_intermediate_target_postconditions(self, rng):
        for _ in range(5):
            chi, omega = random_state(rng, 2), random_state(rng, 2)
            r = fidelity(chi, omega) / 2
            pair = sufficient_ancilla(chi, omega, r)
            d, env, flag = pair.layout
            assert (d, flag) == (2, 2)
            np.testing.assert_allclose(
                partial_trace(pair.first.matrix, [d, env, flag], keep=(0,)),
                chi.matrix,
                atol=1e-9,
            )
            np.testing.assert_allclose(
                partial_trace(pair.second.matrix, [d, env, flag], keep=(0,)),
                omega.matrix,
                atol=1e-9,
            )
            assert fidelity(pair.first, pair.second) == pytest.approx(r, abs=1e-6)
            # outputs are pure
            for state in (pair.first, pair.second):
                top = float(np.linalg.eigvalsh(state.matrix)[-1])
                assert abs(top - 1.0) <= 1e-9

    def test_rejects_unreachable_target(self, rng):
        chi, omega = random_state(rng, 2), random_state(rng, 2)
        with pytest.raises(RangeError):
            sufficient_ancilla(chi, omega, fidelity(chi, omega) + 1e-3)

    def test_orthogonal_states_cannot_overlap(self):
        with pytest.raises(DegenerateFidelityError):
            sufficient_ancilla(pure_state([1, 0]), pure_state([0, 1]), 0.5)

    def test_orthogonal_states_zero_target_ok(self):
        pair = sufficient_ancilla(pure_state([1, 0]), pure_state([0, 1]), 0.0)
        assert fidelity(pair.first, pair.second) == pytest.approx(0.0, abs=1e-9)

    def test_rejects_negative_target(self, rng):
        with pytest.raises(RangeError):
            sufficient_ancilla(random_state(rng, 2), random_state(rng, 2), -0.5)

    def test_clone_blocks_are_recovered(self, rng):
        # M-copy blocks as reductions: the regime where the pairwise
        # restriction fails and perfect copying becomes possible
        chi = random_state(rng, 2).power(2)
        omega = random_state(rng, 2).power(2)
        chi = validate(chi.matrix)
        omega = validate(omega.matrix)
        r = fidelity(chi, omega)
        pair = sufficient_ancilla(chi, omega, r)
        d, env, flag = pair.layout
        np.testing.assert_allclose(
            partial_trace(pair.first.matrix, [d, env, flag], keep=(0,)),
            chi.matrix,
            atol=1e-9,
        )
        np.testing.assert_allclose(
            partial_trace(pair.second.matrix, [d, env, flag], keep=(0,)),
            omega.matrix,
            atol=1e-9,
        )
