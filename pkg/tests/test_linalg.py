import itertools
from math import prod

import numpy as np
import pytest

from clonebound.errors import DimensionMismatchError, NonSquareError, NotHermitianError, NotPSDError
from clonebound.linalg import (
    eig_hermitian,
    kron,
    partial_trace,
    sqrt_psd,
    tensor_power,
)
from clonebound.sampling import random_hermitian

from conftest import random_state


def ptrace_loops(mat, dims, keep):
    """Brute-force index contraction, independent of the library path."""
    n = len(dims)
    keep = sorted(keep)
    traced = [i for i in range(n) if i not in keep]
    kept_dims = [dims[i] for i in keep]
    out = np.zeros((prod(kept_dims), prod(kept_dims)), dtype=complex)

    def flat(idx):
        f = 0
        for i in range(n):
            f = f * dims[i] + idx[i]
        return f

    def flat_kept(idx):
        f = 0
        for d, v in zip(kept_dims, idx):
            f = f * d + v
        return f

    for rk in itertools.product(*[range(d) for d in kept_dims]):
        for ck in itertools.product(*[range(d) for d in kept_dims]):
            acc = 0.0 + 0.0j
            for tr in itertools.product(*[range(dims[i]) for i in traced]):
                row = [0] * n
                col = [0] * n
                for pos, i in enumerate(keep):
                    row[i] = rk[pos]
                    col[i] = ck[pos]
                for pos, i in enumerate(traced):
                    row[i] = tr[pos]
                    col[i] = tr[pos]
                acc += mat[flat(row), flat(col)]
            out[flat_kept(rk), flat_kept(ck)] = acc
    return out


class TestEig:
    def test_identity(self):
        eig = eig_hermitian(np.eye(2))
        np.testing.assert_allclose(eig.eigenvalues, [1.0, 1.0])

    def test_diagonal(self):
        eig = eig_hermitian(np.diag([3.0, 1.0]))
        np.testing.assert_allclose(eig.eigenvalues, [3.0, 1.0])
        # eigenvectors are the standard basis up to phase
        np.testing.assert_allclose(np.abs(eig.eigenvectors), np.eye(2), atol=1e-12)

    def test_pauli_x(self):
        # hand eigendecomposition: eigenvalues +-1, eigenvectors (1, +-1)/sqrt(2)
        x = np.array([[0.0, 1.0], [1.0, 0.0]])
        eig = eig_hermitian(x)
        np.testing.assert_allclose(eig.eigenvalues, [1.0, -1.0], atol=1e-12)
        np.testing.assert_allclose(eig.reconstruct(), x, atol=1e-12)

    @pytest.mark.parametrize("dim", [2, 3, 5, 8, 16])
    def test_reconstruction_and_orthonormality(self, rng, dim):
        for _ in range(20):
            a = random_hermitian(rng, dim)
            eig = eig_hermitian(a)
            scale = max(1.0, np.linalg.norm(a))
            assert np.linalg.norm(eig.reconstruct() - a) <= 1e-10 * scale
            v = eig.eigenvectors
            assert np.linalg.norm(v.conj().T @ v - np.eye(dim)) <= 1e-10
            assert np.all(np.diff(eig.eigenvalues) <= 1e-12)

    def test_rejects_non_square(self):
        with pytest.raises(NonSquareError):
            eig_hermitian(np.ones((2, 3)))

    def test_rejects_non_hermitian(self):
        with pytest.raises(NotHermitianError):
            eig_hermitian(np.array([[0.0, 1.0], [0.0, 0.0]]))


class TestSqrtPsd:
    def test_identity(self):
        np.testing.assert_allclose(sqrt_psd(np.eye(3)), np.eye(3), atol=1e-12)

    def test_diagonal(self):
        np.testing.assert_allclose(
            sqrt_psd(np.diag([4.0, 9.0])), np.diag([2.0, 3.0]), atol=1e-12
        )

    def test_known_eigendecomposition(self, rng):
        # build A from a known eigensystem; its unique PSD root is known too
        for dim in (2, 3, 4):
            h = random_hermitian(rng, dim)
            v = np.linalg.eigh(h)[1]
            lam = np.sort(rng.uniform(0.1, 2.0, size=dim))[::-1]
            a = (v * lam) @ v.conj().T
            expected = (v * np.sqrt(lam)) @ v.conj().T
            np.testing.assert_allclose(sqrt_psd(a), expected, atol=1e-10)

    @pytest.mark.parametrize("dim", [2, 4, 8])
    def test_square_recovers_input(self, rng, dim):
        for _ in range(20):
            rho = random_state(rng, dim).matrix
            root = sqrt_psd(rho)
            scale = max(1.0, np.linalg.norm(rho))
            assert np.linalg.norm(root @ root - rho) <= 1e-8 * scale

    def test_clamps_round_off_dust(self):
        a = np.diag([1.0, -5e-11])
        root = sqrt_psd(a)
        np.testing.assert_allclose(root, np.diag([1.0, 0.0]), atol=1e-5)

    def test_rejects_indefinite(self):
        with pytest.raises(NotPSDError):
            sqrt_psd(np.diag([1.0, -1.0]))


class TestKron:
    def test_identity(self):
        np.testing.assert_allclose(kron(np.eye(2), np.eye(2)), np.eye(4))

    def test_projectors(self):
        np.testing.assert_allclose(
            kron(np.diag([1.0, 0.0]), np.diag([1.0, 0.0])),
            np.diag([1.0, 0.0, 0.0, 0.0]),
        )

    def test_trace_multiplicative(self, rng):
        for _ in range(20):
            a = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
            b = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
            assert np.isclose(np.trace(kron(a, b)), np.trace(a) * np.trace(b))

    def test_associative(self, rng):
        a = rng.normal(size=(2, 2))
        b = rng.normal(size=(3, 3))
        c = rng.normal(size=(2, 2))
        np.testing.assert_allclose(kron(kron(a, b), c), kron(a, kron(b, c)))

    def test_tensor_power(self, rng):
        rho = random_state(rng, 2).matrix
        np.testing.assert_allclose(tensor_power(rho, 2), kron(rho, rho))
        np.testing.assert_allclose(tensor_power(rho, 0), np.eye(1))


class TestPartialTrace:
    def test_product_state(self, rng):
        rho = random_state(rng, 2).matrix
        sigma = random_state(rng, 3).matrix
        reduced = partial_trace(kron(rho, sigma), [2, 3], keep=(0,))
        np.testing.assert_allclose(reduced, rho, atol=1e-12)
        reduced2 = partial_trace(kron(rho, sigma), [2, 3], keep=(1,))
        np.testing.assert_allclose(reduced2, sigma, atol=1e-12)

    def test_bell_state(self):
        bell = np.zeros(4, dtype=complex)
        bell[0] = bell[3] = 1 / np.sqrt(2)
        proj = np.outer(bell, bell.conj())
        np.testing.assert_allclose(
            partial_trace(proj, [2, 2], keep=(0,)), np.eye(2) / 2, atol=1e-12
        )

    def test_three_party_against_loops(self, rng):
        dims = [2, 3, 2]
        rho = random_state(rng, prod(dims)).matrix
        for keep in [(0,), (1,), (2,), (0, 2), (0, 1), (1, 2)]:
            np.testing.assert_allclose(
                partial_trace(rho, dims, keep),
                ptrace_loops(rho, dims, keep),
                atol=1e-12,
            )

    def test_trace_preserved(self, rng):
        rho = random_state(rng, 8).matrix
        reduced = partial_trace(rho, [2, 2, 2], keep=(1,))
        assert np.isclose(np.trace(reduced), np.trace(rho))

    def test_two_steps_equal_one(self, rng):
        dims = [2, 2, 3]
        rho = random_state(rng, prod(dims)).matrix
        one_step = partial_trace(rho, dims, keep=(0,))
        two_step = partial_trace(
            partial_trace(rho, dims, keep=(0, 2)), [2, 3], keep=(0,)
        )
        np.testing.assert_allclose(one_step, two_step, atol=1e-12)

    def test_keep_all_is_identity(self, rng):
        rho = random_state(rng, 4).matrix
        np.testing.assert_allclose(partial_trace(rho, [2, 2], keep=(0, 1)), rho)

    def test_tracing_everything_leaves_scalar_trace(self, rng):
        # keeping only a trivial one-dimensional factor discards all content
        rho = random_state(rng, 4).matrix
        scalar = partial_trace(rho, [2, 2, 1], keep=(2,))
        assert scalar.shape == (1, 1)
        assert np.isclose(scalar[0, 0], np.trace(rho))

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            partial_trace(np.eye(4), [2, 3], keep=(0,))
        with pytest.raises(DimensionMismatchError):
            partial_trace(np.eye(4), [2, 2], keep=())
        with pytest.raises(DimensionMismatchError):
            partial_trace(np.eye(4), [2, 2], keep=(2,))
