"""Dense complex linear algebra on small operators.

Everything works on plain numpy arrays with complex128 entries in
row-major order.  Operators stay small here (dimension <= ~64), so all
routines take the dense LAPACK path; there is no sparse storage.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import prod

import numpy as np

from .errors import (
    DimensionMismatchError,
    NonSquareError,
    NotHermitianError,
    NotPSDError,
)

HERMITIAN_RTOL = 1e-9
# Round-off on trace-1 operators of dimension <= 64 stays well inside this.
EIGENVALUE_FLOOR = -1e-10


def as_complex_matrix(matrix) -> np.ndarray:
    out = np.array(matrix, dtype=np.complex128, copy=True)
    if out.ndim != 2:
        raise NonSquareError(f"expected a 2-d array, got shape {out.shape}")
    return out


def frobenius_norm(matrix) -> float:
    return float(np.linalg.norm(matrix))


def require_square(matrix: np.ndarray) -> None:
    if matrix.shape[0] != matrix.shape[1]:
        raise NonSquareError(f"matrix is {matrix.shape[0]}x{matrix.shape[1]}")


def hermiticity_residual(matrix: np.ndarray) -> float:
    """Relative Frobenius distance to the Hermitian part, ||A - A^dag||/max(1, ||A||)."""
    return frobenius_norm(matrix - matrix.conj().T) / max(1.0, frobenius_norm(matrix))


def require_hermitian(matrix: np.ndarray, rtol: float = HERMITIAN_RTOL) -> None:
    require_square(matrix)
    residual = hermiticity_residual(matrix)
    if residual > rtol:
        raise NotHermitianError(
            f"Hermiticity residual {residual:.3e} exceeds tolerance {rtol:.1e}"
        )


@dataclass(frozen=True)
class HermitianEig:
    """Eigendecomposition of a Hermitian operator.

    Eigenvalues are real and sorted descending; eigenvectors are the
    matching orthonormal columns.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def eig_hermitian(matrix) -> HermitianEig:
    """Eigendecomposition of a Hermitian matrix, eigenvalues descending.

    Raises NotHermitianError / NonSquareError when the input violates its
    preconditions.  The input is symmetrized before the LAPACK call so the
    tolerated Hermiticity dust cannot leak into the spectrum.
    """
    a = as_complex_matrix(matrix)
    require_hermitian(a)
    values, vectors = np.linalg.eigh(0.5 * (a + a.conj().T))
    return HermitianEig(
        eigenvalues=np.ascontiguousarray(values[::-1]),
        eigenvectors=np.ascontiguousarray(vectors[:, ::-1]),
    )


def sqrt_psd(matrix) -> np.ndarray:
    """Hermitian square root of a positive-semidefinite matrix.

    Eigenvalue dust in [EIGENVALUE_FLOOR, 0) is clamped to zero before
    rooting; anything below the floor raises NotPSDError.  Positive dust
    below 1e-14 of the largest eigenvalue is zeroed too: rooting it would
    inject sqrt(eps)-sized spurious directions, while zeroing moves the
    reconstruction by at most 1e-14 of the scale.
    """
    eig = eig_hermitian(matrix)
    smallest = float(eig.eigenvalues[-1])
    if smallest < EIGENVALUE_FLOOR:
        raise NotPSDError(
            f"smallest eigenvalue {smallest:.3e} is below the floor {EIGENVALUE_FLOOR:.1e}"
        )
    values = np.clip(eig.eigenvalues, 0.0, None)
    dust = 1e-14 * float(values[0])
    values[values < dust] = 0.0
    v = eig.eigenvectors
    root = (v * np.sqrt(values)) @ v.conj().T
    return 0.5 * (root + root.conj().T)


def kron(a, b) -> np.ndarray:
    """Kronecker product with the left factor on the slow (outer) index."""
    return np.kron(as_complex_matrix(a), as_complex_matrix(b))


def tensor_power(matrix, count: int) -> np.ndarray:
    """count-fold Kronecker power; count = 0 gives the 1x1 identity."""
    if count < 0:
        raise DimensionMismatchError(f"tensor power needs count >= 0, got {count}")
    out = np.eye(1, dtype=np.complex128)
    base = as_complex_matrix(matrix)
    for _ in range(count):
        out = np.kron(out, base)
    return out


def partial_trace(matrix, dims, keep) -> np.ndarray:
    """Trace out every subsystem not listed in ``keep``.

    ``dims`` lists the subsystem dimensions left to right, matching the
    Kronecker order of the input; ``keep`` holds 0-based subsystem
    indices.  The result keeps the surviving subsystems in their original
    order and preserves the trace.
    """
    a = as_complex_matrix(matrix)
    require_square(a)
    dims = [int(d) for d in dims]
    if any(d < 1 for d in dims):
        raise DimensionMismatchError(f"subsystem dimensions must be >= 1, got {dims}")
    total = prod(dims)
    if a.shape[0] != total:
        raise DimensionMismatchError(
            f"matrix dimension {a.shape[0]} != product of subsystem dims {total}"
        )
    n = len(dims)
    kept = sorted(set(int(i) for i in keep))
    if not kept:
        raise DimensionMismatchError("keep must name at least one subsystem")
    if kept[0] < 0 or kept[-1] >= n:
        raise DimensionMismatchError(f"keep indices {kept} outside range 0..{n - 1}")

    keep_set = set(kept)
    tensor = a.reshape(dims + dims)
    row_labels = list(range(n))
    col_labels = [n + i if i in keep_set else i for i in range(n)]
    out_labels = [i for i in kept] + [n + i for i in kept]
    reduced = np.einsum(tensor, row_labels + col_labels, out_labels)
    kept_dim = prod(dims[i] for i in kept)
    return reduced.reshape(kept_dim, kept_dim)
