"""Density matrices, ensembles, copying problems, and purifications."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from .errors import (
    DegenerateFidelityError,
    DimensionMismatchError,
    NotPSDError,
    RangeError,
    TraceNotOneError,
)
from .linalg import (
    EIGENVALUE_FLOOR,
    as_complex_matrix,
    eig_hermitian,
    partial_trace,
    require_hermitian,
    sqrt_psd,
    tensor_power,
)

TRACE_TOL = 1e-9
PRIOR_SUM_TOL = 1e-12


def _readonly(array: np.ndarray) -> np.ndarray:
    array.flags.writeable = False
    return array


@dataclass(frozen=True)
class DensityMatrix:
    """A validated quantum state: Hermitian, PSD, unit trace.

    Construct through :func:`validate`; the wrapped array is read-only.
    """

    matrix: np.ndarray

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def power(self, count: int) -> "DensityMatrix":
        """count-fold tensor copy of this state."""
        return DensityMatrix(_readonly(tensor_power(self.matrix, count)))


def validate(matrix) -> DensityMatrix:
    """Check the density-matrix invariants and wrap the array.

    Raises NotHermitianError, NotPSDError or TraceNotOneError naming the
    violated invariant together with the measured residual.
    """
    a = as_complex_matrix(matrix)
    require_hermitian(a)
    smallest = float(eig_hermitian(a).eigenvalues[-1])
    if smallest < EIGENVALUE_FLOOR:
        raise NotPSDError(
            f"smallest eigenvalue {smallest:.3e} is below the floor {EIGENVALUE_FLOOR:.1e}"
        )
    trace_residual = abs(complex(np.trace(a)) - 1.0)
    if trace_residual > TRACE_TOL:
        raise TraceNotOneError(
            f"|trace - 1| = {trace_residual:.3e} exceeds tolerance {TRACE_TOL:.1e}"
        )
    return DensityMatrix(_readonly(a))


def pure_state(vector) -> DensityMatrix:
    """Projector onto a (normalized copy of a) state vector."""
    v = np.asarray(vector, dtype=np.complex128).reshape(-1)
    norm = np.linalg.norm(v)
    if norm == 0.0:
        raise RangeError("cannot normalize the zero vector")
    v = v / norm
    return DensityMatrix(_readonly(np.outer(v, v.conj())))


@dataclass(frozen=True)
class Ensemble:
    """States with prior probabilities, all on one space."""

    states: tuple[DensityMatrix, ...]
    priors: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "states", tuple(self.states))
        priors = np.asarray(self.priors, dtype=float).reshape(-1)
        object.__setattr__(self, "priors", _readonly(priors))
        if len(self.states) < 1:
            raise RangeError("ensemble needs at least one state")
        if len(self.states) != priors.size:
            raise DimensionMismatchError(
                f"{len(self.states)} states but {priors.size} priors"
            )
        dims = {s.dim for s in self.states}
        if len(dims) != 1:
            raise DimensionMismatchError(f"states on mixed dimensions {sorted(dims)}")
        if float(priors.min()) < -1e-15:
            raise RangeError(f"negative prior {priors.min():.3e}")
        total = float(priors.sum())
        if abs(total - 1.0) > PRIOR_SUM_TOL:
            raise RangeError(
                f"priors sum to {total!r}, off by {abs(total - 1.0):.3e} (> {PRIOR_SUM_TOL:.0e})"
            )

    @property
    def n(self) -> int:
        return len(self.states)

    @property
    def dim(self) -> int:
        return self.states[0].dim


@dataclass(frozen=True)
class CloningProblem:
    """An N -> L copying task for a finite state set.

    ``ancilla_ensemble`` optionally carries label-dependent ancilla states
    living on extra-register (x) environment space; absent means every
    label shares one ancilla state (no prior information).  Ancilla states
    are ordered extra register first, environment second, with dimension
    d**M * ancilla_env_dim.
    """

    input_ensemble: Ensemble
    copies_in: int
    copies_out: int
    ancilla_ensemble: Optional[Ensemble] = None
    ancilla_env_dim: Optional[int] = None

    def __post_init__(self):
        if self.copies_in < 1:
            raise RangeError(f"copies_in must be >= 1, got {self.copies_in}")
        if self.copies_out <= self.copies_in:
            raise RangeError(
                f"copies_out must exceed copies_in, got {self.copies_out} <= {self.copies_in}"
            )
        if self.ancilla_ensemble is not None:
            if self.ancilla_ensemble.n != self.input_ensemble.n:
                raise DimensionMismatchError(
                    f"{self.ancilla_ensemble.n} ancilla states for "
                    f"{self.input_ensemble.n} input labels"
                )
            block = self.dim ** self.extra_copies
            anc_dim = self.ancilla_ensemble.dim
            env = self.ancilla_env_dim
            if env is None:
                if anc_dim % block != 0:
                    raise DimensionMismatchError(
                        f"ancilla dimension {anc_dim} is not a multiple of the "
                        f"extra-register dimension {block}"
                    )
                env = anc_dim // block
                object.__setattr__(self, "ancilla_env_dim", env)
            elif block * env != anc_dim:
                raise DimensionMismatchError(
                    f"ancilla dimension {anc_dim} != extra register {block} x environment {env}"
                )

    @property
    def n_states(self) -> int:
        return self.input_ensemble.n

    @property
    def dim(self) -> int:
        return self.input_ensemble.dim

    @property
    def extra_copies(self) -> int:
        return self.copies_out - self.copies_in


@dataclass(frozen=True)
class Purification:
    """A pure vector on base (x) environment space whose reduction is a given state."""

    base_dim: int
    env_dim: int
    vector: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.vector, dtype=np.complex128).reshape(-1)
        if v.size != self.base_dim * self.env_dim:
            raise DimensionMismatchError(
                f"vector length {v.size} != {self.base_dim} x {self.env_dim}"
            )
        norm = float(np.linalg.norm(v))
        if abs(norm - 1.0) > 1e-10:
            raise RangeError(f"|norm - 1| = {abs(norm - 1.0):.3e} exceeds 1e-10")
        object.__setattr__(self, "vector", _readonly(v))

    def projector(self) -> np.ndarray:
        return np.outer(self.vector, self.vector.conj())

    def reduced_state(self) -> DensityMatrix:
        """Trace out the environment factor."""
        reduced = partial_trace(self.projector(), [self.base_dim, self.env_dim], (0,))
        return validate(reduced)


def purify(state: DensityMatrix) -> Purification:
    """Canonical purification with environment dimension equal to the base.

    Uses the eigenbasis ordered by descending eigenvalue, so the output is
    deterministic; zero eigenvalues contribute zero components.
    """
    eig = eig_hermitian(state.matrix)
    amplitudes = np.sqrt(np.clip(eig.eigenvalues, 0.0, None))
    # component on |i> (x) |k> is sqrt(lambda_k) * v_k[i]
    mat = eig.eigenvectors * amplitudes
    vec = mat.reshape(-1)
    vec = vec / np.linalg.norm(vec)
    return Purification(base_dim=state.dim, env_dim=state.dim, vector=vec)


def optimal_purification_pair(
    chi: DensityMatrix, omega: DensityMatrix
) -> tuple[Purification, Purification]:
    """Purifications of chi and omega whose squared overlap is the fidelity.

    The first vector is the canonical purification of chi; the second is a
    purification of omega rotated on the environment by the unitary factor
    of the polar decomposition of sqrt(chi) sqrt(omega), which maximizes
    the overlap.  The overlap comes out real and nonnegative.
    """
    if chi.dim != omega.dim:
        raise DimensionMismatchError(f"dimensions differ: {chi.dim} vs {omega.dim}")
    root_chi = sqrt_psd(chi.matrix)
    root_omega = sqrt_psd(omega.matrix)
    cross = root_chi @ root_omega
    left, _, right_h = np.linalg.svd(cross)
    align = (left @ right_h).conj().T
    x_mat = root_chi
    y_mat = root_omega @ align
    x_vec = x_mat.reshape(-1)
    y_vec = y_mat.reshape(-1)
    x_vec = x_vec / np.linalg.norm(x_vec)
    y_vec = y_vec / np.linalg.norm(y_vec)
    d = chi.dim
    return (
        Purification(base_dim=d, env_dim=d, vector=x_vec),
        Purification(base_dim=d, env_dim=d, vector=y_vec),
    )


class SufficientAncilla(NamedTuple):
    """Pure ancilla pair with prescribed mutual fidelity and given reductions."""

    first: DensityMatrix
    second: DensityMatrix
    layout: tuple[int, int, int]


def sufficient_ancilla(
    chi: DensityMatrix, omega: DensityMatrix, target_fidelity: float
) -> SufficientAncilla:
    """Build pure states on base (x) env (x) qubit reducing to chi and omega.

    The pair's mutual fidelity equals ``target_fidelity``, which must not
    exceed F(chi, omega): the construction appends a flag qubit rotated by
    an angle that scales the maximal purification overlap down to the
    requested value.  Requesting more overlap than F(chi, omega) is
    impossible and raises RangeError (DegenerateFidelityError when the
    states are orthogonal and any positive overlap is requested).
    """
    r = float(target_fidelity)
    px, py = optimal_purification_pair(chi, omega)
    max_overlap = float(abs(np.vdot(px.vector, py.vector)) ** 2)
    if r < -1e-12:
        raise RangeError(f"target fidelity {r!r} is negative")
    if max_overlap <= 1e-12 and r > 1e-12:
        raise DegenerateFidelityError(
            f"states have fidelity {max_overlap:.3e}; cannot reach overlap {r!r}"
        )
    if r > max_overlap + 1e-9:
        raise RangeError(
            f"target fidelity {r!r} exceeds F(chi, omega) = {max_overlap!r}; "
            "no such ancilla pair exists"
        )
    if max_overlap <= 1e-12:
        theta = math.pi / 2.0
    else:
        ratio = min(max(r / max_overlap, 0.0), 1.0)
        theta = math.acos(math.sqrt(ratio))
    flag_first = np.array([1.0, 0.0], dtype=np.complex128)
    flag_second = np.array([math.cos(theta), math.sin(theta)], dtype=np.complex128)
    first_vec = np.kron(px.vector, flag_first)
    second_vec = np.kron(py.vector, flag_second)
    first = pure_state(first_vec)
    second = pure_state(second_vec)
    return SufficientAncilla(first, second, (chi.dim, px.env_dim, 2))
