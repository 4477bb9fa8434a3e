"""Fidelity, the associated angle, and the distinguishability inequalities.

Convention: fidelity is the *squared* transition probability,
F(chi, omega) = (Tr sqrt(sqrt(chi) omega sqrt(chi)))^2, so it reduces to
the squared modulus of the inner product on pure states.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import DimensionMismatchError, InvalidEffectError
from .linalg import as_complex_matrix, eig_hermitian, hermiticity_residual, partial_trace, sqrt_psd
from .states import DensityMatrix, validate

# The inner product matrix is PSD analytically; dust below this is round-off.
FID_EIG_FLOOR = -1e-12


@dataclass(frozen=True)
class Angle:
    """An angle in [0, pi/2] parameterizing fidelity as cos^2."""

    radians: float

    def __post_init__(self):
        r = float(self.radians)
        if not 0.0 <= r <= math.pi / 2.0 + 1e-12:
            raise ValueError(f"angle {r!r} outside [0, pi/2]")
        object.__setattr__(self, "radians", min(r, math.pi / 2.0))

    def __float__(self) -> float:
        return self.radians


def angle_from_fidelity(fid: float) -> Angle:
    """arccos of the square-root fidelity, clamped against round-off."""
    f = min(max(float(fid), 0.0), 1.0)
    return Angle(math.acos(math.sqrt(f)))


def fidelity(chi: DensityMatrix, omega: DensityMatrix) -> float:
    """F(chi, omega) = (Tr sqrt(sqrt(chi) omega sqrt(chi)))^2, clamped to [0, 1].

    Evaluated as the squared sum of the singular values of
    sqrt(chi) sqrt(omega), the same quantity with rank-deficiency dust
    entering linearly instead of under a square root.
    """
    if chi.dim != omega.dim:
        raise DimensionMismatchError(f"dimensions differ: {chi.dim} vs {omega.dim}")
    cross = sqrt_psd(chi.matrix) @ sqrt_psd(omega.matrix)
    singulars = np.linalg.svd(cross, compute_uv=False)
    value = float(singulars.sum()) ** 2
    return min(max(value, 0.0), 1.0)


def angle(chi: DensityMatrix, omega: DensityMatrix) -> Angle:
    """Distinguishability angle: arccos(sqrt(F))."""
    return angle_from_fidelity(fidelity(chi, omega))


def check_triangle(chi: DensityMatrix, omega: DensityMatrix, rho: DensityMatrix) -> float:
    """Triangle residual angle(chi, rho) + angle(omega, rho) - angle(chi, omega).

    Nonnegative up to round-off (contract: >= -1e-8).
    """
    return (
        angle(chi, rho).radians
        + angle(omega, rho).radians
        - angle(chi, omega).radians
    )


def measurement_deviation_bound(
    chi: DensityMatrix, omega: DensityMatrix, effect
) -> tuple[float, float]:
    """Outcome-probability deviation against its sine-of-angle ceiling.

    ``effect`` must be Hermitian with spectrum inside [0, 1].  Returns
    (|Tr(E chi) - Tr(E omega)|, sin angle(chi, omega)); the first never
    exceeds the second beyond round-off.
    """
    e = as_complex_matrix(effect)
    if hermiticity_residual(e) > 1e-9:
        raise InvalidEffectError("effect is not Hermitian within 1e-9")
    spectrum = eig_hermitian(e).eigenvalues
    if float(spectrum[-1]) < -1e-9 or float(spectrum[0]) > 1.0 + 1e-9:
        raise InvalidEffectError(
            f"effect spectrum [{spectrum[-1]:.3e}, {spectrum[0]:.3e}] outside [0, 1]"
        )
    if e.shape[0] != chi.dim or chi.dim != omega.dim:
        raise DimensionMismatchError("effect and states must share one dimension")
    lhs = abs(float(np.trace(e @ chi.matrix).real) - float(np.trace(e @ omega.matrix).real))
    rhs = math.sin(angle(chi, omega).radians)
    return lhs, rhs


def fidelity_product(pairs: Iterable[tuple[DensityMatrix, DensityMatrix]]) -> float:
    """Product of pairwise fidelities; equals the fidelity of the tensor products."""
    out = 1.0
    for chi, omega in pairs:
        out *= fidelity(chi, omega)
    return out


def monotonicity_check(
    chi: DensityMatrix,
    omega: DensityMatrix,
    dims: Sequence[int],
    keep,
) -> tuple[float, float]:
    """Fidelity before and after tracing out subsystems.

    Returns (F(chi, omega), F of the reductions); discarding a subsystem
    never lowers fidelity, so after >= before up to round-off.
    """
    before = fidelity(chi, omega)
    chi_red = validate(partial_trace(chi.matrix, dims, keep))
    omega_red = validate(partial_trace(omega.matrix, dims, keep))
    after = fidelity(chi_red, omega_red)
    return before, after
