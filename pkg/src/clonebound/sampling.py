"""Random generators for states, unitaries, and measurement effects."""

from __future__ import annotations

import numpy as np

from .states import DensityMatrix, validate


def random_hermitian(rng: np.random.Generator, dim: int, scale: float = 1.0) -> np.ndarray:
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return scale * 0.5 * (g + g.conj().T)


def random_density_matrix(
    rng: np.random.Generator, dim: int, rank: int | None = None
) -> DensityMatrix:
    """Random state of the given rank (full rank when omitted)."""
    r = dim if rank is None else max(1, min(rank, dim))
    g = rng.normal(size=(dim, r)) + 1j * rng.normal(size=(dim, r))
    rho = g @ g.conj().T
    rho /= np.trace(rho).real
    return validate(rho)


def random_pure_state(rng: np.random.Generator, dim: int) -> np.ndarray:
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)


def random_unitary(rng: np.random.Generator, dim: int) -> np.ndarray:
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(g)
    # fix the phase convention so the distribution is Haar
    phases = np.diag(r) / np.abs(np.diag(r))
    return q * phases


def random_effect(rng: np.random.Generator, dim: int) -> np.ndarray:
    """Measurement operator (I + H/||H||)/2 for random Hermitian H."""
    h = random_hermitian(rng, dim)
    norm = float(np.max(np.abs(np.linalg.eigvalsh(h))))
    if norm == 0.0:
        return 0.5 * np.eye(dim, dtype=np.complex128)
    return 0.5 * (np.eye(dim, dtype=np.complex128) + h / norm)


def random_priors(rng: np.random.Generator, n: int, floor: float = 0.05) -> np.ndarray:
    """Random prior vector with every entry at least ``floor``."""
    raw = rng.uniform(floor, 1.0, size=n)
    return raw / raw.sum()
