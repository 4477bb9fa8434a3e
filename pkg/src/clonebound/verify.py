"""Randomized property suites behind the ``verify`` command.

Each suite draws seeded random instances, measures its characteristic
residual, and records every violation with the full offending instance.
Residual conventions per suite:

* triangle         angle(a,c) + angle(b,c) - angle(a,b); must be >= -1e-8
* monotonicity     F(reduced pair) - F(pair); must be >= -1e-8
* multiplicativity F(product pair) - F1*F2; |residual| must be <= 1e-7
* measurement      sin(angle) - |probability deviation|; must be >= -1e-8
* bound-sweep      smallest margin across the machine-vs-bound assertions
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

import numpy as np

from .cloner import verify_bound_sweep
from .linalg import kron
from .metrics import check_triangle, fidelity, measurement_deviation_bound, monotonicity_check
from .problems import matrix_to_pairs
from .sampling import random_density_matrix, random_effect
from .states import validate

TRIANGLE_TOL = -1e-8
MONOTONE_TOL = -1e-8
MULTIPLICATIVE_TOL = 1e-7
MEASUREMENT_TOL = -1e-8


@dataclass(frozen=True)
class VerifyReport:
    suite: str
    trials: int
    dim: int
    seed: int
    residual_min: float
    residual_max: float
    violations: tuple[dict[str, Any], ...]

    @property
    def passed(self) -> bool:
        return not self.violations


def _report(suite, trials, dim, seed, residuals, violations) -> VerifyReport:
    return VerifyReport(
        suite=suite,
        trials=trials,
        dim=dim,
        seed=seed,
        residual_min=float(min(residuals)) if residuals else float("nan"),
        residual_max=float(max(residuals)) if residuals else float("nan"),
        violations=tuple(violations),
    )


def _suite_triangle(trials: int, dim: int, seed: int) -> VerifyReport:
    rng = np.random.default_rng(seed)
    residuals, violations = [], []
    for t in range(trials):
        a = random_density_matrix(rng, dim, rank=int(rng.integers(1, dim + 1)))
        b = random_density_matrix(rng, dim, rank=int(rng.integers(1, dim + 1)))
        c = random_density_matrix(rng, dim, rank=int(rng.integers(1, dim + 1)))
        residual = check_triangle(a, b, c)
        residuals.append(residual)
        if residual < TRIANGLE_TOL:
            violations.append(
                {
                    "trial": t,
                    "residual": residual,
                    "states": [matrix_to_pairs(s.matrix) for s in (a, b, c)],
                }
            )
    return _report("triangle", trials, dim, seed, residuals, violations)


def _suite_monotonicity(trials: int, dim: int, seed: int) -> VerifyReport:
    rng = np.random.default_rng(seed)
    residuals, violations = [], []
    for t in range(trials):
        chi = random_density_matrix(rng, dim * dim)
        omega = random_density_matrix(rng, dim * dim)
        keep = (t % 2,)
        before, after = monotonicity_check(chi, omega, [dim, dim], keep)
        residual = after - before
        residuals.append(residual)
        if residual < MONOTONE_TOL:
            violations.append(
                {
                    "trial": t,
                    "residual": residual,
                    "keep": list(keep),
                    "states": [matrix_to_pairs(s.matrix) for s in (chi, omega)],
                }
            )
    return _report("monotonicity", trials, dim, seed, residuals, violations)


def _suite_multiplicativity(trials: int, dim: int, seed: int) -> VerifyReport:
    rng = np.random.default_rng(seed)
    residuals, violations = [], []
    for t in range(trials):
        a = random_density_matrix(rng, dim)
        c = random_density_matrix(rng, dim)
        b = random_density_matrix(rng, 2)
        d = random_density_matrix(rng, 2)
        product = fidelity(validate(kron(a.matrix, b.matrix)), validate(kron(c.matrix, d.matrix)))
        residual = product - fidelity(a, c) * fidelity(b, d)
        residuals.append(residual)
        if abs(residual) > MULTIPLICATIVE_TOL:
            violations.append(
                {
                    "trial": t,
                    "residual": residual,
                    "states": [matrix_to_pairs(s.matrix) for s in (a, b, c, d)],
                }
            )
    return _report("multiplicativity", trials, dim, seed, residuals, violations)


def _suite_measurement(trials: int, dim: int, seed: int) -> VerifyReport:
    rng = np.random.default_rng(seed)
    residuals, violations = [], []
    for t in range(trials):
        chi = random_density_matrix(rng, dim, rank=int(rng.integers(1, dim + 1)))
        omega = random_density_matrix(rng, dim, rank=int(rng.integers(1, dim + 1)))
        effect = random_effect(rng, dim)
        lhs, rhs = measurement_deviation_bound(chi, omega, effect)
        residual = rhs - lhs
        residuals.append(residual)
        if residual < MEASUREMENT_TOL:
            violations.append(
                {
                    "trial": t,
                    "residual": residual,
                    "effect": matrix_to_pairs(effect),
                    "states": [matrix_to_pairs(s.matrix) for s in (chi, omega)],
                }
            )
    return _report("measurement", trials, dim, seed, residuals, violations)


def _suite_bound_sweep(trials: int, dim: int, seed: int) -> VerifyReport:
    sweep = verify_bound_sweep(trials, seed=seed, dim=dim)
    residuals = [
        m
        for m in (
            sweep.min_bound_margin,
            sweep.min_chain_margin,
            sweep.min_output_angle_margin,
        )
        if m == m  # drop NaN from empty sweeps
    ]
    violations = [
        {
            "trial": ce.trial,
            "kind": ce.kind,
            "margin": ce.margin,
            "detail": ce.detail,
        }
        for ce in sweep.counterexamples
    ]
    return _report("bound-sweep", trials, dim, seed, residuals, violations)


SUITES = {
    "triangle": _suite_triangle,
    "monotonicity": _suite_monotonicity,
    "multiplicativity": _suite_multiplicativity,
    "measurement": _suite_measurement,
    "bound-sweep": _suite_bound_sweep,
}


def run_suite(name: str, trials: int, dim: int, seed: int) -> VerifyReport:
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; choose from {sorted(SUITES)}")
    return SUITES[name](trials, dim, seed)
