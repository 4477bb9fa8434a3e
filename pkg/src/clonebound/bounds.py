"""Closed-form upper limits on the global fidelity of state-dependent copying.

All limits are driven by pairwise distinguishability angles.  For a pair
of input states the relevant quantities are

* ``input_angle``     angle between the N-copy register states,
* ``target_angle``    angle between the L-copy ideal outputs,
* ``extra_angle``     angle between the M = L - N copy blocks the device
                      must supply,
* ``combined_angle``  arccos of the square root of (N-copy fidelity times
                      ancilla fidelity), i.e. the angle between the full
                      device inputs including the ancilla.

Tensor-power fidelities are computed as powers of the single-copy value;
multiplicativity of the fidelity under tensor products makes this exact
and keeps 40-copy sweeps tractable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np
from scipy.optimize import minimize

from .errors import ArityError, CloneboundError, DegenerateStatesError, RangeError
from .metrics import Angle, angle_from_fidelity, fidelity
from .states import CloningProblem

# Boundary pairs are treated as saturated: equality already admits perfect copying.
SATURATION_TOL = 1e-12
GRID_STEP_FLOOR = 1e-4
# arccos amplifies fidelity round-off near 1 to ~sqrt(eps) radians; sum
# floors below this are indistinguishable from zero, and dropping them can
# only raise the program's maximum, never invalidate it as an upper bound.
ANGLE_DUST = 1e-7

HALF_PI = math.pi / 2.0


class Regime(str, Enum):
    """Whether the ancilla carries less information than the missing copies."""

    RESTRICTED = "restricted"
    SATURATED = "saturated"


@dataclass(frozen=True)
class PairAngles:
    """Cached distinguishability angles for one pair of labels."""

    j: int
    k: int
    input_angle: Angle
    target_angle: Angle
    extra_angle: Angle
    combined_angle: Angle

    def __post_init__(self):
        if self.combined_angle.radians < self.input_angle.radians - 1e-9:
            raise CloneboundError(
                "combined angle fell below the input angle; ancilla fidelity > 1?"
            )
        if self.target_angle.radians < self.input_angle.radians - 1e-9:
            raise CloneboundError("target angle fell below the input angle")


@dataclass(frozen=True)
class PairTerm:
    """Normalized two-state limit for one pair, always in [1/2, 1]."""

    j: int
    k: int
    term: float
    regime: Regime


@dataclass(frozen=True)
class BoundReport:
    bound: float
    per_pair_terms: tuple[PairTerm, ...]
    angles: tuple[PairAngles, ...]


@dataclass(frozen=True)
class _PairData:
    angles: PairAngles
    regime: Regime
    input_fidelity: float   # N-copy fidelity of the pair
    ancilla_fidelity: float


def _ancilla_fidelity(problem: CloningProblem, j: int, k: int) -> float:
    if problem.ancilla_ensemble is None:
        return 1.0
    states = problem.ancilla_ensemble.states
    return fidelity(states[j], states[k])


def _pair_data(problem: CloningProblem, j: int, k: int) -> _PairData:
    states = problem.input_ensemble.states
    base = fidelity(states[j], states[k])
    f_in = base ** problem.copies_in
    f_out = base ** problem.copies_out
    f_extra = base ** problem.extra_copies
    f_anc = _ancilla_fidelity(problem, j, k)
    regime = (
        Regime.RESTRICTED if f_extra < f_anc - SATURATION_TOL else Regime.SATURATED
    )
    angles = PairAngles(
        j=j,
        k=k,
        input_angle=angle_from_fidelity(f_in),
        target_angle=angle_from_fidelity(f_out),
        extra_angle=angle_from_fidelity(f_extra),
        combined_angle=angle_from_fidelity(f_in * f_anc),
    )
    return _PairData(angles, regime, f_in, f_anc)


def _pair_term(p: float, q: float, target: float, combined: float) -> float:
    """Two-state limit with normalized priors p, q (p + q = 1)."""
    gap = max(target - combined, 0.0)
    s = math.sin(gap) ** 2
    return 0.5 * (1.0 + math.sqrt(max(1.0 - 4.0 * p * q * s, 0.0)))


def two_state_bound(problem: CloningProblem) -> BoundReport:
    """Upper limit on the global fidelity for a two-state set.

    When the ancilla pair is at least as distinguishable as the missing
    copy block (restricted regime) the limit is
    (1/2) {1 + sqrt(1 - 4 p1 p2 sin^2(target_angle - combined_angle))};
    otherwise perfect copying is possible and the limit degenerates to 1.
    """
    if problem.n_states != 2:
        raise ArityError(f"two-state bound needs n = 2, got {problem.n_states}")
    data = _pair_data(problem, 0, 1)
    p1, p2 = (float(x) for x in problem.input_ensemble.priors)
    if data.regime is Regime.SATURATED:
        term = 1.0
        bound = 1.0
    else:
        term = _pair_term(
            p1, p2, data.angles.target_angle.radians, data.angles.combined_angle.radians
        )
        bound = term
    return BoundReport(
        bound=bound,
        per_pair_terms=(PairTerm(0, 1, term, data.regime),),
        angles=(data.angles,),
    )


def _weighted_pair_bound(problem: CloningProblem) -> BoundReport:
    """Pairwise-regrouped limit for any n >= 2 (shared by the n > 2 form)."""
    n = problem.n_states
    priors = problem.input_ensemble.priors
    terms = []
    angles = []
    total = 0.0
    for j in range(n):
        for k in range(j + 1, n):
            data = _pair_data(problem, j, k)
            angles.append(data.angles)
            pj, pk = float(priors[j]), float(priors[k])
            pair_weight = pj + pk
            if data.regime is Regime.SATURATED:
                term = 1.0
            elif pair_weight <= 0.0:
                term = 1.0
            else:
                term = _pair_term(
                    pj / pair_weight,
                    pk / pair_weight,
                    data.angles.target_angle.radians,
                    data.angles.combined_angle.radians,
                )
            terms.append(PairTerm(j, k, term, data.regime))
            total += pair_weight * term
    bound = min(total / (n - 1), 1.0)
    return BoundReport(bound=bound, per_pair_terms=tuple(terms), angles=tuple(angles))


def multi_state_bound(problem: CloningProblem) -> BoundReport:
    """Upper limit for sets of more than two states.

    Each pair contributes its two-state limit with priors renormalized
    inside the pair, weighted by (p_j + p_k), and the sum is divided by
    n - 1.  Pairs whose ancilla is no more distinguishable than the
    missing copies contribute their trivial maximum p_j + p_k.
    """
    if problem.n_states <= 2:
        raise ArityError(f"multi-state bound needs n > 2, got {problem.n_states}")
    return _weighted_pair_bound(problem)


def equal_prior_bound(problem: CloningProblem) -> float:
    """Closed form for equal priors and no ancilla information.

    1/2 + (1/(n(n-1))) * sum over pairs of cos(target_angle - input_angle).
    Used as a cross-check of the pairwise-regrouped sum.
    """
    n = problem.n_states
    if n < 2:
        raise ArityError("needs at least two states")
    acc = 0.0
    for j in range(n):
        for k in range(j + 1, n):
            data = _pair_data(problem, j, k)
            acc += math.cos(
                data.angles.target_angle.radians - data.angles.input_angle.radians
            )
    return 0.5 + acc / (n * (n - 1))


def asymptotic_value(
    p1: float, p2: float, input_fidelity: float, ancilla_fidelity: float
) -> float:
    """Limit of the two-state bound as the output copy count grows.

    (1/2) {1 + sqrt(1 - 4 p1 p2 * input_fidelity * ancilla_fidelity)}; for
    pure states without ancilla information this is the optimal success
    probability of discriminating the two N-copy inputs.
    """
    product = min(max(input_fidelity * ancilla_fidelity, 0.0), 1.0)
    return 0.5 * (1.0 + math.sqrt(max(1.0 - 4.0 * p1 * p2 * product, 0.0)))


def asymptotic_bound(problem: CloningProblem) -> float:
    """Large-L limit of the two-state bound; requires distinct states."""
    if problem.n_states != 2:
        raise ArityError(f"asymptotic bound needs n = 2, got {problem.n_states}")
    states = problem.input_ensemble.states
    base = fidelity(states[0], states[1])
    if base >= 1.0 - 1e-12:
        raise DegenerateStatesError(
            f"states are indistinguishable (fidelity {base!r}); the limit needs distinct states"
        )
    p1, p2 = (float(x) for x in problem.input_ensemble.priors)
    f_in = base ** problem.copies_in
    f_anc = _ancilla_fidelity(problem, 0, 1)
    return asymptotic_value(p1, p2, f_in, f_anc)


def cos2_pair_max(p: float, q: float, min_sum: float) -> tuple[float, tuple[float, float]]:
    """Maximum of p cos^2(x) + q cos^2(y) over the truncated quarter-square.

    The domain is 0 <= x, y <= pi/2 with x + y >= min_sum.  Returns the
    maximum (1/2){1 + sqrt(1 - 4 p q sin^2(min_sum))} together with the
    maximizing point, which lies on the segment x + y = min_sum at the
    stationary point of tan(2x - a) = (q - p) tan(a); the atan2 form below
    selects the branch with cos(2x - a) >= 0 and handles a = pi/2 by its
    limit.
    """
    p = float(p)
    q = float(q)
    a = float(min_sum)
    if p <= 0.0 or q <= 0.0:
        raise RangeError(f"probabilities must be positive, got p={p!r}, q={q!r}")
    if abs(p + q - 1.0) > 1e-12:
        raise RangeError(f"p + q = {p + q!r} is not 1")
    if not 0.0 <= a <= HALF_PI + 1e-12:
        raise RangeError(f"angle {a!r} outside [0, pi/2]")
    a = min(a, HALF_PI)
    sin_a = math.sin(a)
    fmax = 0.5 * (1.0 + math.sqrt(max(1.0 - 4.0 * p * q * sin_a**2, 0.0)))
    x = 0.5 * (a + math.atan2((q - p) * sin_a, math.cos(a)))
    x = min(max(x, 0.0), a)
    y = a - x
    return fmax, (x, y)


def _constraint_floors(problem: CloningProblem) -> list[tuple[int, int, float]]:
    """Per-pair lower floors on error-angle sums: target minus combined angle."""
    floors = []
    n = problem.n_states
    for j in range(n):
        for k in range(j + 1, n):
            data = _pair_data(problem, j, k)
            floors.append(
                (j, k, data.angles.target_angle.radians - data.angles.combined_angle.radians)
            )
    return floors


def _lift_to_feasible(delta: np.ndarray, floors) -> np.ndarray:
    """Raise angles minimally until every pairwise sum floor is met."""
    out = np.clip(np.asarray(delta, dtype=float), 0.0, HALF_PI)
    for _ in range(200):
        worst = 0.0
        for j, k, c in floors:
            if c <= 0.0:
                continue
            gap = c - out[j] - out[k]
            if gap > 1e-12:
                out[j] = min(out[j] + gap / 2.0, HALF_PI)
                out[k] = min(out[k] + gap / 2.0, HALF_PI)
                worst = max(worst, gap)
        if worst <= 1e-12:
            break
    return out


def _objective(delta: np.ndarray, priors: np.ndarray) -> float:
    return float(np.dot(priors, np.cos(delta) ** 2))


def _grid_candidates(floors, priors, n, step):
    """Best point of a dense scan; the objective falls in each coordinate,
    so free coordinates sit on their pairwise floors.  Only n <= 3."""
    axis = np.arange(0.0, HALF_PI + step, step)
    axis = np.clip(axis, 0.0, HALF_PI)
    cmap = {(j, k): max(c, 0.0) for j, k, c in floors}
    if n == 2:
        c01 = cmap[(0, 1)]
        d0 = axis
        d1 = np.clip(c01 - d0, 0.0, HALF_PI)
        values = priors[0] * np.cos(d0) ** 2 + priors[1] * np.cos(d1) ** 2
        best = int(np.argmax(values))
        return np.array([d0[best], d1[best]])
    if n == 3:
        c01, c02, c12 = cmap[(0, 1)], cmap[(0, 2)], cmap[(1, 2)]
        d0, d1 = np.meshgrid(axis, axis, indexing="ij")
        feasible = d0 + d1 >= c01 - 1e-15
        d2 = np.maximum(np.maximum(c02 - d0, c12 - d1), 0.0)
        values = (
            priors[0] * np.cos(d0) ** 2
            + priors[1] * np.cos(d1) ** 2
            + priors[2] * np.cos(d2) ** 2
        )
        values = np.where(feasible, values, -np.inf)
        flat = int(np.argmax(values))
        i0, i1 = np.unravel_index(flat, values.shape)
        return np.array([d0[i0, i1], d1[i0, i1], d2[i0, i1]])
    return None


@dataclass(frozen=True)
class RefinedBound:
    """Joint maximization result: bound value and the per-state error angles."""

    bound: float
    error_angles: np.ndarray


def refined_bound(
    problem: CloningProblem,
    starts: int = 32,
    grid_step: Optional[float] = None,
) -> RefinedBound:
    """Tighter limit from the joint program over all error angles at once.

    Maximizes the prior-weighted sum of cos^2(error angle) subject to all
    pairwise sum floors simultaneously, instead of bounding each pair
    independently.  Multistart SLSQP (deterministic seed) plus, for
    n <= 3, a dense reduced-dimension scan; the best feasible point wins,
    ties broken toward the lexicographically smallest angle vector.
    """
    n = problem.n_states
    if n < 2:
        raise ArityError("refined bound needs at least two states")
    priors = np.asarray(problem.input_ensemble.priors, dtype=float)
    floors = _constraint_floors(problem)
    active = [(j, k, c) for j, k, c in floors if c > ANGLE_DUST]

    if not active:
        zeros = np.zeros(n)
        return RefinedBound(bound=float(priors.sum()), error_angles=zeros)

    if grid_step is not None and grid_step < GRID_STEP_FLOOR:
        grid_step = GRID_STEP_FLOOR

    candidates: list[np.ndarray] = [_lift_to_feasible(np.zeros(n), active)]
    if n == 2:
        c01 = max(active[0][2], 0.0)
        p0, p1 = float(priors[0]), float(priors[1])
        if p0 > 0.0 and p1 > 0.0:
            _, (x, y) = cos2_pair_max(p0, p1, c01)
            candidates.append(np.array([x, y]))
    step = grid_step if grid_step is not None else (1e-4 if n == 2 else 2e-3)
    grid_best = _grid_candidates(active, priors, n, step) if n <= 3 else None
    if grid_best is not None:
        candidates.append(grid_best)

    rng = np.random.default_rng(12345)
    for _ in range(max(starts, 0)):
        candidates.append(rng.uniform(0.0, HALF_PI, size=n))

    bounds_box = [(0.0, HALF_PI)] * n
    constraints = [
        {"type": "ineq", "fun": (lambda d, jj=j, kk=k, cc=c: d[jj] + d[kk] - cc)}
        for j, k, c in active
    ]

    results: list[tuple[float, np.ndarray]] = []
    for start in candidates:
        start = _lift_to_feasible(start, active)
        res = minimize(
            lambda d: -_objective(d, priors),
            start,
            method="SLSQP",
            bounds=bounds_box,
            constraints=constraints,
            options={"maxiter": 100, "ftol": 1e-12},
        )
        point = _lift_to_feasible(res.x if res.x is not None else start, active)
        results.append((_objective(point, priors), point))
        results.append((_objective(start, priors), start))

    best_value = max(v for v, _ in results)
    near = [pt for v, pt in results if v >= best_value - 1e-12]
    best_point = min(near, key=lambda pt: tuple(pt))
    return RefinedBound(bound=best_value, error_angles=best_point)


@dataclass(frozen=True)
class PairResidual:
    j: int
    k: int
    residual: float


def tightness_gap(problem: CloningProblem, **kwargs) -> tuple[PairResidual, ...]:
    """Slack of each pairwise sum floor at the refined-bound maximizer.

    All-zero residuals mean every pair constraint is tight simultaneously,
    i.e. the pairwise limit is attained at the program level; a strictly
    positive residual flags an incompatible pair.
    """
    refined = refined_bound(problem, **kwargs)
    delta = refined.error_angles
    out = []
    for j, k, c in _constraint_floors(problem):
        out.append(PairResidual(j, k, float(delta[j] + delta[k] - c)))
    return tuple(out)
