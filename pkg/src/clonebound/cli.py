"""Command-line front end.

Commands: ``bound`` (closed-form limits), ``verify`` (randomized property
suites), ``search`` (numerical machine optimization), ``sweep``
(parameter scans as CSV, optionally plotted), ``lemma`` (the constrained
two-term cosine-square maximum).

Exit codes: 0 success, 1 property or bound violation, 2 input error,
3 mode/arity mismatch.  Fidelity convention throughout: F is the squared
transition probability (Tr sqrt(sqrt(chi) omega sqrt(chi)))^2, so angles
satisfy F = cos^2(angle).  Angles are reported in radians with 12
significant digits.  ``CLONEBOUND_SEED`` supplies a default seed; the
``--seed`` flag overrides it.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from typing import Any, Optional

import numpy as np

from . import __version__
from .bounds import (
    Regime,
    asymptotic_bound,
    cos2_pair_max,
    equal_prior_bound,
    multi_state_bound,
    refined_bound,
    tightness_gap,
    two_state_bound,
)
from .cloner import optimize
from .errors import ArityError, CloneboundError, RangeError
from .problems import load_problem
from .states import CloningProblem, Ensemble, sufficient_ancilla
from .verify import SUITES, run_suite

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_INPUT = 2
EXIT_MODE = 3

GAP_TOL = -1e-6


def round_sig(value: float, digits: int = 12) -> float:
    if value == 0.0 or not math.isfinite(value):
        return value
    return float(f"{value:.{digits}g}")


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        with open(out, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)


def _emit_json(report: dict, out: Optional[str]) -> None:
    _emit(json.dumps(report, indent=2, sort_keys=True) + "\n", out)


def _default_seed(value: Optional[int]) -> int:
    if value is not None:
        return value
    env = os.environ.get("CLONEBOUND_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError as exc:
            raise RangeError(f"CLONEBOUND_SEED={env!r} is not an integer") from exc
    return 0


def _pair_rows(report) -> list[dict[str, Any]]:
    rows = []
    for term, ang in zip(report.per_pair_terms, report.angles):
        rows.append(
            {
                "j": term.j,
                "k": term.k,
                "term": round_sig(term.term),
                "regime": term.regime.value,
                "input_angle": round_sig(ang.input_angle.radians),
                "target_angle": round_sig(ang.target_angle.radians),
                "extra_angle": round_sig(ang.extra_angle.radians),
                "combined_angle": round_sig(ang.combined_angle.radians),
            }
        )
    return rows


def _base_report(mode: str, seed: Optional[int] = None) -> dict[str, Any]:
    return {"schema": 1, "version": __version__, "mode": mode, "seed": seed}


def _bound_report(problem: CloningProblem, mode: str) -> dict[str, Any]:
    report = _base_report(mode)
    if mode == "theorem1":
        result = two_state_bound(problem)
        report["bound"] = round_sig(result.bound)
        report["pairs"] = _pair_rows(result)
    elif mode == "theorem2":
        result = multi_state_bound(problem)
        report["bound"] = round_sig(result.bound)
        report["pairs"] = _pair_rows(result)
        priors = problem.input_ensemble.priors
        if problem.ancilla_ensemble is None and float(
            np.max(np.abs(priors - 1.0 / problem.n_states))
        ) <= 1e-9:
            report["cross_check"] = round_sig(equal_prior_bound(problem))
    elif mode == "refined":
        result = refined_bound(problem)
        report["bound"] = round_sig(result.bound)
        report["error_angles"] = [round_sig(float(v)) for v in result.error_angles]
        report["residuals"] = [
            {"j": r.j, "k": r.k, "residual": round_sig(r.residual)}
            for r in tightness_gap(problem)
        ]
    elif mode == "asymptotic":
        report["bound"] = round_sig(asymptotic_bound(problem))
    else:
        raise RangeError(f"unknown mode {mode!r}")
    return report


def _bound_csv(report: dict[str, Any]) -> str:
    lines = [
        "record,j,k,value,regime,input_angle,target_angle,extra_angle,combined_angle"
    ]
    for row in report.get("pairs", []):
        lines.append(
            "pair,{j},{k},{term!r},{regime},{input_angle!r},{target_angle!r},"
            "{extra_angle!r},{combined_angle!r}".format(**row)
        )
    lines.append(f"bound,,,{report['bound']!r},,,,,")
    return "\n".join(lines) + "\n"


def cmd_bound(args) -> int:
    problem = load_problem(args.problem)
    mode = args.mode
    if mode is None:
        mode = "theorem1" if problem.n_states == 2 else "theorem2"
    report = _bound_report(problem, mode)
    if args.format == "csv":
        _emit(_bound_csv(report), args.out)
    else:
        _emit_json(report, args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    seed = _default_seed(args.seed)
    result = run_suite(args.suite, args.trials, args.dim, seed)
    report = _base_report("verify", seed)
    report.update(
        {
            "suite": result.suite,
            "trials": result.trials,
            "dim": result.dim,
            "residual_min": result.residual_min,
            "residual_max": result.residual_max,
            "violation_count": len(result.violations),
            "violations": list(result.violations),
        }
    )
    _emit_json(report, args.out)
    return EXIT_OK if result.passed else EXIT_VIOLATION


def cmd_search(args) -> int:
    problem = load_problem(args.problem)
    seed = _default_seed(args.seed)
    result = optimize(
        problem,
        env_dim=args.env_dim,
        budget=args.budget,
        seed=seed,
        ansatz=args.ansatz,
    )
    report = _base_report("search", seed)
    report.update(
        {
            "ansatz": args.ansatz,
            "env_dim": result.machine.env_dim,
            "budget": args.budget,
            "evaluations": result.evaluations,
            "status": result.status,
            "achieved": round_sig(result.achieved),
            "bound": round_sig(result.bound),
            "gap": round_sig(result.gap),
        }
    )
    _emit_json(report, args.out)
    return EXIT_VIOLATION if result.gap < GAP_TOL else EXIT_OK


def _regime_label(report) -> str:
    regimes = {t.regime for t in report.per_pair_terms}
    if regimes == {Regime.SATURATED}:
        return "saturated"
    if regimes == {Regime.RESTRICTED}:
        return "restricted"
    return "mixed"


def _auto_bound(problem: CloningProblem):
    if problem.n_states == 2:
        return two_state_bound(problem)
    return multi_state_bound(problem)


def _sweep_prior(problem: CloningProblem, value: float) -> CloningProblem:
    if not 0.0 < value < 1.0:
        raise RangeError(f"prior sweep value {value!r} outside (0, 1)")
    priors = np.asarray(problem.input_ensemble.priors, dtype=float).copy()
    if problem.n_states == 2:
        new = np.array([value, 1.0 - value])
    else:
        rest = priors[1:]
        total = rest.sum()
        weights = rest / total if total > 0 else np.full(rest.size, 1.0 / rest.size)
        new = np.concatenate([[value], (1.0 - value) * weights])
    ensemble = Ensemble(problem.input_ensemble.states, new)
    ancilla = problem.ancilla_ensemble
    if ancilla is not None:
        ancilla = Ensemble(ancilla.states, new)
    return CloningProblem(
        ensemble, problem.copies_in, problem.copies_out, ancilla, problem.ancilla_env_dim
    )


def _sweep_length(problem: CloningProblem, value: float) -> CloningProblem:
    copies_out = int(round(value))
    if copies_out <= problem.copies_in:
        raise RangeError(
            f"L sweep value {copies_out} must exceed N = {problem.copies_in}"
        )
    return CloningProblem(
        problem.input_ensemble,
        problem.copies_in,
        copies_out,
        problem.ancilla_ensemble,
        problem.ancilla_env_dim,
    )


def _sweep_ancilla(problem: CloningProblem, value: float) -> CloningProblem:
    if problem.n_states != 2:
        raise RangeError("ancilla-fidelity sweep requires a two-state problem")
    if not 0.0 <= value <= 1.0:
        raise RangeError(f"ancilla-fidelity value {value!r} outside [0, 1]")
    # Realize the target mutual fidelity with an explicit pure ancilla pair.
    # Both states reduce to the M-copy block of the first input, so any
    # target in [0, 1] is reachable.
    block = problem.input_ensemble.states[0].power(problem.extra_copies)
    pair = sufficient_ancilla(block, block, value)
    ancilla = Ensemble((pair.first, pair.second), problem.input_ensemble.priors)
    base, env, flag = pair.layout
    env_dim = env * flag
    return CloningProblem(
        problem.input_ensemble, problem.copies_in, problem.copies_out, ancilla, env_dim
    )


SWEEP_BUILDERS = {
    "prior": _sweep_prior,
    "L": _sweep_length,
    "ancilla-fidelity": _sweep_ancilla,
}


def _sweep_claim(param: str, values, bounds) -> tuple[str, bool]:
    tol = 1e-9
    if param == "prior":
        # non-increasing in the prior product p1 * (1 - p1)
        order = np.argsort([v * (1.0 - v) for v in values])
        ordered = [bounds[i] for i in order]
        claim = "non-increasing-in-prior-product"
    else:
        ordered = [b for _, b in sorted(zip(values, bounds))]
        claim = f"non-increasing-in-{param}"
    ok = all(ordered[i + 1] <= ordered[i] + tol for i in range(len(ordered) - 1))
    return claim, ok


def cmd_sweep(args) -> int:
    problem = load_problem(args.problem)
    builder = SWEEP_BUILDERS[args.param]
    if args.steps < 2:
        raise RangeError(f"--steps must be >= 2, got {args.steps}")
    raw_values = np.linspace(args.start, args.stop, args.steps)
    values: list[float] = []
    bounds: list[float] = []
    regimes: list[str] = []
    for raw in raw_values:
        modified = builder(problem, float(raw))
        if args.param == "L":
            value = float(modified.copies_out)
            if values and value == values[-1]:
                continue
        else:
            value = float(raw)
        report = _auto_bound(modified)
        values.append(value)
        bounds.append(report.bound)
        regimes.append(_regime_label(report))

    claim, ok = _sweep_claim(args.param, values, bounds)
    lines = ["param_value,bound,regime"]
    for v, b, r in zip(values, bounds, regimes):
        lines.append(f"{v!r},{b!r},{r}")
    lines.append(f"summary,{'pass' if ok else 'fail'},{claim}")
    _emit("\n".join(lines) + "\n", args.out)

    if args.plot:
        from .plots import render_sweep_figure

        render_sweep_figure(values, bounds, regimes, args.param, args.plot)
    return EXIT_OK


def cmd_lemma(args) -> int:
    p = args.p
    if not 0.0 < p < 1.0:
        raise RangeError(f"--p must lie strictly inside (0, 1), got {p!r}")
    fmax, (x, y) = cos2_pair_max(p, 1.0 - p, args.a)
    report = _base_report("lemma")
    report.update(
        {
            "p": p,
            "a": args.a,
            "fmax": round_sig(fmax),
            "argmax": [round_sig(x), round_sig(y)],
        }
    )
    if args.grid_check is not None:
        step = max(float(args.grid_check), 1e-4)
        xs = np.arange(0.0, args.a + step, step)
        xs = np.clip(xs, 0.0, args.a)
        ys = args.a - xs
        grid = p * np.cos(xs) ** 2 + (1.0 - p) * np.cos(ys) ** 2
        grid_max = float(grid.max()) if grid.size else fmax
        report["grid_step"] = step
        report["grid_max"] = round_sig(grid_max)
        report["abs_difference"] = round_sig(abs(grid_max - fmax))
    _emit_json(report, args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="clonebound",
        description=(
            "Global-fidelity limits for copying a known finite set of mixed "
            "quantum states, with numerical machine search. Fidelity is the "
            "squared transition probability (Tr sqrt(sqrt(chi) omega "
            "sqrt(chi)))^2; angles are arccos(sqrt(F)) in radians."
        ),
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_bound = sub.add_parser("bound", help="evaluate a closed-form limit")
    p_bound.add_argument("--problem", required=True, help="problem JSON file")
    p_bound.add_argument(
        "--mode",
        choices=["theorem1", "theorem2", "refined", "asymptotic"],
        default=None,
        help="limit to evaluate; default picks by state count",
    )
    p_bound.add_argument("--out", default=None, help="write the report here")
    p_bound.add_argument("--format", choices=["json", "csv"], default="json")
    p_bound.set_defaults(func=cmd_bound)

    p_verify = sub.add_parser("verify", help="run a randomized property suite")
    p_verify.add_argument("--suite", required=True, choices=sorted(SUITES))
    p_verify.add_argument("--trials", required=True, type=int)
    p_verify.add_argument("--dim", type=int, default=2)
    p_verify.add_argument("--seed", type=int, default=None)
    p_verify.add_argument("--out", default=None)
    p_verify.set_defaults(func=cmd_verify)

    p_search = sub.add_parser("search", help="optimize a copying machine")
    p_search.add_argument("--problem", required=True)
    p_search.add_argument("--budget", required=True, type=int)
    p_search.add_argument("--env-dim", dest="env_dim", type=int, default=None)
    p_search.add_argument("--ansatz", choices=["full", "ab-pure"], default="full")
    p_search.add_argument("--seed", type=int, default=None)
    p_search.add_argument("--out", default=None)
    p_search.set_defaults(func=cmd_search)

    p_sweep = sub.add_parser("sweep", help="scan a parameter and emit CSV")
    p_sweep.add_argument("--problem", required=True)
    p_sweep.add_argument(
        "--param", required=True, choices=sorted(SWEEP_BUILDERS)
    )
    p_sweep.add_argument("--from", dest="start", required=True, type=float)
    p_sweep.add_argument("--to", dest="stop", required=True, type=float)
    p_sweep.add_argument("--steps", required=True, type=int)
    p_sweep.add_argument("--out", default=None)
    p_sweep.add_argument("--plot", default=None, help="also render a figure here")
    p_sweep.set_defaults(func=cmd_sweep)

    p_lemma = sub.add_parser(
        "lemma", help="constrained maximum of p cos^2 x + q cos^2 y"
    )
    p_lemma.add_argument("--p", required=True, type=float)
    p_lemma.add_argument("--a", required=True, type=float)
    p_lemma.add_argument(
        "--grid-check",
        dest="grid_check",
        type=float,
        default=None,
        help="also scan the binding segment at this step (floor 1e-4)",
    )
    p_lemma.add_argument("--out", default=None)
    p_lemma.set_defaults(func=cmd_lemma)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ArityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MODE
    except CloneboundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
