"""Problem-file parsing and serialization.

A problem file is JSON:

    {
      "dim": 2, "N": 1, "L": 2,
      "states": [ [[[re, im], ...], ...], ... ],
      "priors": [0.5, 0.5],
      "ancilla": {"env_dim": 1, "states": [ ... ]}        # optional
    }

Every matrix is an array of rows, every entry a [re, im] pair.  Ancilla
states live on extra-register (x) environment space, so their dimension
is dim**(L-N) * env_dim.
"""

from __future__ import annotations

import json
import os
from typing import Any

import numpy as np

from .errors import CloneboundError, ProblemFormatError
from .states import CloningProblem, DensityMatrix, Ensemble, validate


def _expect_type(value, types, path: str, label: str):
    if not isinstance(value, types):
        raise ProblemFormatError(f"{path}: expected {label}, got {type(value).__name__}")
    return value


def _expect_int(value, path: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ProblemFormatError(f"{path}: expected an integer, got {value!r}")
    return value


def _expect_number(value, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ProblemFormatError(f"{path}: expected a number, got {value!r}")
    return float(value)


def parse_matrix(raw, dim: int, path: str) -> np.ndarray:
    rows = _expect_type(raw, list, path, f"a {dim}x{dim} matrix")
    if len(rows) != dim:
        raise ProblemFormatError(f"{path}: expected {dim} rows, got {len(rows)}")
    out = np.zeros((dim, dim), dtype=np.complex128)
    for i, row in enumerate(rows):
        row = _expect_type(row, list, f"{path}[{i}]", f"a row of {dim} entries")
        if len(row) != dim:
            raise ProblemFormatError(
                f"{path}[{i}]: expected {dim} entries, got {len(row)}"
            )
        for j, entry in enumerate(row):
            entry = _expect_type(entry, list, f"{path}[{i}][{j}]", "a [re, im] pair")
            if len(entry) != 2:
                raise ProblemFormatError(
                    f"{path}[{i}][{j}]: expected a [re, im] pair, got {len(entry)} items"
                )
            re = _expect_number(entry[0], f"{path}[{i}][{j}][0]")
            im = _expect_number(entry[1], f"{path}[{i}][{j}][1]")
            out[i, j] = complex(re, im)
    return out


def _parse_state(raw, dim: int, path: str) -> DensityMatrix:
    matrix = parse_matrix(raw, dim, path)
    try:
        return validate(matrix)
    except CloneboundError as exc:
        raise ProblemFormatError(f"{path}: {exc}") from exc


def problem_from_dict(doc: dict) -> CloningProblem:
    _expect_type(doc, dict, "$", "an object")
    for key in ("dim", "N", "L", "states", "priors"):
        if key not in doc:
            raise ProblemFormatError(f"$.{key}: missing required field")
    dim = _expect_int(doc["dim"], "$.dim")
    if dim < 2:
        raise ProblemFormatError(f"$.dim: must be >= 2, got {dim}")
    copies_in = _expect_int(doc["N"], "$.N")
    copies_out = _expect_int(doc["L"], "$.L")
    raw_states = _expect_type(doc["states"], list, "$.states", "a list of matrices")
    states = tuple(
        _parse_state(raw, dim, f"$.states[{i}]") for i, raw in enumerate(raw_states)
    )
    raw_priors = _expect_type(doc["priors"], list, "$.priors", "a list of numbers")
    priors = [_expect_number(v, f"$.priors[{i}]") for i, v in enumerate(raw_priors)]
    try:
        ensemble = Ensemble(states, np.asarray(priors))
    except CloneboundError as exc:
        raise ProblemFormatError(f"$.priors: {exc}") from exc

    ancilla = None
    env_dim = None
    if doc.get("ancilla") is not None:
        raw_anc = _expect_type(doc["ancilla"], dict, "$.ancilla", "an object")
        if "env_dim" not in raw_anc or "states" not in raw_anc:
            raise ProblemFormatError("$.ancilla: needs both env_dim and states")
        env_dim = _expect_int(raw_anc["env_dim"], "$.ancilla.env_dim")
        if env_dim < 1:
            raise ProblemFormatError(f"$.ancilla.env_dim: must be >= 1, got {env_dim}")
        anc_dim = dim ** (copies_out - copies_in) * env_dim
        raw_anc_states = _expect_type(
            raw_anc["states"], list, "$.ancilla.states", "a list of matrices"
        )
        anc_states = tuple(
            _parse_state(raw, anc_dim, f"$.ancilla.states[{i}]")
            for i, raw in enumerate(raw_anc_states)
        )
        try:
            ancilla = Ensemble(anc_states, np.asarray(priors))
        except CloneboundError as exc:
            raise ProblemFormatError(f"$.ancilla.states: {exc}") from exc

    try:
        return CloningProblem(ensemble, copies_in, copies_out, ancilla, env_dim)
    except CloneboundError as exc:
        raise ProblemFormatError(f"$: {exc}") from exc


def load_problem(path: str | os.PathLike) -> CloningProblem:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            doc = json.load(handle)
    except OSError as exc:
        raise ProblemFormatError(f"cannot read problem file: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ProblemFormatError(f"invalid JSON: {exc}") from exc
    return problem_from_dict(doc)


def matrix_to_pairs(matrix: np.ndarray) -> list[list[list[float]]]:
    return [
        [[float(entry.real), float(entry.imag)] for entry in row] for row in matrix
    ]


def problem_to_dict(problem: CloningProblem) -> dict[str, Any]:
    doc: dict[str, Any] = {
        "dim": problem.dim,
        "N": problem.copies_in,
        "L": problem.copies_out,
        "states": [matrix_to_pairs(s.matrix) for s in problem.input_ensemble.states],
        "priors": [float(p) for p in problem.input_ensemble.priors],
    }
    if problem.ancilla_ensemble is not None:
        doc["ancilla"] = {
            "env_dim": problem.ancilla_env_dim,
            "states": [
                matrix_to_pairs(s.matrix) for s in problem.ancilla_ensemble.states
            ],
        }
    return doc


def save_problem(problem: CloningProblem, path: str | os.PathLike) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(problem_to_dict(problem), handle, indent=2, sort_keys=True)
        handle.write("\n")
