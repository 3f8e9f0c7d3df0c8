"""
Readers and writers for subspaces, Darboux bases, flow trajectories and
oracle reports.

Floats in JSON go through ``repr`` (shortest round-trip form) and floats in
CSV are printed with 17 significant digits, so identical inputs give
byte-identical files.
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path
from typing import IO, Iterable

import numpy as np

from .darboux import DarbouxBasis
from .energy_flow import FlowTrajectory
from .oracles import OracleReport
from .symplectic_core import Subspace, make_standard_space, subspace_from_basis

__all__ = [
    "SubspaceFormatError",
    "subspace_to_dict",
    "subspace_from_dict",
    "read_subspace",
    "write_subspace",
    "darboux_to_dict",
    "write_json",
    "TRAJECTORY_COLUMNS",
    "trajectory_rows",
    "write_trajectory_csv",
    "read_trajectory_csv",
    "write_reports",
]


class SubspaceFormatError(ValueError):
    """A subspace document is malformed or its basis fails validation."""


def _matrix(M) -> list[list[float]]:
    return [[float(x) for x in row] for row in np.asarray(M)]


def subspace_to_dict(W: Subspace) -> dict:
    return {"n": W.n, "k": W.k, "basis": _matrix(W.basis)}


def subspace_from_dict(doc, reorthonormalize: bool = False) -> Subspace:
    """Build a Subspace from {"n", "k", "basis"}; basis is 2n rows of k entries.

    A flat list of 2n*k numbers in row-major order is accepted too.
    """
    if not isinstance(doc, dict):
        raise SubspaceFormatError("subspace document must be a JSON object")
    try:
        n, k = doc["n"], doc["k"]
        raw = doc["basis"]
    except KeyError as exc:
        raise SubspaceFormatError(f"missing field {exc.args[0]!r}") from None
    if not (isinstance(n, int) and isinstance(k, int)) or isinstance(n, bool) or isinstance(k, bool):
        raise SubspaceFormatError("n and k must be integers")
    if n < 1 or not 0 <= k <= 2 * n:
        raise SubspaceFormatError(f"need n >= 1 and 0 <= k <= 2n; got n={n}, k={k}")
    try:
        B = np.array(raw, dtype=float)
    except (TypeError, ValueError):
        raise SubspaceFormatError("basis must be a numeric array") from None
    if B.ndim == 1 and B.size == 2 * n * k:
        B = B.reshape(2 * n, k)
    if k == 0 and B.size == 0:
        B = np.zeros((2 * n, 0))
    if B.shape != (2 * n, k):
        raise SubspaceFormatError(f"basis must be {2 * n} x {k}; got shape {B.shape}")
    if not np.all(np.isfinite(B)):
        raise SubspaceFormatError("basis contains non-finite entries")
    try:
        return subspace_from_basis(make_standard_space(n), B, reorthonormalize=reorthonormalize)
    except ValueError as exc:
        raise SubspaceFormatError(str(exc)) from None


def read_subspace(path, reorthonormalize: bool = False) -> Subspace:
    try:
        doc = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise SubspaceFormatError(f"cannot read {path}: {exc}") from None
    return subspace_from_dict(doc, reorthonormalize)


def write_json(path, doc) -> None:
    Path(path).write_text(json.dumps(doc, indent=2) + "\n")


def write_subspace(path, W: Subspace) -> None:
    write_json(path, subspace_to_dict(W))


def darboux_to_dict(basis: DarbouxBasis) -> dict:
    return {
        "n": basis.space.n,
        "e0": _matrix(basis.e0),
        "eplus": _matrix(basis.eplus),
        "eminus": _matrix(basis.eminus),
        "f0": _matrix(basis.f0),
        "fplus": _matrix(basis.fplus),
        "fminus": _matrix(basis.fminus),
        "angles": sorted(float(a) for a in basis.angles),
    }


TRAJECTORY_COLUMNS = ("step", "t", "f", "grad_norm", "n0", "nplus", "nminus", "min_angle", "residual")


def _g17(x: float) -> str:
    return "nan" if math.isnan(x) else format(x, ".17g")


def trajectory_rows(traj: FlowTrajectory) -> list[list[str]]:
    return [
        [str(s.step), _g17(s.t), _g17(s.f), _g17(s.grad_norm),
         str(s.signature.n0), str(s.signature.nplus), str(s.signature.nminus),
         _g17(s.min_angle), _g17(s.residual)]
        for s in traj.samples
    ]


def write_trajectory_csv(target, traj: FlowTrajectory, slack: float = 1e-12) -> None:
    """Write the trajectory after re-checking monotone energy and constant type.

    ``target`` is a path or an open text stream.
    """
    bad = traj.invariant_violations(slack)
    if bad:
        raise ValueError("trajectory violates flow invariants: " + "; ".join(bad))

    def emit(fh: IO[str]):
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(TRAJECTORY_COLUMNS)
        w.writerows(trajectory_rows(traj))

    if hasattr(target, "write"):
        emit(target)
    else:
        with open(target, "w", newline="") as fh:
            emit(fh)


def read_trajectory_csv(path) -> list[dict]:
    """Rows as dicts with ints for step and type columns, floats elsewhere."""
    ints = {"step", "n0", "nplus", "nminus"}
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    return [{k: (int(v) if k in ints else float(v)) for k, v in r.items()} for r in rows]


def write_reports(fh: IO[str], reports: Iterable[OracleReport]) -> None:
    """One JSON object per line."""
    for r in reports:
        fh.write(json.dumps(r.to_dict()) + "\n")
