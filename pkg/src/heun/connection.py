"""Numerical connection matrices between local Frobenius bases.

A connection matrix is meaningless without the path that produced it, so
the path is part of the result and of its JSON form.
"""

from __future__ import annotations

import cmath
import json
from dataclasses import dataclass

import numpy as np

from .continuation import (
    ContinuationPath,
    StatePair,
    abel_log_factor,
    continue_along_path,
    default_path,
    state_matrix,
)
from .errors import IllConditionedMatch, InputError, MismatchedPoints
from .frobenius import DEFAULT_TERMS, convergence_radius, local_basis, point_label, point_location
from .params import ConfluentParams, HeunParams

#: seeds and matching points sit at this fraction of the convergence radius
SEED_FRACTION = 0.5
MAX_CONDITION = 1e8


def wronskian(eq, s1: StatePair, s2: StatePair) -> complex:
    """``h1*h2' - h2*h1'`` of two states at the same point."""
    if s1.z != s2.z:
        raise MismatchedPoints(f"states live at different points: {s1.z} and {s2.z}")
    return s1.h * s2.hp - s2.h * s1.hp


def abel_weight(eq, z: complex) -> complex:
    """Principal-branch weight ``w(z)`` with ``W(z)*w(z)`` locally constant.

    General Heun: ``z**gamma (z-1)**delta (z-a)**epsilon``; confluent:
    ``exp(alpha z) z**(beta+1) (z-1)**(gamma+1)``. Only valid along paths
    that do not cross the branch cuts of the principal powers; use
    :func:`heun.continuation.abel_log_factor` for transport along a path.
    """
    z = complex(z)
    logw = sum(res * cmath.log(z - zi) for zi, res in eq.pole_residues)
    if isinstance(eq, ConfluentParams):
        logw += eq.alpha * z
    return cmath.exp(logw)


@dataclass(frozen=True)
class ConnectionMatrix:
    from_point: str
    to_point: str
    matrix: np.ndarray
    path: ContinuationPath
    est_error: float

    def to_dict(self) -> dict:
        return {
            "from": self.from_point,
            "to": self.to_point,
            "matrix": [[[v.real, v.imag] for v in row] for row in np.asarray(self.matrix, dtype=complex)],
            "path": self.path.to_dict(),
            "est_error": self.est_error,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d) -> "ConnectionMatrix":
        m = np.array([[complex(*v) for v in row] for row in d["matrix"]])
        return cls(d["from"], d["to"], m, ContinuationPath.from_dict(d["path"]), float(d["est_error"]))


def match_states(to_states, from_states) -> tuple[np.ndarray, float]:
    """Solve ``Phi_to @ C = Phi_from`` for the 2x2 connection ``C``.

    Returns ``C`` and the condition number of the column-normalized
    ``Phi_to``.
    """
    phi_to = state_matrix(to_states)
    phi_from = state_matrix(from_states)
    col = np.linalg.norm(phi_to, axis=0)
    cond = float(np.linalg.cond(phi_to / col))
    if not np.isfinite(cond) or cond > MAX_CONDITION:
        raise IllConditionedMatch(f"matching system condition number {cond:.3g} exceeds {MAX_CONDITION:g}")
    return np.linalg.solve(phi_to, phi_from), cond


def connection_path(eq, from_point, to_point, clearance: float | None = None) -> ContinuationPath:
    """Default path between the seed discs of two singular points.

    Starts at ``SEED_FRACTION`` of the radius from ``from_point`` and ends the
    same fraction away from ``to_point``, on the straight line joining them
    (with the default detour rule if another singularity is in the way).
    """
    la, lb = point_label(eq, from_point), point_label(eq, to_point)
    za, zb = point_location(eq, la), point_location(eq, lb)
    if la == lb:
        raise InputError("use an explicit path (or none) to connect a point to itself")
    u = (zb - za) / abs(zb - za)
    start = za + SEED_FRACTION * convergence_radius(eq, la) * u
    end = zb - SEED_FRACTION * convergence_radius(eq, lb) * u
    return default_path(eq, start, end, clearance)


def connection_matrix(eq: HeunParams | ConfluentParams, from_point, to_point,
                      path: ContinuationPath | None = None, tol: float = 1e-12,
                      n_terms: int = DEFAULT_TERMS) -> ConnectionMatrix:
    """Connection matrix ``C`` with ``basis_from = basis_to @ C``.

    Both local bases (exponent-0 branch first) are evaluated on their
    principal branches; the ``from`` basis at ``path.start``, the ``to``
    basis at ``path.end`` after continuing the former along ``path``.
    """
    la, lb = point_label(eq, from_point), point_label(eq, to_point)
    if path is None:
        if la == lb:
            z = point_location(eq, la) + SEED_FRACTION * convergence_radius(eq, la)
            return ConnectionMatrix(la, lb, np.eye(2, dtype=complex),
                                    ContinuationPath((z, z), 0.5 * SEED_FRACTION * convergence_radius(eq, la)), 0.0)
        path = connection_path(eq, la, lb)
    path.check(eq)
    basis_a = local_basis(eq, la, n_terms)
    basis_b = local_basis(eq, lb, n_terms)
    from_states = []
    err = 0.0
    for sol in basis_a:
        s = StatePair.from_series(sol, path.start)
        diag: dict = {}
        from_states.append(continue_along_path(eq, s, path, tol, diag))
        err = max(err, diag.get("est_error", 0.0) / max(abs(s.h), abs(s.hp)))
    to_states = [StatePair.from_series(sol, path.end) for sol in basis_b]
    C, cond = match_states(to_states, from_states)
    est = float(cond * max(err, 1e-15) * np.linalg.norm(C))
    return ConnectionMatrix(la, lb, C, path, est)


def abel_det_prediction(eq, cm: ConnectionMatrix, n_terms: int = DEFAULT_TERMS) -> complex:
    """det C implied by Abel's identity and the two local Wronskians."""
    basis_a = local_basis(eq, cm.from_point, n_terms)
    basis_b = local_basis(eq, cm.to_point, n_terms)
    wa = wronskian(eq, *(StatePair.from_series(s, cm.path.start) for s in basis_a))
    wb = wronskian(eq, *(StatePair.from_series(s, cm.path.end) for s in basis_b))
    return wa * cmath.exp(abel_log_factor(eq, cm.path)) / wb
