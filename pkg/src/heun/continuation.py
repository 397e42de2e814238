"""Analytic continuation of local solutions along explicit polyline paths.

The path is the branch specification: continuing the same start state along
two paths that are not homotopic in the plane punctured at the singular
points can give different end states, and that is the correct answer.

The first-order system ``(h, h')`` is integrated segment by segment with
scipy's DOP853 (explicit Runge-Kutta 8(5,3) with local error control) in
the real segment parameter ``t`` in [0, 1], ``z = za + t*(zb - za)``.
"""

from __future__ import annotations

import cmath
import json
import math
import os
import warnings
from dataclasses import InitVar, dataclass

import numpy as np
from scipy.integrate import DOP853

from .errors import DegenerateBasis, InputError, SingularityTooClose, StepLimitExceeded
from .frobenius import FrobeniusSolution, eval_series

DEFAULT_MAX_STEPS = 10**6


def max_steps() -> int:
    """Step cap per path; ``HEUN_MAX_STEPS`` overrides the default."""
    env = os.environ.get("HEUN_MAX_STEPS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise InputError(f"HEUN_MAX_STEPS must be an integer, got {env!r}") from None
    return DEFAULT_MAX_STEPS


@dataclass(frozen=True)
class StatePair:
    z: complex
    h: complex
    hp: complex

    def __post_init__(self):
        for name in ("z", "h", "hp"):
            v = complex(getattr(self, name))
            if not (math.isfinite(v.real) and math.isfinite(v.imag)):
                raise InputError(f"non-finite state entry {name}={v}")
            object.__setattr__(self, name, v)

    @property
    def vector(self) -> np.ndarray:
        return np.array([self.h, self.hp])

    def scaled(self, lam: complex) -> "StatePair":
        return StatePair(self.z, lam * self.h, lam * self.hp)

    @classmethod
    def from_series(cls, sol: FrobeniusSolution, z: complex, tol: float = 1e-14) -> "StatePair":
        r = eval_series(sol, z, tol)
        return cls(z, r.value, r.derivative)


def _segment_distance(za: complex, zb: complex, p: complex) -> float:
    d = zb - za
    L2 = abs(d) ** 2
    if L2 == 0.0:
        return abs(p - za)
    t = ((p - za) * d.conjugate()).real / L2
    t = min(1.0, max(0.0, t))
    return abs(za + t * d - p)


@dataclass(frozen=True)
class ContinuationPath:
    """Polyline of complex waypoints plus the clearance kept from singularities.

    Passing ``eq`` checks the clearance against that equation's finite
    singular points at construction time.
    """

    waypoints: tuple[complex, ...]
    clearance: float
    eq: InitVar[object] = None

    def __post_init__(self, eq):
        pts = tuple(complex(w) for w in self.waypoints)
        if len(pts) < 2:
            raise InputError("a path needs at least two waypoints")
        if not all(math.isfinite(w.real) and math.isfinite(w.imag) for w in pts):
            raise InputError("path waypoints must be finite")
        if not (self.clearance > 0 and math.isfinite(self.clearance)):
            raise InputError("clearance must be a positive number")
        object.__setattr__(self, "waypoints", pts)
        object.__setattr__(self, "clearance", float(self.clearance))
        if eq is not None:
            self.check(eq)

    @property
    def start(self) -> complex:
        return self.waypoints[0]

    @property
    def end(self) -> complex:
        return self.waypoints[-1]

    @property
    def is_closed(self) -> bool:
        return self.start == self.end

    @property
    def segments(self):
        return [(a, b) for a, b in zip(self.waypoints[:-1], self.waypoints[1:]) if a != b]

    def check(self, eq) -> None:
        for za, zb in zip(self.waypoints[:-1], self.waypoints[1:]):
            for zi in eq.singular_points:
                d = _segment_distance(za, zb, zi)
                if d < self.clearance * (1 - 1e-9):
                    raise SingularityTooClose(
                        f"segment {za} -> {zb} passes {d:.3g} from singular point {zi} "
                        f"(clearance {self.clearance:.3g})"
                    )

    def reversed(self) -> "ContinuationPath":
        return ContinuationPath(self.waypoints[::-1], self.clearance)

    def then(self, other: "ContinuationPath") -> "ContinuationPath":
        """Concatenate two paths; ``other`` must start where this one ends."""
        if other.start != self.end:
            raise InputError("paths do not join")
        return ContinuationPath(self.waypoints + other.waypoints[1:], min(self.clearance, other.clearance))

    def refined(self, k: int = 2) -> "ContinuationPath":
        """Insert ``k-1`` collinear points in every segment."""
        out = [self.waypoints[0]]
        for za, zb in zip(self.waypoints[:-1], self.waypoints[1:]):
            out.extend(za + (zb - za) * j / k for j in range(1, k + 1))
        return ContinuationPath(tuple(out), self.clearance)

    def winding_number(self, p: complex) -> int:
        """Winding number of a closed path about ``p``."""
        if not self.is_closed:
            raise InputError("winding number needs a closed path")
        turn = sum(cmath.phase((zb - p) / (za - p)) for za, zb in self.segments)
        return round(turn / (2 * math.pi))

    def to_dict(self) -> dict:
        return {"waypoints": [[w.real, w.imag] for w in self.waypoints], "clearance": self.clearance}

    @classmethod
    def from_dict(cls, d, eq=None) -> "ContinuationPath":
        try:
            pts = [complex(float(x), float(y)) for x, y in d["waypoints"]]
            return cls(tuple(pts), float(d["clearance"]), eq)
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"malformed path description: {exc}") from exc

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str, eq=None) -> "ContinuationPath":
        return cls.from_dict(json.loads(text), eq)


def min_singularity_gap(eq) -> float:
    pts = eq.singular_points
    return min(abs(a - b) for i, a in enumerate(pts) for b in pts[i + 1 :])


def default_clearance(eq) -> float:
    return 0.1 * min_singularity_gap(eq)


def _arc(center: complex, rv: float, th0: float, th1: float, m: int):
    return [center + rv * cmath.exp(1j * (th0 + (th1 - th0) * j / m)) for j in range(m + 1)]


def default_path(eq, source: complex, target: complex, clearance: float | None = None) -> ContinuationPath:
    """Straight segment from ``source`` to ``target`` with detours.

    Every finite singular point within ``clearance`` of the segment is
    bypassed on a circular arc of radius ``max(clearance, 0.05*gap)`` (gap is
    the smallest distance between singular points). The arc goes round the
    side with larger imaginary part; for a vertical segment, the side to the
    left of the direction of travel.
    """
    source, target = complex(source), complex(target)
    gap = min_singularity_gap(eq)
    if clearance is None:
        clearance = default_clearance(eq)
    radius = max(clearance, 0.05 * gap)
    for zi in eq.singular_points:
        for end in (source, target):
            if abs(end - zi) < clearance:
                raise SingularityTooClose(f"path endpoint {end} lies within {clearance:.3g} of {zi}")
    if source == target:
        return ContinuationPath((source, target), clearance, eq)
    d = target - source
    u = d / abs(d)
    normal = 1j * u
    if normal.imag < 0:
        normal = -normal
    hits = []
    for zi in eq.singular_points:
        tproj = ((zi - source) * u.conjugate()).real
        dist = abs(((zi - source) * u.conjugate()).imag)
        if 0 < tproj < abs(d) and dist < clearance:
            hits.append((tproj, zi, dist))
    pts = [source]
    for tproj, zi, dist in sorted(hits, key=lambda h: h[0]):
        # polyline radius chosen so every chord keeps ``radius`` from zi
        rv = radius
        for _ in range(2):
            half = math.sqrt(rv**2 - dist**2)
            if tproj - half <= 0 or tproj + half >= abs(d):
                raise SingularityTooClose(f"no room for a detour around {zi}; give an explicit path")
            e1 = source + u * (tproj - half)
            e2 = source + u * (tproj + half)
            th0 = cmath.phase(e1 - zi)
            th1 = cmath.phase(e2 - zi)
            thm = cmath.phase(normal)
            # sweep from th0 to th1 through the detour side thm
            ccw = (th1 - th0) % (2 * math.pi)
            if (thm - th0) % (2 * math.pi) < ccw:
                th1 = th0 + ccw
            else:
                th1 = th0 - ((th0 - th1) % (2 * math.pi))
            m = max(2, math.ceil(abs(th1 - th0) / (math.pi / 12)))
            rv = 1.01 * radius / math.cos(abs(th1 - th0) / (2 * m))
        pts.extend(_arc(zi, abs(e1 - zi), th0, th1, m))
    pts.append(target)
    return ContinuationPath(tuple(pts), clearance, eq)


def circle_loop(eq, center: complex, radius: float, base_angle: float = 0.0, n: int = 64,
                clearance: float | None = None) -> ContinuationPath:
    """Counter-clockwise closed polygon inscribed in a circle, starting at
    ``center + radius*exp(i*base_angle)``."""
    center = complex(center)
    pts = [center + radius * cmath.exp(1j * (base_angle + 2 * math.pi * j / n)) for j in range(n)]
    pts.append(pts[0])
    if clearance is None:
        clearance = min(default_clearance(eq), 0.5 * radius * math.cos(math.pi / n))
    return ContinuationPath(tuple(pts), clearance, eq)


def _rhs_factory(eq, za: complex, dz: complex):
    coeffs = eq.coefficients

    def rhs(t, y):
        p, r = coeffs(za + t * dz)
        return np.array([dz * y[1], -dz * (p * y[1] + r * y[0])])

    return rhs


def continue_along_path(eq, start: StatePair, path: ContinuationPath, tol: float = 1e-12,
                        diagnostics: dict | None = None) -> StatePair:
    """Continue the solution state ``start`` along ``path``.

    ``tol`` bounds the local error of every accepted step (relative, with an
    absolute floor scaled to the start state). If ``diagnostics`` is given it
    receives ``steps``, ``segments`` and a crude accumulated ``est_error``.
    """
    if start.z != path.start:
        raise InputError(f"start state is at {start.z}, path starts at {path.start}")
    path.check(eq)
    cap = max_steps()
    y = np.array([start.h, start.hp], dtype=complex)
    scale0 = max(abs(y[0]), abs(y[1]), 1e-300)
    atol = 1e-3 * tol * scale0
    steps = 0
    err = 0.0
    segs = path.segments
    for za, zb in segs:
        dz = zb - za
        solver = DOP853(_rhs_factory(eq, za, dz), 0.0, y, 1.0, rtol=tol, atol=atol)
        while solver.status == "running":
            msg = solver.step()
            steps += 1
            if steps > cap:
                raise StepLimitExceeded(f"more than {cap} steps along the path")
        if solver.status == "failed":
            raise SingularityTooClose(f"step size collapsed on segment {za} -> {zb}: {msg}")
        y = solver.y
        err += tol * float(np.max(np.abs(y)))
    if diagnostics is not None:
        diagnostics.update(steps=steps, segments=len(segs), est_error=err * max(1, steps) ** 0.5)
    return StatePair(path.end, complex(y[0]), complex(y[1]))


def abel_log_factor(eq, path: ContinuationPath) -> complex:
    """``log(W(end)/W(start))`` for any two solutions, from Abel's identity."""
    return -sum(eq.integrate_p(za, zb) for za, zb in path.segments)


def state_matrix(states) -> np.ndarray:
    """2x2 matrix with columns (h, h') of the two states."""
    return np.array([[s.h for s in states], [s.hp for s in states]], dtype=complex)


def monodromy_matrix(eq, basis, loop: ContinuationPath, tol: float = 1e-12, diagnostics: dict | None = None,
                     series_tol: float = 1e-15) -> np.ndarray:
    """Monodromy of a local basis around a closed loop.

    Returns ``M`` with ``continued basis = basis @ M`` at the base point, where
    the basis is evaluated on the principal branch at ``loop.start``.
    """
    if not loop.is_closed:
        raise InputError("monodromy needs a closed loop")
    s1, s2 = basis
    z0 = loop.start
    states = [StatePair.from_series(s, z0, series_tol) for s in (s1, s2)]
    phi0 = state_matrix(states)
    w0 = np.linalg.det(phi0)
    norm = np.prod(np.linalg.norm(phi0, axis=0))
    if abs(w0) <= 1e-12 * norm:
        raise DegenerateBasis(f"basis Wronskian {w0:.3g} vanishes at {z0}")
    diag: dict = {}
    ends = [continue_along_path(eq, s, loop, tol, diag) for s in states]
    M = np.linalg.solve(phi0, state_matrix(ends))
    predicted = cmath.exp(abel_log_factor(eq, loop))
    abel = abs(np.linalg.det(M) - predicted) / max(1.0, abs(predicted))
    if abel > 1e-6:
        warnings.warn(f"monodromy determinant misses Abel's identity by {abel:.2e}", RuntimeWarning)
    if diagnostics is not None:
        diagnostics.update(diag, abel_residual=abel, base_point=z0)
    return M
