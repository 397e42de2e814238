"""Parameter records for the general and confluent Heun equations.

General Heun equation (regular singular points 0, 1, a, infinity)::

    y'' + (gamma/z + delta/(z-1) + epsilon/(z-a)) y'
        + (alpha*beta*z - q) / (z (z-1) (z-a)) y = 0

with ``delta = alpha + beta - gamma - epsilon + 1`` so that infinity is a
regular singular point with exponents ``alpha`` and ``beta``.

Confluent Heun equation (regular at 0 and 1, irregular at infinity)::

    H'' + (alpha + (beta+1)/z + (gamma+1)/(z-1)) H' + (mu/z + nu/(z-1)) H = 0
"""

from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass, field
from typing import NamedTuple

from .errors import DegenerateParams, InputError

INFINITY = "infinity"

_INT_TOL = 1e-12


def _as_complex(name, value):
    try:
        if isinstance(value, (list, tuple)):
            re, im = value
            value = complex(float(re), float(im))
        value = complex(value)
    except (TypeError, ValueError) as exc:
        raise InputError(f"parameter {name!r} is not a complex number: {value!r}") from exc
    if not (math.isfinite(value.real) and math.isfinite(value.imag)):
        raise InputError(f"parameter {name!r} must be finite, got {value!r}")
    return value


def is_integer(x: complex, tol: float = _INT_TOL) -> bool:
    """True if ``x`` is (numerically) an integer."""
    x = complex(x)
    return abs(x.imag) <= tol and abs(x.real - round(x.real)) <= tol * max(1.0, abs(x.real))


def fuchs_delta(alpha, beta, gamma, epsilon) -> complex:
    """Exponent parameter at z=1 forced by regularity of infinity."""
    return complex(alpha) + complex(beta) - complex(gamma) - complex(epsilon) + 1


def _log_increment(za: complex, zb: complex, zi: complex) -> complex:
    # log(zb - zi) - log(za - zi) continued along the straight segment za -> zb
    ratio = (zb - zi) / (za - zi)
    return complex(math.log(abs(ratio)), cmath.phase(ratio))


class SingularityInfo(NamedTuple):
    location: complex | str
    kind: str
    exponents: tuple[complex, complex] | None
    degenerate: bool = False


def _pack(v: complex) -> list[float]:
    return [v.real, v.imag]


@dataclass(frozen=True)
class HeunParams:
    """Parameters of the general Heun equation.

    ``delta`` is derived from the other exponents and stored; it is never
    read back from input.
    """

    a: complex
    q: complex
    alpha: complex
    beta: complex
    gamma: complex
    epsilon: complex
    delta: complex = field(init=False)

    kind = "general"
    _keys = ("a", "q", "alpha", "beta", "gamma", "epsilon")

    def __post_init__(self):
        for name in self._keys:
            object.__setattr__(self, name, _as_complex(name, getattr(self, name)))
        if abs(self.a) == 0.0 or self.a == 1.0:
            raise DegenerateParams(f"a = {self.a} coalesces with a fixed singular point")
        object.__setattr__(
            self, "delta", fuchs_delta(self.alpha, self.beta, self.gamma, self.epsilon)
        )

    @property
    def singular_points(self) -> tuple[complex, ...]:
        """Finite singular points, in the order 0, 1, a."""
        return (0j, 1 + 0j, self.a)

    @property
    def pole_residues(self) -> tuple[tuple[complex, complex], ...]:
        """(location, residue) of the simple poles of the y' coefficient."""
        return ((0j, self.gamma), (1 + 0j, self.delta), (self.a, self.epsilon))

    def coefficients(self, z: complex) -> tuple[complex, complex]:
        """Return ``(p, r)`` with ``y'' + p y' + r y = 0`` at ``z``."""
        z1 = z - 1
        za = z - self.a
        p = self.gamma / z + self.delta / z1 + self.epsilon / za
        r = (self.alpha * self.beta * z - self.q) / (z * z1 * za)
        return p, r

    def integrate_p(self, za: complex, zb: complex) -> complex:
        """Exact integral of the y' coefficient along the segment za -> zb."""
        return sum(res * _log_increment(za, zb, zi) for zi, res in self.pole_residues)

    def to_dict(self) -> dict:
        d = {k: _pack(getattr(self, k)) for k in self._keys}
        d["delta"] = _pack(self.delta)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "HeunParams":
        missing = [k for k in cls._keys if k not in d]
        if missing:
            raise InputError(f"missing general Heun parameters: {missing}")
        return cls(**{k: d[k] for k in cls._keys})

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "HeunParams":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class ConfluentParams:
    """Parameters of the confluent Heun equation; all five are free."""

    alpha: complex
    beta: complex
    gamma: complex
    mu: complex
    nu: complex

    kind = "confluent"
    _keys = ("alpha", "beta", "gamma", "mu", "nu")

    def __post_init__(self):
        for name in self._keys:
            object.__setattr__(self, name, _as_complex(name, getattr(self, name)))

    @property
    def singular_points(self) -> tuple[complex, ...]:
        return (0j, 1 + 0j)

    @property
    def pole_residues(self) -> tuple[tuple[complex, complex], ...]:
        return ((0j, self.beta + 1), (1 + 0j, self.gamma + 1))

    def coefficients(self, z: complex) -> tuple[complex, complex]:
        """Return ``(p, r)`` with ``H'' + p H' + r H = 0`` at ``z``."""
        z1 = z - 1
        p = self.alpha + (self.beta + 1) / z + (self.gamma + 1) / z1
        r = self.mu / z + self.nu / z1
        return p, r

    def integrate_p(self, za: complex, zb: complex) -> complex:
        """Exact integral of the H' coefficient along the segment za -> zb."""
        total = self.alpha * (zb - za)
        return total + sum(res * _log_increment(za, zb, zi) for zi, res in self.pole_residues)

    def to_dict(self) -> dict:
        return {k: _pack(getattr(self, k)) for k in self._keys}

    @classmethod
    def from_dict(cls, d: dict) -> "ConfluentParams":
        missing = [k for k in cls._keys if k not in d]
        if missing:
            raise InputError(f"missing confluent Heun parameters: {missing}")
        return cls(**{k: d[k] for k in cls._keys})

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "ConfluentParams":
        return cls.from_dict(json.loads(text))


def params_from_dict(d: dict) -> HeunParams | ConfluentParams:
    """Build whichever parameter record the keys of ``d`` describe."""
    if "mu" in d or "nu" in d:
        return ConfluentParams.from_dict(d)
    return HeunParams.from_dict(d)


def classify_singularities(params: HeunParams | ConfluentParams) -> list[SingularityInfo]:
    """List the singular points with their kind and characteristic exponents.

    Order is always 0, 1, a, infinity (general) or 0, 1, infinity
    (confluent). A pair whose difference is an integer is flagged as
    ``degenerate`` since the second local solution may then be logarithmic.
    """

    def info(loc, e1, e2):
        return SingularityInfo(loc, "regular", (complex(e1), complex(e2)), is_integer(e1 - e2))

    if isinstance(params, HeunParams):
        return [
            info(0j, 0, 1 - params.gamma),
            info(1 + 0j, 0, 1 - params.delta),
            info(params.a, 0, 1 - params.epsilon),
            info(INFINITY, params.alpha, params.beta),
        ]
    if isinstance(params, ConfluentParams):
        return [
            info(0j, 0, -params.beta),
            info(1 + 0j, 0, -params.gamma),
            SingularityInfo(INFINITY, "irregular", None, False),
        ]
    raise TypeError(f"unsupported parameter record: {type(params).__name__}")
