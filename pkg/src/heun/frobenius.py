"""Local Frobenius solutions about the finite regular singular points.

Every local solution is computed from a single recurrence per equation
about z=0. Expansions about the other finite singular points go through an
affine change of variable ``z = z0 + s*w`` that maps the equation back to
canonical form with the expansion point at w=0; the second exponent branch
is obtained by factoring ``w**sigma`` out, which again yields an equation of
the same class.

The stored solution is::

    (z - z0)**sigma * sum_k coeffs[k] * (z - z0)**k

with the principal branch of the power. Coefficients are stored in powers
of ``z - z0`` (not the scaled local variable).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateParams, LogarithmicCase, NotConverged, OutsideDisc
from .params import ConfluentParams, HeunParams, is_integer

#: evaluation is refused beyond this fraction of the convergence radius
DISC_CAP = 0.9
#: inflation applied to the observed term ratio in the geometric tail bound
RATIO_INFLATION = 1.25
_RATIO_WINDOW = 8
DEFAULT_TERMS = 600


@dataclass(frozen=True)
class FrobeniusSolution:
    equation: HeunParams | ConfluentParams
    point: str
    expansion_point: complex
    exponent: complex
    coeffs: np.ndarray
    radius: float
    branch: str

    def __post_init__(self):
        self.coeffs.setflags(write=False)

    @property
    def n_terms(self) -> int:
        return len(self.coeffs)

    def extended(self, n: int) -> "FrobeniusSolution":
        """Same local solution with ``n`` coefficients."""
        return local_solution(self.equation, self.point, self.branch, n)


@dataclass(frozen=True)
class EvalResult:
    value: complex
    derivative: complex
    est_error: float
    n_terms_used: int
    second_derivative: complex = 0j

    def to_dict(self) -> dict:
        return {
            "value": [self.value.real, self.value.imag],
            "derivative": [self.derivative.real, self.derivative.imag],
            "est_error": self.est_error,
            "n_terms": self.n_terms_used,
        }


# --- point handling -------------------------------------------------------


def point_label(params, point) -> str:
    """Normalize a singular-point designation to one of '0', '1', 'a'."""
    if isinstance(point, str):
        label = point.strip()
        if label in ("0", "1") or (label == "a" and isinstance(params, HeunParams)):
            return label
        try:
            point = complex(label.replace(" ", ""))
        except ValueError:
            raise DegenerateParams(f"unknown singular point {point!r}") from None
    point = complex(point)
    if point == 0:
        return "0"
    if point == 1:
        return "1"
    if isinstance(params, HeunParams) and point == params.a:
        return "a"
    raise DegenerateParams(f"{point} is not a finite singular point of the equation")


def point_location(params, label: str) -> complex:
    return {"0": 0j, "1": 1 + 0j}.get(label) if label != "a" else params.a


def convergence_radius(params, label: str) -> float:
    z0 = point_location(params, label)
    return min(abs(z0 - zi) for zi in params.singular_points if zi != z0)


# --- canonical forms ------------------------------------------------------


def _general_local(p: HeunParams, label: str):
    """Canonical params (point mapped to w=0), expansion point and scale."""
    if label == "0":
        return p, 0j, 1 + 0j
    ab = p.alpha * p.beta
    if label == "1":
        # z = 1 - w swaps 0 and 1; a -> 1 - a
        return HeunParams(1 - p.a, ab - p.q, p.alpha, p.beta, p.delta, p.epsilon), 1 + 0j, -1 + 0j
    # z = a + (1 - a) w keeps 1 fixed and sends 0 to a/(a-1)
    s = 1 - p.a
    canon = HeunParams(p.a / (p.a - 1), (p.q - ab * p.a) / s, p.alpha, p.beta, p.epsilon, p.gamma)
    return canon, p.a, s


def _general_shift(p: HeunParams) -> HeunParams:
    # w**(1-gamma) factored out
    g1 = 1 - p.gamma
    return HeunParams(
        p.a, p.q + (p.a * p.delta + p.epsilon) * g1, p.alpha + g1, p.beta + g1, 2 - p.gamma, p.epsilon
    )


def _general_recurrence(p: HeunParams, n: int) -> np.ndarray:
    a, q, al, be, g, d, e = p.a, p.q, p.alpha, p.beta, p.gamma, p.delta, p.epsilon
    c = np.zeros(n, dtype=complex)
    c[0] = 1.0
    prev, cur = 0j, 1 + 0j
    for k in range(n - 1):
        nxt = ((k * ((k - 1 + g) * (1 + a) + a * d + e) + q) * cur - (k - 1 + al) * (k - 1 + be) * prev) / (
            a * (k + 1) * (k + g)
        )
        c[k + 1] = nxt
        prev, cur = cur, nxt
    return c


def _confluent_local(p: ConfluentParams, label: str):
    if label == "0":
        return p, 0j, 1 + 0j
    # z = 1 - w
    return ConfluentParams(-p.alpha, p.gamma, p.beta, -p.nu, -p.mu), 1 + 0j, -1 + 0j


def _confluent_shift(p: ConfluentParams) -> ConfluentParams:
    # w**(-beta) factored out
    return ConfluentParams(
        p.alpha,
        -p.beta,
        p.gamma,
        p.mu - p.alpha * p.beta + p.beta * (p.gamma + 1),
        p.nu - p.beta * (p.gamma + 1),
    )


def _confluent_recurrence(p: ConfluentParams, n: int) -> np.ndarray:
    al, be, g, mu, nu = p.alpha, p.beta, p.gamma, p.mu, p.nu
    c = np.zeros(n, dtype=complex)
    c[0] = 1.0
    prev, cur = 0j, 1 + 0j
    for k in range(n - 1):
        nxt = ((k * (k + be + g + 1 - al) - mu) * cur + (al * (k - 1) + mu + nu) * prev) / (
            (k + 1) * (k + be + 1)
        )
        c[k + 1] = nxt
        prev, cur = cur, nxt
    return c


def _rescale(c_w: np.ndarray, s: complex) -> np.ndarray:
    # coefficients in w = (z - z0)/s  ->  coefficients in (z - z0)
    if s == 1:
        return c_w
    return c_w * (1 / s) ** np.arange(len(c_w))


def _check_branch(branch: str):
    if branch not in ("first", "second"):
        raise ValueError(f"branch must be 'first' or 'second', got {branch!r}")


def general_series(params: HeunParams, point="0", branch: str = "first", n: int = DEFAULT_TERMS):
    """Frobenius solution of the general Heun equation about 0, 1 or a.

    ``branch='first'`` carries exponent 0, ``'second'`` the nonzero exponent
    (1-gamma, 1-delta or 1-epsilon at 0, 1, a respectively). Integer
    exponent differences raise :class:`LogarithmicCase` whenever the
    requested branch would need a logarithm.
    """
    _check_branch(branch)
    if n < 2:
        raise ValueError("need at least two coefficients")
    if not isinstance(params, HeunParams):
        raise TypeError("general_series needs HeunParams")
    label = point_label(params, point)
    canon, z0, s = _general_local(params, label)
    exponent = 0j
    if branch == "first":
        if is_integer(canon.gamma) and canon.gamma.real < 0.5:
            raise LogarithmicCase(f"exponent-0 branch at {label} is logarithmic (gamma'={canon.gamma})")
    else:
        if is_integer(canon.gamma):
            raise LogarithmicCase(f"exponent difference at {label} is an integer ({1 - canon.gamma})")
        exponent = 1 - canon.gamma
        canon = _general_shift(canon)
    c = _rescale(_general_recurrence(canon, n), s)
    return FrobeniusSolution(params, label, z0, exponent, c, convergence_radius(params, label), branch)


def confluent_series(params: ConfluentParams, point="0", branch: str = "first", n: int = DEFAULT_TERMS):
    """Frobenius solution of the confluent Heun equation about 0 or 1.

    Exponents are {0, -beta} at 0 and {0, -gamma} at 1.
    """
    _check_branch(branch)
    if n < 2:
        raise ValueError("need at least two coefficients")
    if not isinstance(params, ConfluentParams):
        raise TypeError("confluent_series needs ConfluentParams")
    label = point_label(params, point)
    canon, z0, s = _confluent_local(params, label)
    exponent = 0j
    if branch == "first":
        if is_integer(canon.beta) and canon.beta.real < -0.5:
            raise LogarithmicCase(f"exponent-0 branch at {label} is logarithmic (beta'={canon.beta})")
    else:
        if is_integer(canon.beta):
            raise LogarithmicCase(f"exponent difference at {label} is an integer ({canon.beta})")
        exponent = -canon.beta
        canon = _confluent_shift(canon)
    c = _rescale(_confluent_recurrence(canon, n), s)
    return FrobeniusSolution(params, label, z0, exponent, c, convergence_radius(params, label), branch)


def local_solution(params, point="0", branch: str = "first", n: int = DEFAULT_TERMS) -> FrobeniusSolution:
    """Dispatch to :func:`general_series` or :func:`confluent_series`."""
    if isinstance(params, HeunParams):
        return general_series(params, point, branch, n)
    return confluent_series(params, point, branch, n)


def local_basis(params, point="0", n: int = DEFAULT_TERMS) -> tuple[FrobeniusSolution, FrobeniusSolution]:
    return local_solution(params, point, "first", n), local_solution(params, point, "second", n)


# --- evaluation -----------------------------------------------------------


def _csum(terms: np.ndarray) -> complex:
    return complex(math.fsum(terms.real), math.fsum(terms.imag))


def _tail_bounds(mag: np.ndarray, floor_ratio: float) -> np.ndarray:
    """Geometric tail bound after each partial sum (inf where unusable).

    The decay rate is read off the envelope (running maximum over a window)
    so that isolated near-zero terms cannot fake a fast or slow decay.
    """
    n = len(mag)
    W = _RATIO_WINDOW
    bound = np.full(n, np.inf)
    if n < 2 * W:
        return bound
    env = np.lib.stride_tricks.sliding_window_view(mag, W).max(axis=1)  # env[j] covers j..j+W-1
    cur, prev = env[W:], env[:-W]
    with np.errstate(divide="ignore", invalid="ignore"):
        r = (cur / prev) ** (1.0 / W)
    r = np.where(cur == 0, 0.0, r)
    # inflate, but never past the midpoint between the estimate and 1
    r = np.maximum(np.minimum(RATIO_INFLATION * r, 0.5 * (1 + r)), floor_ratio)
    with np.errstate(invalid="ignore"):
        b = np.where(r < 1, cur * r / (1 - r), np.inf)
    b = np.where(cur == 0, 0.0, b)
    bound[2 * W - 1 :] = b
    return bound


def eval_series(sol: FrobeniusSolution, z: complex, tol: float = 1e-14) -> EvalResult:
    """Sum a local solution and its first two derivatives at ``z``.

    Terms are added until the geometric tail bound on both the value and
    the derivative drops below ``tol * max(1, |value|)``. Points further than
    ``DISC_CAP * radius`` from the expansion point are refused.
    """
    z = complex(z)
    t = z - sol.expansion_point
    dist = abs(t)
    if dist > DISC_CAP * sol.radius * (1 + 1e-12):
        raise OutsideDisc(
            f"|z - z0| = {dist:.6g} exceeds {DISC_CAP} x radius {sol.radius:.6g}; use continuation"
        )
    c = sol.coeffs
    sigma = sol.exponent
    if dist == 0.0:
        if sigma != 0:
            raise OutsideDisc("cannot evaluate a non-analytic branch at its expansion point")
        return EvalResult(complex(c[0]), complex(c[1]), 0.0, 1, complex(2 * c[2]) if len(c) > 2 else 0j)

    n = len(c)
    k = np.arange(n)
    tp = np.empty(n, dtype=complex)
    tp[0] = 1.0
    tp[1:] = t
    tp = np.cumprod(tp)
    terms = c * tp
    dterms = np.zeros(n, dtype=complex)
    dterms[1:] = k[1:] * c[1:] * tp[:-1]
    ddterms = np.zeros(n, dtype=complex)
    ddterms[2:] = k[2:] * (k[2:] - 1) * c[2:] * tp[:-2]

    pref = 1 + 0j if sigma == 0 else cmath.exp(sigma * cmath.log(t))
    floor = dist / sol.radius
    scale = abs(pref)
    bv = _tail_bounds(np.abs(terms), floor) * scale
    bd = _tail_bounds(np.abs(dterms), floor) * scale
    if sigma != 0:
        bd = bd + abs(sigma) / dist * bv
    sv = np.abs(np.cumsum(terms)) * scale
    sd = np.abs(np.cumsum(dterms)) * scale
    ok = (bv <= tol * np.maximum(1.0, sv)) & (bd <= tol * np.maximum(1.0, sd))
    idx = np.flatnonzero(ok)
    if len(idx) == 0:
        raise NotConverged(f"tail bound above {tol:g} after {n} terms at |z-z0|/R = {floor:.3f}")
    N = int(idx[0]) + 1
    S, dS, ddS = _csum(terms[:N]), _csum(dterms[:N]), _csum(ddterms[:N])
    if sigma == 0:
        value, deriv, second = S, dS, ddS
    else:
        value = pref * S
        deriv = pref * (sigma * S / t + dS)
        second = pref * (sigma * (sigma - 1) * S / t**2 + 2 * sigma * dS / t + ddS)
    return EvalResult(value, deriv, float(bv[N - 1]), N, second)
