"""Two-point spectral problems for the confluent Heun equation.

The application is the Regge-Wheeler equation for perturbations of spin
weight ``s`` of a Schwarzschild black hole of mass ``M`` (G = c = 1, time
dependence ``exp(-i omega t)``)::

    d^2 Psi/dr*^2 + (omega^2 - V) Psi = 0,
    V = (1 - 2M/r) (l(l+1)/r^2 + 2 (1 - s^2) M / r^3)

With ``z = r/(2M)``, ``Omega = 2 M omega`` and::

    Psi = z**(1+s) (z-1)**(-i Omega) exp(i Omega z) H(z)

``H`` solves the confluent Heun equation with::

    alpha = 2i Omega,  beta = 2s,  gamma = -2i Omega,
    mu = l(l+1) - s(s+1) + 2i Omega (2s+1),
    nu = -l(l+1) + s(s+1) + 4 Omega^2 - 2i Omega s

The exponent-0 Frobenius branch at z=1 is the wave falling into the
horizon; the power-law Thome solution at infinity is the outgoing wave.
Quasinormal frequencies are the zeros of the normalized Wronskian of those
two solutions at a matching point.
"""

from __future__ import annotations

import cmath
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .connection import wronskian
from .continuation import ContinuationPath, StatePair, continue_along_path
from .errors import AsymptoticNotConverged, DerivationInconsistent, InputError, NumericalError
from .frobenius import DEFAULT_TERMS, confluent_series, convergence_radius, eval_series, point_label, point_location
from .params import ConfluentParams

log = logging.getLogger(__name__)

Z_MATCH = 5.0
THOME_MAX_TERMS = 60
R_MAX = 50.0
R_GROWTH = 1.5
#: outer path keeps at least this angle away from the negative real axis
_RAY_MARGIN = 0.35


@dataclass(frozen=True)
class RWProblem:
    """Regge-Wheeler quasinormal-mode problem.

    ``rho`` is the ratio outgoing/ingoing of the two horizon Frobenius
    branches. With ``r_surface`` set, the two branches are normalized to
    equal amplitude at ``r = r_surface`` before mixing; otherwise ``rho``
    multiplies the branch with unit leading coefficient directly.
    """

    M: float = 1.0
    ell: int = 2
    s: int = 2
    rho: complex = 0j
    r_surface: float | None = None

    def __post_init__(self):
        if not (self.M > 0 and math.isfinite(self.M)):
            raise InputError("mass must be positive")
        if int(self.ell) != self.ell or int(self.s) != self.s:
            raise InputError("ell and s must be integers")
        if self.ell < 2 or self.ell < abs(self.s):
            raise InputError(f"need ell >= max(2, |s|), got ell={self.ell}, s={self.s}")
        object.__setattr__(self, "rho", complex(self.rho))
        if abs(self.rho) > 1:
            raise InputError("|rho| must not exceed 1")
        if self.r_surface is not None and not self.r_surface > 2 * self.M:
            raise InputError("the reflecting surface must lie outside r = 2M")

    @property
    def z_surface(self) -> float | None:
        return None if self.r_surface is None else self.r_surface / (2 * self.M)

    def with_mass(self, M: float) -> "RWProblem":
        rs = None if self.r_surface is None else self.r_surface * M / self.M
        return RWProblem(M, self.ell, self.s, self.rho, rs)


@dataclass(frozen=True)
class RWTransform:
    """``Psi = z**sigma0 (z-1)**sigma1 exp(kappa z) H`` with ``z = r/2M``."""

    Omega: complex
    sigma0: complex
    sigma1: complex
    kappa: complex

    def log_prefactor_derivative(self, z):
        return self.sigma0 / z + self.sigma1 / (z - 1) + self.kappa

    def prefactor(self, z: complex) -> complex:
        return cmath.exp(self.sigma0 * cmath.log(z) + self.sigma1 * cmath.log(z - 1) + self.kappa * z)


def _rw_coefficients(prob: RWProblem, Omega, z):
    L = prob.ell * (prob.ell + 1)
    a1 = 1 / (z * (z - 1))
    a0 = Omega**2 * z**2 / (z - 1) ** 2 - (L * z + 1 - prob.s**2) / (z**2 * (z - 1))
    return a1, a0


# fixed probe points for the transformation self-check
_PROBES = 0.3 + 4 * np.random.default_rng(20240611).random(20) + 1j * (np.random.default_rng(7).random(20) - 0.5) * 4


def rw_to_confluent(prob: RWProblem, omega: complex, check: bool = True) -> tuple[ConfluentParams, RWTransform]:
    """Confluent Heun parameters of the Regge-Wheeler problem at ``omega``."""
    omega = complex(omega)
    if omega == 0:
        raise InputError("omega = 0 is excluded")
    W = 2 * prob.M * omega
    s = prob.s
    L = prob.ell * (prob.ell + 1)
    iW = 1j * W
    params = ConfluentParams(
        alpha=2 * iW,
        beta=2 * s,
        gamma=-2 * iW,
        mu=L - s * (s + 1) + 2 * iW * (2 * s + 1),
        nu=-L + s * (s + 1) + 4 * W * W - 2 * iW * s,
    )
    tr = RWTransform(W, 1 + s, -iW, iW)
    if check:
        _check_transform(prob, params, tr)
    return params, tr


def _check_transform(prob, params, tr):
    # Psi = P H turns the RW operator into P * (confluent operator); compare
    # the first- and zeroth-order coefficients at fixed probe points.
    z = _PROBES
    a1, a0 = _rw_coefficients(prob, tr.Omega, z)
    lp = tr.log_prefactor_derivative(z)
    lpp = -tr.sigma0 / z**2 - tr.sigma1 / (z - 1) ** 2 + lp**2
    p_rw = 2 * lp + a1
    r_rw = lpp + a1 * lp + a0
    p_h = params.alpha + (params.beta + 1) / z + (params.gamma + 1) / (z - 1)
    r_h = params.mu / z + params.nu / (z - 1)
    scale = np.abs(p_rw) + np.abs(r_rw) + 1
    res = float(np.max((np.abs(p_rw - p_h) + np.abs(r_rw - r_h)) / scale))
    if res > 1e-9:
        raise DerivationInconsistent(f"Regge-Wheeler to confluent Heun map leaves residual {res:.3g}")


# --- irregular point ------------------------------------------------------


@dataclass(frozen=True)
class ThomeExpansion:
    """Formal solution ``exp(c z) z**lam sum_k coeffs[k] z**-k`` at infinity.

    ``kind='dominant'`` is the power-law solution (``c = 0``);
    ``kind='recessive'`` carries ``exp(-alpha z)``. The names refer to rays
    with ``Re(alpha z) > 0``; on the opposite rays the roles swap.
    """

    kind: str
    exponent: complex
    exp_coeff: complex
    coeffs: np.ndarray
    params: ConfluentParams

    @property
    def prefactor_exponents(self) -> tuple[complex, complex]:
        return self.exponent, self.exp_coeff


def _power_thome(p: ConfluentParams, K: int):
    if p.alpha == 0:
        raise AsymptoticNotConverged("alpha = 0: infinity is not an irregular point of this form")
    A = p.alpha
    B = p.beta + p.gamma + 2 - p.alpha
    C = p.beta + 1
    F = p.mu
    lam = -(p.mu + p.nu) / A
    d = np.zeros(K + 1, dtype=complex)
    d[0] = 1.0
    for j in range(1, K + 1):
        m1 = lam - j + 1
        m2 = lam - j + 2
        prev2 = d[j - 2] if j >= 2 else 0j
        d[j] = ((m1 * (m1 - 1) + B * m1 - F) * d[j - 1] - m2 * (m2 - 1 + C) * prev2) / (A * j)
    return lam, d


def thome_expansion(params: ConfluentParams, kind: str = "dominant", K: int = THOME_MAX_TERMS) -> ThomeExpansion:
    """Formal asymptotic solution at infinity, truncated at ``K`` terms."""
    if kind == "dominant":
        lam, d = _power_thome(params, K)
        return ThomeExpansion(kind, lam, 0j, d, params)
    if kind == "recessive":
        # H = exp(-alpha z) G, G solves the same class with alpha -> -alpha
        a = params.alpha
        g = ConfluentParams(-a, params.beta, params.gamma, params.mu - a * (params.beta + 1),
                            params.nu - a * (params.gamma + 1))
        lam, d = _power_thome(g, K)
        return ThomeExpansion(kind, lam, -a, d, params)
    raise ValueError(f"kind must be 'dominant' or 'recessive', got {kind!r}")


def eval_thome(exp: ThomeExpansion, z: complex) -> tuple[StatePair, float, int]:
    """Evaluate at ``z`` truncated before the smallest term.

    Returns the state, the smallest-term magnitude (relative error
    estimate) and the number of terms summed.
    """
    z = complex(z)
    d = exp.coeffs
    k = np.arange(len(d))
    zinv = 1 / z
    pw = zinv ** k
    terms = d * pw
    mags = np.abs(terms)
    # envelope over three terms: an isolated vanishing coefficient (integer
    # exponents make this common) must not pass for the optimal truncation
    env = np.lib.stride_tricks.sliding_window_view(np.append(mags, [np.inf, np.inf]), 3).max(axis=1)
    kstar = int(np.argmin(env[1 : len(d)])) + 1
    S = complex(np.sum(terms[:kstar]))
    dS = complex(np.sum(-k[:kstar] * terms[:kstar])) * zinv
    lam, c = exp.exponent, exp.exp_coeff
    pref = cmath.exp(c * z + lam * cmath.log(z))
    h = pref * S
    hp = pref * ((c + lam * zinv) * S + dS)
    return StatePair(z, h, hp), float(env[kstar]), kstar


def recessive_direction(params: ConfluentParams, kind: str) -> float:
    """Ray angle on which the ``kind`` solution is maximally recessive,
    clamped away from the negative real axis."""
    arg_a = cmath.phase(params.alpha)
    phi = math.pi - arg_a if kind == "dominant" else -arg_a
    phi = math.remainder(phi, 2 * math.pi)
    lim = math.pi - _RAY_MARGIN
    return max(-lim, min(lim, phi))


# --- boundary states ------------------------------------------------------


def _straight(params, a, b, clearance=0.1):
    return ContinuationPath((complex(a), complex(b)), clearance, params)


def boundary_solution(params: ConfluentParams, end: str, condition: str = "recessive_at_infinity", *,
                      kind: str = "dominant", point="1", branch: str = "first", rho: complex = 0j,
                      z_surface: float | None = None, z_match: complex = Z_MATCH, tol: float = 1e-12,
                      thome_tol: float | None = None, R: float | None = None,
                      n_terms: int = DEFAULT_TERMS, diagnostics: dict | None = None) -> StatePair:
    """State at ``z_match`` of the solution fixed by one boundary condition.

    ``end='infinity'`` with ``condition='recessive_at_infinity'``: the Thome
    solution ``kind`` is evaluated at ``R exp(i phi)`` on its recessive ray
    (``R`` grown geometrically until the smallest term is below
    ``thome_tol``) and continued along a straight line to ``z_match``.

    ``end='regular_point'``: the Frobenius branch (``condition=
    'exponent_branch'``) or the mixture ``first + rho*second``
    (``condition='mixed'``) at ``point`` is seeded at half the convergence
    radius towards ``z_match`` and continued there.
    """
    thome_tol = tol if thome_tol is None else thome_tol
    z_match = complex(z_match)
    info: dict = {}
    if end == "infinity":
        if condition != "recessive_at_infinity":
            raise InputError(f"condition {condition!r} does not apply at infinity")
        exp = thome_expansion(params, kind)
        phi = recessive_direction(params, kind)
        radius = R if R is not None else max(10.0, 2 * abs(z_match))
        while True:
            z_far = radius * cmath.exp(1j * phi)
            seed, err, nterm = eval_thome(exp, z_far)
            if err <= thome_tol or R is not None:
                break
            if radius >= R_MAX:
                raise AsymptoticNotConverged(
                    f"smallest Thome term {err:.3g} above {thome_tol:g} at R = {radius:g}"
                )
            radius = min(R_MAX, radius * R_GROWTH)
        info.update(R=radius, phi=phi, thome_error=err, thome_terms=nterm)
        path = _straight(params, z_far, z_match)
    elif end == "regular_point":
        label = point_label(params, point)
        z0 = point_location(params, label)
        rad = convergence_radius(params, label)
        u = (z_match - z0) / abs(z_match - z0)
        z_seed = z0 + 0.5 * rad * u
        if condition == "exponent_branch":
            sol = confluent_series(params, label, branch, n_terms)
            seed = StatePair.from_series(sol, z_seed)
        elif condition == "mixed":
            first = confluent_series(params, label, "first", n_terms)
            second = confluent_series(params, label, "second", n_terms)
            s1 = StatePair.from_series(first, z_seed)
            s2 = StatePair.from_series(second, z_seed)
            c = complex(rho)
            if z_surface is not None and c != 0:
                zs = complex(z_surface)
                if abs(zs - z0) <= 0.9 * rad:
                    v1 = eval_series(first, zs).value
                    v2 = eval_series(second, zs).value
                else:
                    p_s = _straight(params, z_seed, zs)
                    v1 = continue_along_path(params, s1, p_s, tol).h
                    v2 = continue_along_path(params, s2, p_s, tol).h
                c = c * v1 / v2
            seed = StatePair(z_seed, s1.h + c * s2.h, s1.hp + c * s2.hp)
            info.update(mixing=c)
        else:
            raise InputError(f"unknown boundary condition {condition!r}")
        path = _straight(params, z_seed, z_match)
    else:
        raise InputError(f"end must be 'regular_point' or 'infinity', got {end!r}")
    diag: dict = {}
    out = continue_along_path(params, seed, path, tol, diag)
    if diagnostics is not None:
        diagnostics.update(info, **diag)
    return out


def _norm(s: StatePair) -> float:
    return math.hypot(abs(s.h), abs(s.hp))


def matching_determinant(prob: RWProblem, omega: complex, tol: float = 1e-12, z_match: complex = Z_MATCH,
                         diagnostics: dict | None = None) -> complex:
    """Normalized Wronskian of the horizon and outgoing solutions.

    Scale-free: ``W / (|inner| |outer|)`` with ``|.|`` the Euclidean norm of
    the state ``(H, H')`` at ``z_match``. Vanishes exactly at the modes.
    """
    params, _ = rw_to_confluent(prob, omega)
    if prob.rho == 0:
        inner = boundary_solution(params, "regular_point", "exponent_branch", point="1", branch="first",
                                  z_match=z_match, tol=tol)
    else:
        inner = boundary_solution(params, "regular_point", "mixed", point="1", rho=prob.rho,
                                  z_surface=prob.z_surface, z_match=z_match, tol=tol)
    outer_diag: dict = {}
    outer = boundary_solution(params, "infinity", "recessive_at_infinity", kind="dominant",
                              z_match=z_match, tol=tol, diagnostics=outer_diag)
    D = wronskian(params, inner, outer) / (_norm(inner) * _norm(outer))
    if diagnostics is not None:
        diagnostics.update(outer_diag)
    return D


# --- root finding ---------------------------------------------------------


@dataclass(frozen=True)
class Mode:
    omega: complex
    overtone_hint: int
    residual: float
    newton_steps: int

    def to_dict(self) -> dict:
        return {
            "omega": [self.omega.real, self.omega.imag],
            "overtone_hint": self.overtone_hint,
            "residual": self.residual,
            "newton_steps": self.newton_steps,
        }


@dataclass
class ScanResult:
    """Grid scan of ``|D|`` over a rectangle (frequencies in 1/M units)."""

    re: np.ndarray
    im: np.ndarray
    absD: np.ndarray
    modes: list[Mode] = field(default_factory=list)
    dropped: int = 0


def _dimless_det(args):
    prob, x, tol, z_match = args
    try:
        return matching_determinant(prob.with_mass(1.0), x, tol, z_match)
    except NumericalError as exc:
        log.debug("D undefined at M*omega=%s: %s", x, exc)
        return complex("nan")


def _local_minima(A: np.ndarray) -> list[tuple[int, int]]:
    """Grid nodes that are minima of ``A`` in 2D or along their row.

    ``|D|`` falls off steadily with ``|Im omega|`` (rows are lines of constant
    ``Im omega``), which can hide a root from 2D minima alone.
    """
    ny, nx = A.shape
    out = []
    for j in range(ny):
        for i in range(nx):
            v = A[j, i]
            if not np.isfinite(v):
                continue
            nb = A[max(0, j - 1) : j + 2, max(0, i - 1) : i + 2]
            row = A[j, max(0, i - 1) : i + 2]
            if np.all(~np.isfinite(nb) | (nb >= v)) or np.all(~np.isfinite(row) | (row >= v)):
                out.append((j, i))
    return out


def _polish(prob, x0, tol, cont_tol, z_match, bounds, max_iter=40):
    """Newton with a central-difference derivative, secant when noisy."""
    f = lambda x: _dimless_det((prob, x, cont_tol, z_match))
    (xlo, xhi), step_cap = bounds
    x = complex(x0)
    fx = f(x)
    x_prev, f_prev = None, None
    noise = 100 * cont_tol
    for it in range(1, max_iter + 1):
        if not np.isfinite(fx):
            return None
        h = 1e-7 * abs(x)
        fp, fm = f(x + h), f(x - h)
        diff = fp - fm
        if abs(diff) >= 10 * noise and np.isfinite(diff):
            deriv = diff / (2 * h)
        elif x_prev is not None and x_prev != x:
            deriv = (fx - f_prev) / (x - x_prev)
        else:
            h2 = 1e-4 * abs(x)
            deriv = (f(x + h2) - fx) / h2
        if deriv == 0 or not np.isfinite(deriv):
            return None
        dx = -fx / deriv
        if abs(dx) > step_cap:
            dx *= step_cap / abs(dx)
        x_prev, f_prev = x, fx
        x = x + dx
        if not (xlo.real <= x.real <= xhi.real and xlo.imag <= x.imag <= xhi.imag):
            return None
        fx = f(x)
        if abs(dx) <= 1e-13 * abs(x) + 1e-15 and abs(fx) <= tol:
            return x, abs(fx), it
    if np.isfinite(fx) and abs(fx) <= tol:
        return x, abs(fx), max_iter
    return None


def find_modes(prob: RWProblem, region: tuple[complex, complex], grid: tuple[int, int] = (8, 8),
               tol: float = 1e-9, cont_tol: float = 1e-12, z_match: complex = Z_MATCH,
               workers: int | None = None, diagnostics: dict | None = None) -> list[Mode]:
    """Quasinormal frequencies inside the rectangle ``region = (lower_left, upper_right)``.

    ``|D|`` is sampled on a ``grid`` of nodes; every local minimum seeds a
    Newton polish. Converged roots (``|D| <= tol``) inside the rectangle are
    deduplicated at distance 1e-6 and returned sorted by ``|Im omega|``.
    The search runs in the dimensionless variable ``M*omega`` so that the
    output scales exactly as ``1/M``.
    """
    lo, hi = complex(region[0]), complex(region[1])
    nx, ny = grid
    if nx < 8 or ny < 8:
        raise InputError("grid must be at least 8x8")
    if not (lo.real < hi.real and lo.imag < hi.imag):
        raise InputError("region must be (lower_left, upper_right)")
    if lo.real <= 0 <= hi.real and lo.imag <= 0 <= hi.imag:
        raise InputError("region must exclude omega = 0")
    M = prob.M
    xlo, xhi = lo * M, hi * M
    xs = np.linspace(xlo.real, xhi.real, nx)
    ys = np.linspace(xlo.imag, xhi.imag, ny)
    nodes = [complex(x, y) for y in ys for x in xs]
    jobs = [(prob, x, cont_tol, z_match) for x in nodes]
    if workers and workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            vals = list(pool.map(_dimless_det, jobs))
    else:
        vals = [_dimless_det(j) for j in jobs]
    A = np.abs(np.array(vals)).reshape(ny, nx)
    spacing = max(xs[1] - xs[0], ys[1] - ys[0])
    pad = complex(spacing, spacing)
    roots: list[tuple[complex, float, int]] = []
    dropped = 0
    for j, i in _local_minima(A):
        res = _polish(prob, complex(xs[i], ys[j]), tol, cont_tol, z_match, ((xlo - pad, xhi + pad), spacing))
        if res is None:
            dropped += 1
            continue
        x, r, it = res
        if not (xlo.real <= x.real <= xhi.real and xlo.imag <= x.imag <= xhi.imag):
            continue
        if all(abs(x - y) > 1e-6 for y, _, _ in roots):
            roots.append((x, r, it))
    roots.sort(key=lambda t: (abs(t[0].imag), t[0].real))
    modes = [Mode(x / M, n, r, it) for n, (x, r, it) in enumerate(roots)]
    if not modes:
        log.info("no modes found in %s", region)
    if diagnostics is not None:
        diagnostics.update(
            scan=ScanResult(xs / M, ys / M, A, modes, dropped), seeds=len(_local_minima(A)), dropped=dropped
        )
    return modes
