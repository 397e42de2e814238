"""Independent reference implementations for verification.

Nothing here is used by the production modules, and nothing here imports
them: agreement between the two is evidence, not tautology. Parameter
records are read through their public attributes only.

* ``gauss_2f1`` -- direct hypergeometric series, plus a Taylor re-expansion
  integrator for the hypergeometric ODE (``hyp2f1_ode_continue``).
* ``leaver_qnm`` -- Schwarzschild quasinormal frequencies from Leaver's
  three-term continued fraction (units ``1/M``).
* ``ode_residual`` -- normalized residual of either Heun equation.
* ``contour_winding`` -- argument-principle zero count on a rectangle.

The continued fraction's trust chain is internal: depth-doubling
convergence, exact mass scaling and overtone ordering. No numeric spectrum
is taken from elsewhere.
"""

from __future__ import annotations

import cmath
import hashlib
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import newton

from .errors import AtSingularity, OracleNotConverged, OutsideSeriesDomain, PoleInC

SERIES_RADIUS = 0.75


@dataclass(frozen=True)
class OracleReport:
    name: str
    inputs_digest: str
    values: tuple[complex, ...]
    convergence_metric: float
    threshold: float

    @property
    def conclusive(self) -> bool:
        return self.convergence_metric <= self.threshold


def _digest(*args) -> str:
    return hashlib.sha1(repr(args).encode()).hexdigest()[:12]


def _is_nonpositive_int(c: complex) -> bool:
    c = complex(c)
    return c.imag == 0 and c.real <= 0 and c.real == round(c.real)


# --- Gauss hypergeometric function ---------------------------------------


def gauss_2f1(a, b, c, z, tol: float = 1e-15, max_terms: int = 5000) -> complex:
    """Sum ``sum_k (a)_k (b)_k / ((c)_k k!) z**k`` for ``|z| <= 0.75``."""
    return gauss_2f1_report(a, b, c, z, tol, max_terms).values[0]


def gauss_2f1_report(a, b, c, z, tol: float = 1e-15, max_terms: int = 5000) -> OracleReport:
    a, b, c, z = complex(a), complex(b), complex(c), complex(z)
    if _is_nonpositive_int(c):
        raise PoleInC(f"c = {c} is a non-positive integer")
    if abs(z) > SERIES_RADIUS:
        raise OutsideSeriesDomain(f"|z| = {abs(z):.3g} > {SERIES_RADIUS}; use hyp2f1_ode_continue")
    term = 1 + 0j
    re, im = [1.0], [0.0]
    bound = math.inf
    for k in range(max_terms):
        term *= (a + k) * (b + k) / ((c + k) * (k + 1)) * z
        re.append(term.real)
        im.append(term.imag)
        if term == 0:
            bound = 0.0
            break
        # once (a+k)(b+k)/((c+k)(k+1)) is within a few % of 1 the ratio
        # |z|*(1+eps) bounds every later ratio
        k1 = k + 1
        r = abs(z) * abs((a + k1) * (b + k1) / ((c + k1) * (k1 + 1)))
        if k > 4 and r < 1:
            rr = max(r, abs(z)) * 1.05
            if rr < 1:
                bound = abs(term) * rr / (1 - rr)
                if bound <= tol * max(1.0, abs(complex(math.fsum(re), math.fsum(im)))):
                    break
    value = complex(math.fsum(re), math.fsum(im))
    return OracleReport("gauss_2f1", _digest(a, b, c, z), (value,), bound, tol * max(1.0, abs(value)))


def _hyp_taylor_step(a, b, c, z0, y, yp, dz, nmax=200, tol=1e-17):
    # Taylor series of the hypergeometric ODE about the ordinary point z0
    p0 = z0 * (1 - z0)
    p1 = 1 - 2 * z0
    q0 = c - (a + b + 1) * z0
    d = [y, yp]
    for k in range(nmax - 2):
        nxt = ((k + a) * (k + b) * d[k] - (k + 1) * (p1 * k + q0) * d[k + 1]) / (p0 * (k + 1) * (k + 2))
        d.append(nxt)
        if k > 10 and abs(nxt * dz ** (k + 2)) < tol * (abs(y) + abs(yp * dz)) and abs(
            d[-2] * dz ** (k + 1)
        ) < tol * (abs(y) + abs(yp * dz)):
            break
    val = sum(dk * dz**k for k, dk in enumerate(d))
    der = sum(k * dk * dz ** (k - 1) for k, dk in enumerate(d) if k > 0)
    return val, der


def hyp2f1_ode_continue(a, b, c, waypoints, y0: complex, yp0: complex, step_fraction: float = 0.3):
    """Continue a solution of ``z(1-z)y'' + (c-(a+b+1)z)y' - ab y = 0``.

    Piecewise Taylor re-expansion along the polyline ``waypoints``; each
    step is at most ``step_fraction`` of the distance to {0, 1}.
    """
    a, b, c = complex(a), complex(b), complex(c)
    pts = [complex(w) for w in waypoints]
    y, yp = complex(y0), complex(yp0)
    for za, zb in zip(pts[:-1], pts[1:]):
        z = za
        while z != zb:
            rad = min(abs(z), abs(1 - z))
            if rad == 0:
                raise AtSingularity(f"path hits a singular point at {z}")
            rem = zb - z
            h = rem if abs(rem) <= step_fraction * rad else rem / abs(rem) * step_fraction * rad
            y, yp = _hyp_taylor_step(a, b, c, z, y, yp, h)
            z = zb if h == rem else z + h
    return y, yp


def hyp2f1_basis_at(a, b, c, point: str, z: complex):
    """Kummer basis at 0 or 1 evaluated by series, as (value, derivative) pairs.

    At 0: ``F(a,b;c;z)``, ``z**(1-c) F(a-c+1,b-c+1;2-c;z)``.
    At 1: ``F(a,b;a+b-c+1;1-z)``, ``(1-z)**(c-a-b) F(c-a,c-b;c-a-b+1;1-z)``.
    Derivatives via ``d/dz F(a,b;c;z) = ab/c F(a+1,b+1;c+1;z)``.
    """
    a, b, c, z = complex(a), complex(b), complex(c), complex(z)

    def F(aa, bb, cc, x):
        return gauss_2f1(aa, bb, cc, x), aa * bb / cc * gauss_2f1(aa + 1, bb + 1, cc + 1, x)

    if point == "0":
        f1, d1 = F(a, b, c, z)
        g, dg = F(a - c + 1, b - c + 1, 2 - c, z)
        e = 1 - c
        pw = cmath.exp(e * cmath.log(z))
        return (f1, d1), (pw * g, pw * (e / z * g + dg))
    w = 1 - z
    f1, d1 = F(a, b, a + b - c + 1, w)
    g, dg = F(c - a, c - b, c - a - b + 1, w)
    e = c - a - b
    pw = cmath.exp(e * cmath.log(w))
    # d/dz = -d/dw
    return (f1, -d1), (pw * g, -pw * (e / w * g + dg))


def hyp2f1_connection(a, b, c, waypoints):
    """Matrix ``C`` with (basis at 0 continued along waypoints) = (basis at 1) @ C.

    Basis conventions as in :func:`hyp2f1_basis_at`; the path must start
    within 0.75 of 0 and end within 0.75 of 1.
    """
    pts = [complex(w) for w in waypoints]
    cols = []
    for y0, yp0 in hyp2f1_basis_at(a, b, c, "0", pts[0]):
        cols.append(hyp2f1_ode_continue(a, b, c, pts, y0, yp0))
    phi_from = np.array([[cols[0][0], cols[1][0]], [cols[0][1], cols[1][1]]])
    (u1, du1), (u2, du2) = hyp2f1_basis_at(a, b, c, "1", pts[-1])
    phi_to = np.array([[u1, u2], [du1, du2]])
    return np.linalg.solve(phi_to, phi_from)


def kummer_connection(a, b, c):
    """Classical Gamma-function connection of the Kummer bases (real 0 < z < 1)."""
    from scipy.special import gamma as G

    a, b, c = complex(a), complex(b), complex(c)
    return np.array(
        [
            [G(c) * G(c - a - b) / (G(c - a) * G(c - b)), G(2 - c) * G(c - a - b) / (G(1 - a) * G(1 - b))],
            [G(c) * G(a + b - c) / (G(a) * G(b)), G(2 - c) * G(a + b - c) / (G(a - c + 1) * G(b - c + 1))],
        ]
    )


# --- Leaver continued fraction -------------------------------------------


def _leaver_fraction(w, ell, s, n, depth):
    # Schwarzschild recurrence in units 2M = 1, rho = -i w
    rho = -1j * w
    eps = s * s - 1
    L = ell * (ell + 1)

    def al(k):
        return k * k + (2 * rho + 2) * k + 2 * rho + 1

    def be(k):
        return -(2 * k * k + (8 * rho + 2) * k + 8 * rho * rho + 4 * rho + L - eps)

    def ga(k):
        return k * k + 4 * rho * k + 4 * rho * rho - eps - 1

    tail = 0j
    for k in range(depth, n, -1):
        tail = al(k - 1) * ga(k) / (be(k) - tail)
    head = be(0)
    for k in range(1, n + 1):
        head = be(k) - al(k - 1) * ga(k) / head
    return (head - tail) / (1 + abs(be(n)))


def _leaver_root(ell, s, n, depth, guess):
    f = lambda x: _leaver_fraction(2 * x, ell, s, n, depth)
    try:
        return complex(newton(f, guess, tol=1e-15, maxiter=200))
    except (RuntimeError, OverflowError, ZeroDivisionError) as exc:
        raise OracleNotConverged(f"continued fraction root search failed: {exc}") from exc


def leaver_qnm_report(M: float, ell: int, s: int = 2, n: int = 0, depth: int = 300,
                      guess: complex | None = None) -> OracleReport:
    if ell < abs(s):
        raise ValueError("need ell >= |s|")
    if depth < 100:
        raise ValueError("depth must be at least 100")
    if guess is None:
        # eikonal estimate, M*omega
        guess = (ell + 0.5 - 1j * (n + 0.5)) / math.sqrt(27)
    else:
        guess = complex(guess) * M
    x1 = _leaver_root(ell, s, n, depth, guess)
    x2 = _leaver_root(ell, s, n, 2 * depth, x1)
    metric = abs(x2 - x1)
    return OracleReport("leaver_qnm", _digest(M, ell, s, n, depth), (x2 / M,), metric, 1e-8)


def leaver_qnm(M: float, ell: int, s: int = 2, n: int = 0, depth: int = 300, guess: complex | None = None) -> complex:
    """Quasinormal frequency ``omega`` (units 1/M) of overtone ``n``.

    Uses the ``n``-th inversion of the continued fraction; the root at
    ``depth`` and ``2*depth`` must agree to 1e-8.
    """
    rep = leaver_qnm_report(M, ell, s, n, depth, guess)
    if not rep.conclusive:
        raise OracleNotConverged(f"depth doubling moved the root by {rep.convergence_metric:.2e}")
    return rep.values[0]


# --- residuals ------------------------------------------------------------


def ode_residual(eq, z: complex, h: complex, hp: complex, hpp: complex) -> float:
    """``|LHS| / max(|term|)`` of the Heun equation described by ``eq``."""
    z = complex(z)
    if hasattr(eq, "mu"):
        sing = (0j, 1 + 0j)
        if z in sing:
            raise AtSingularity(f"z = {z} is a singular point")
        t1 = (eq.alpha + (eq.beta + 1) / z + (eq.gamma + 1) / (z - 1)) * hp
        t0 = (eq.mu / z + eq.nu / (z - 1)) * h
    else:
        if z in (0j, 1 + 0j, complex(eq.a)):
            raise AtSingularity(f"z = {z} is a singular point")
        delta = eq.alpha + eq.beta - eq.gamma - eq.epsilon + 1
        t1 = (eq.gamma / z + delta / (z - 1) + eq.epsilon / (z - eq.a)) * hp
        t0 = (eq.alpha * eq.beta * z - eq.q) / (z * (z - 1) * (z - eq.a)) * h
    terms = (complex(hpp), t1, t0)
    scale = max(abs(t) for t in terms)
    if scale == 0:
        return 0.0
    return abs(sum(terms)) / scale


# --- argument principle ---------------------------------------------------


def contour_winding(f, lower_left: complex, upper_right: complex, n_per_side: int = 16,
                    max_dphase: float = math.pi / 8, max_depth: int = 12) -> int:
    """Number of zeros of ``f`` inside a rectangle, by phase tracking.

    Each side starts with ``n_per_side`` samples; an interval is bisected
    until the principal phase increment across it is below ``max_dphase``.
    """
    lo, hi = complex(lower_left), complex(upper_right)
    corners = [lo, complex(hi.real, lo.imag), hi, complex(lo.real, hi.imag), lo]
    total = 0.0
    for za, zb in zip(corners[:-1], corners[1:]):
        ts = np.linspace(0.0, 1.0, n_per_side + 1)
        vals = [f(za + t * (zb - za)) for t in ts]
        stack = list(zip(ts[:-1], ts[1:], vals[:-1], vals[1:], [0] * n_per_side))
        stack.reverse()
        while stack:
            t0, t1, f0, f1, depth = stack.pop()
            if f0 == 0 or f1 == 0 or not (np.isfinite(f0) and np.isfinite(f1)):
                raise ValueError("function vanishes or is undefined on the contour")
            dph = cmath.phase(f1 / f0)
            if abs(dph) > max_dphase and depth < max_depth:
                tm = 0.5 * (t0 + t1)
                fm = f(za + tm * (zb - za))
                stack.append((tm, t1, fm, f1, depth + 1))
                stack.append((t0, tm, f0, fm, depth + 1))
                continue
            total += dph
    return round(total / (2 * math.pi))
