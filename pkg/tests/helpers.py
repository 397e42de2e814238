"""Random parameter draws and small numerical helpers shared by the tests."""

import cmath
import math

import numpy as np

from heun import ConfluentParams, ContinuationPath, HeunParams, StatePair, continue_along_path


def _away_from_integers(rng, lo, hi, gap=0.15, imag=0.4):
    while True:
        x = complex(rng.uniform(lo, hi), rng.uniform(-imag, imag))
        if abs(x.real - round(x.real)) >= gap:
            return x


def rand_c(rng, scale=1.0):
    return complex(rng.uniform(-scale, scale), rng.uniform(-scale, scale))


def random_general(rng, a_range=(1.5, 3.0)):
    """Generic general-Heun parameters with every exponent difference non-integer."""
    while True:
        a = rng.uniform(*a_range) * cmath.exp(1j * rng.uniform(-math.pi, math.pi))
        p = HeunParams(
            a,
            rand_c(rng, 1.5),
            rand_c(rng, 1.5),
            rand_c(rng, 1.5),
            _away_from_integers(rng, -1.5, 2.5),
            _away_from_integers(rng, -1.5, 2.5),
        )
        if abs(p.delta.real - round(p.delta.real)) >= 0.15 and abs(a - 1) > 1.0:
            return p


def random_confluent(rng):
    return ConfluentParams(
        rand_c(rng, 1.0),
        _away_from_integers(rng, -1.5, 1.5),
        _away_from_integers(rng, -1.5, 1.5),
        rand_c(rng, 1.5),
        rand_c(rng, 1.5),
    )


def random_params(rng, kind):
    return random_general(rng) if kind == "general" else random_confluent(rng)


def singularity_distance(eq, z):
    return min(abs(z - s) for s in eq.singular_points)


def random_point(rng, eq, box=(-2.0, 3.0, -2.0, 2.0), min_gap=0.35):
    while True:
        z = complex(rng.uniform(box[0], box[1]), rng.uniform(box[2], box[3]))
        if singularity_distance(eq, z) >= min_gap:
            return z


def cauchy_second_derivative(eq, state: StatePair, tol=1e-13, n=32, frac=0.3):
    """h'' at ``state.z`` from the Cauchy integral of h' over a small circle.

    The state is continued around the circle, so this is independent of
    the ODE itself and can be fed to the residual oracle.
    """
    z0 = state.z
    r = frac * singularity_distance(eq, z0)
    th = 2 * np.pi * np.arange(n) / n
    pts = z0 + r * np.exp(1j * th)
    clear = 0.5 * singularity_distance(eq, z0)
    cur = continue_along_path(eq, state, ContinuationPath((z0, pts[0]), clear), tol)
    acc = cur.hp * np.exp(-1j * th[0])
    for k in range(1, n):
        cur = continue_along_path(eq, cur, ContinuationPath((pts[k - 1], pts[k]), clear), tol)
        acc += cur.hp * np.exp(-1j * th[k])
    return acc / (n * r)


def rel_state_diff(s1: StatePair, s2: StatePair) -> float:
    a = np.array([s1.h, s1.hp])
    b = np.array([s2.h, s2.hp])
    return float(np.linalg.norm(a - b) / np.linalg.norm(b))
