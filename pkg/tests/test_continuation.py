import cmath
import math

import numpy as np
import pytest

from helpers import random_general, rel_state_diff
from heun import (
    ContinuationPath,
    HeunParams,
    StatePair,
    circle_loop,
    continue_along_path,
    default_path,
    local_basis,
    monodromy_matrix,
)
from heun.continuation import min_singularity_gap
from heun.errors import InputError, SingularityTooClose, StepLimitExceeded
from heun.oracles import hyp2f1_ode_continue

EQ = HeunParams(3, 0.4 + 0.1j, 1.2, -0.3 + 0.2j, 0.45, 0.3 - 0.1j)


def _seg_dist(za, zb, p):
    d = zb - za
    t = min(1.0, max(0.0, ((p - za) * d.conjugate()).real / abs(d) ** 2))
    return abs(za + t * d - p)


def test_zero_loop_is_exact_identity():
    s = StatePair(0.3 + 0.1j, 1.5 - 2j, 0.25j)
    out = continue_along_path(EQ, s, ContinuationPath((s.z, s.z), 0.1))
    assert out == s


def test_singularity_free_rectangle():
    rng = np.random.default_rng(3)
    for _ in range(5):
        eq = random_general(rng)
        z0 = -1.5 + 1.5j
        loop = ContinuationPath((z0, z0 + 0.8, z0 + 0.8 + 0.6j, z0 + 0.6j, z0), 0.1, eq)
        s = StatePair(z0, complex(*rng.normal(size=2)), complex(*rng.normal(size=2)))
        assert rel_state_diff(continue_along_path(eq, s, loop), s) < 1e-9


def test_matches_hypergeometric_oracle_around_one():
    a, b, c = 0.3 + 0.1j, 0.45 - 0.2j, 0.8 + 0.05j
    eq = HeunParams(2.5, 2.5 * a * b, a, b, c, 0)
    loop = circle_loop(eq, 1, 0.5, n=48)
    s = StatePair(loop.start, 0.7 + 0.2j, -0.4 + 1j)
    out = continue_along_path(eq, s, loop, 1e-13)
    y, yp = hyp2f1_ode_continue(a, b, c, loop.waypoints, s.h, s.hp)
    ref = StatePair(loop.end, y, yp)
    assert rel_state_diff(out, ref) < 1e-8


def test_monodromy_eigenvalues_at_zero():
    eq = HeunParams(3, 0.2, 1, 0.5, 0.5, 0.3)
    basis = local_basis(eq, "0")
    M = monodromy_matrix(eq, basis, circle_loop(eq, 0, 0.5))
    ev = sorted(np.linalg.eigvals(M), key=lambda v: v.real)
    assert abs(ev[0] + 1) < 1e-8 and abs(ev[1] - 1) < 1e-8


def test_contractible_monodromy_is_identity():
    basis = local_basis(EQ, "0")
    z0 = 0.5j
    loop = ContinuationPath((z0, z0 + 1j, -1 + 2j, -1 + 0.6j, z0), 0.1, EQ)
    assert np.max(np.abs(monodromy_matrix(EQ, basis, loop) - np.eye(2))) < 1e-9


def test_composite_loop_is_product():
    eq = EQ
    basis = local_basis(eq, "0")
    l0 = circle_loop(eq, 0, 0.5)
    l1 = ContinuationPath((0.5, 1 - 0.5j, 1.5, 1 + 0.5j, 0.5), 0.1, eq)
    assert l1.winding_number(1) == 1 and l1.winding_number(0) == 0
    m0 = monodromy_matrix(eq, basis, l0)
    m1 = monodromy_matrix(eq, basis, l1)
    both = monodromy_matrix(eq, basis, l0.then(l1))
    assert np.max(np.abs(both - m1 @ m0)) < 1e-8 * np.max(np.abs(both))


def test_monodromy_abel_determinant():
    diag = {}
    M = monodromy_matrix(EQ, local_basis(EQ, "1"), circle_loop(EQ, 1, 0.5), diagnostics=diag)
    assert diag["abel_residual"] < 1e-9
    assert abs(np.linalg.det(M) - cmath.exp(-2j * math.pi * EQ.delta)) < 1e-8


def test_monodromy_needs_closed_loop():
    with pytest.raises(InputError):
        monodromy_matrix(EQ, local_basis(EQ, "0"), ContinuationPath((0.5, 0.6), 0.1))


@pytest.mark.parametrize("src,dst", [(-0.5 + 0j, 2.0 + 0j), (0.5, 4.0), (-1j, 1j), (0.5 + 0.2j, 3.5 - 0.1j)])
def test_default_path_keeps_clearance(src, dst):
    path = default_path(EQ, src, dst)
    assert path.start == src and path.end == dst
    for p in EQ.singular_points:
        for za, zb in path.segments:
            assert _seg_dist(za, zb, p) >= path.clearance * (1 - 1e-9)


def test_default_path_detours_upward():
    path = default_path(EQ, -0.5, 0.5)
    assert max(w.imag for w in path.waypoints) > 0
    assert min(w.imag for w in path.waypoints) >= -1e-12


def test_path_through_singularity_rejected():
    with pytest.raises(SingularityTooClose):
        ContinuationPath((-0.5, 0.5), 0.1, EQ)


def test_default_clearance():
    assert default_path(EQ, 0.2, 0.4).clearance == pytest.approx(0.1 * min_singularity_gap(EQ))


def test_path_json_round_trip():
    path = default_path(EQ, -0.5, 2.0)
    back = ContinuationPath.from_json(path.to_json(), EQ)
    assert back == path


def test_refinement_does_not_change_result():
    s = StatePair(0.4 + 0.1j, 1, 0.5)
    path = default_path(EQ, s.z, 2.2 + 0.8j)
    a = continue_along_path(EQ, s, path)
    b = continue_along_path(EQ, s, path.refined(3))
    assert rel_state_diff(a, b) < 1e-10


def test_tolerance_controls_error():
    s = StatePair(0.4 + 0.1j, 1, 0.5)
    path = default_path(EQ, s.z, -2 + 1.5j)
    ref = continue_along_path(EQ, s, path, 1e-13)
    for tol in (1e-6, 1e-9):
        diag = {}
        out = continue_along_path(EQ, s, path, tol, diag)
        err = rel_state_diff(out, ref)
        assert err < 100 * tol
        assert diag["steps"] > 0


def test_step_cap(monkeypatch):
    monkeypatch.setenv("HEUN_MAX_STEPS", "3")
    with pytest.raises(StepLimitExceeded):
        continue_along_path(EQ, StatePair(0.4, 1, 0), default_path(EQ, 0.4, -3 + 2j), 1e-12)


def test_bad_step_cap(monkeypatch):
    monkeypatch.setenv("HEUN_MAX_STEPS", "many")
    with pytest.raises(InputError):
        continue_along_path(EQ, StatePair(0.4, 1, 0), default_path(EQ, 0.4, 0.6), 1e-12)


def test_state_must_sit_at_path_start():
    with pytest.raises(InputError):
        continue_along_path(EQ, StatePair(0.3, 1, 0), ContinuationPath((0.4, 0.6), 0.1))
