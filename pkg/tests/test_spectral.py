import cmath
import math

import pytest

from heun import ContinuationPath, RWProblem, StatePair, continue_along_path, boundary_solution, find_modes, matching_determinant, rw_to_confluent
from heun.errors import InputError
from heun.frobenius import confluent_series, eval_series
from heun.oracles import leaver_qnm
from heun.params import classify_singularities
from heun.spectral import eval_thome, recessive_direction, thome_expansion

PROB = RWProblem(M=1, ell=2, s=2)
OMEGAS = [0.37 - 0.09j, 0.2 - 0.3j, 0.8 - 0.05j, 0.5 + 0.1j, 1.3 - 0.6j]


def _angle(a: StatePair, b: StatePair) -> float:
    return abs(a.h * b.hp - b.h * a.hp) / (math.hypot(abs(a.h), abs(a.hp)) * math.hypot(abs(b.h), abs(b.hp)))


def _rw_residual(prob, omega, z, psi, dpsi, ddpsi):
    # Regge-Wheeler equation written in z = r/2M, derived independently here
    M, L, s = prob.M, prob.ell * (prob.ell + 1), prob.s
    f = 1 - 1 / z
    r = 2 * M * z
    V = f * (L / r**2 + (1 - s * s) * 2 * M / r**3)
    t1 = (1 / z**2) / f * dpsi
    t0 = (2 * M) ** 2 * (omega**2 - V) / f**2 * psi
    terms = (ddpsi, t1, t0)
    return abs(sum(terms)) / max(abs(t) for t in terms)


@pytest.mark.parametrize("omega", OMEGAS)
def test_transform_maps_solutions_to_solutions(omega):
    params, tr = rw_to_confluent(PROB, omega)
    sol = confluent_series(params, "1", "first")
    for z in (1.3 + 0.2j, 1.5, 1.2 - 0.4j):
        r = eval_series(sol, z)
        P = tr.prefactor(z)
        lp = tr.log_prefactor_derivative(z)
        lpp = -tr.sigma0 / z**2 - tr.sigma1 / (z - 1) ** 2
        psi = P * r.value
        dpsi = P * (lp * r.value + r.derivative)
        ddpsi = P * ((lpp + lp**2) * r.value + 2 * lp * r.derivative + r.second_derivative)
        assert _rw_residual(PROB, omega, z, psi, dpsi, ddpsi) < 1e-9


def test_mass_scaling_leaves_params_invariant():
    for w in OMEGAS:
        p1, _ = rw_to_confluent(PROB, w)
        p2, _ = rw_to_confluent(PROB.with_mass(2.0), w / 2)
        assert p1 == p2


def test_horizon_exponent_gap():
    for w in OMEGAS:
        params, _ = rw_to_confluent(PROB, w)
        e1, e2 = classify_singularities(params)[1].exponents
        assert abs(abs(e1 - e2) - abs(4j * PROB.M * w)) < 1e-12


def test_rho_zero_is_the_ingoing_branch():
    params, _ = rw_to_confluent(PROB, OMEGAS[0])
    zm = 1.6
    inner = boundary_solution(params, "regular_point", "mixed", point="1", rho=0, z_match=zm)
    r = eval_series(confluent_series(params, "1", "first"), zm)
    assert _angle(inner, StatePair(zm, r.value, r.derivative)) < 1e-9


def test_opposite_reflections_are_independent():
    params, _ = rw_to_confluent(PROB, OMEGAS[0])
    a = boundary_solution(params, "regular_point", "mixed", point="1", rho=1)
    b = boundary_solution(params, "regular_point", "mixed", point="1", rho=-1)
    assert _angle(a, b) > 1e-3


@pytest.mark.parametrize("omega", OMEGAS[:3])
def test_infinity_condition_stable_in_R(omega):
    params, _ = rw_to_confluent(PROB, omega)
    a = boundary_solution(params, "infinity", R=20.0)
    b = boundary_solution(params, "infinity", R=40.0)
    assert _angle(a, b) < 1e-7


def test_thome_expansion_solves_the_ode():
    # the truncated expansion far out, continued inwards by the ODE (the stable
    # direction for a recessive solution), reproduces the expansion nearer in
    params, _ = rw_to_confluent(PROB, OMEGAS[0])
    for kind in ("dominant", "recessive"):
        exp = thome_expansion(params, kind)
        phi = recessive_direction(params, kind)
        z1, z2 = 20 * cmath.exp(1j * phi), 40 * cmath.exp(1j * phi)
        (s1, e1, _), (s2, e2, _) = eval_thome(exp, z1), eval_thome(exp, z2)
        moved = continue_along_path(params, s2, ContinuationPath((z2, z1), 1.0), 1e-13)
        assert max(e1, e2) < 1e-10
        assert abs(moved.h - s1.h) < 1e-9 * abs(s1.h)
        assert abs(moved.hp - s1.hp) < 1e-9 * abs(s1.hp)


def test_determinant_scale_free_and_vanishing_at_leaver_root():
    ref = leaver_qnm(1.0, 2, 2, 0)
    assert abs(matching_determinant(PROB, ref)) < 1e-10
    assert abs(matching_determinant(PROB, 0.3 - 0.2j)) > 1e-4


@pytest.mark.parametrize("omega", [0.37 - 0.09j, 0.25 - 0.2j, 0.6 - 0.4j])
def test_reflection_symmetry_of_determinant(omega):
    d1 = matching_determinant(PROB, omega)
    d2 = matching_determinant(PROB, -omega.conjugate())
    assert abs(d2 - d1.conjugate()) < 1e-8 * max(1.0, abs(d1))


def test_mirror_roots():
    right = find_modes(PROB, (0.25 - 0.35j, 0.45 - 0.03j))
    left = find_modes(PROB, (-0.45 - 0.35j, -0.25 - 0.03j))
    assert len(left) == len(right) == 2
    for m, n in zip(right, left):
        assert abs(n.omega + m.omega.conjugate()) < 1e-6


def test_ell3_fundamental():
    modes = find_modes(RWProblem(M=1, ell=3, s=2), (0.5 - 0.15j, 0.7 - 0.03j))
    ref = leaver_qnm(1.0, 3, 2, 0)
    assert modes and abs(modes[0].omega - ref) < 1e-6


def test_empty_region_returns_nothing():
    diag = {}
    assert find_modes(PROB, (0.6 - 0.2j, 0.8 - 0.02j), diagnostics=diag) == []
    assert diag["scan"].absD.shape == (8, 8)


def test_parallel_scan_matches_serial():
    region = (0.3 - 0.15j, 0.45 - 0.03j)
    a = find_modes(PROB, region)
    b = find_modes(PROB, region, workers=2)
    assert [m.omega for m in a] == [m.omega for m in b]


@pytest.mark.parametrize(
    "kwargs",
    [dict(ell=1, s=2), dict(rho=2), dict(r_surface=1.5), dict(M=-1), dict(ell=2.5)],
)
def test_problem_validation(kwargs):
    with pytest.raises(InputError):
        RWProblem(**kwargs)


def test_region_validation():
    with pytest.raises(InputError):
        find_modes(PROB, (-0.1 - 0.1j, 0.1 + 0.1j))
    with pytest.raises(InputError):
        find_modes(PROB, (0.3 - 0.1j, 0.4 - 0.01j), grid=(4, 4))
    with pytest.raises(InputError):
        find_modes(PROB, (0.4 - 0.01j, 0.3 - 0.1j))
