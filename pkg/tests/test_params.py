import cmath
import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from heun import ConfluentParams, HeunParams, classify_singularities, params_from_dict
from heun.errors import DegenerateParams, InputError
from heun.params import INFINITY, fuchs_delta, is_integer

finite = st.floats(-3, 3, allow_nan=False)
cplx = st.builds(complex, finite, finite)


def test_fuchs_relation_examples():
    assert fuchs_delta(1, 1, 1, 1) == 1
    assert fuchs_delta(0, 0, 1, 0) == 0


@settings(max_examples=60, deadline=None)
@given(cplx, cplx, cplx, cplx)
def test_fuchs_relation_makes_infinity_regular(al, be, ga, ep):
    # exponents at 0, 1, a sum with those at infinity to 2 (Fuchs for four points)
    d = fuchs_delta(al, be, ga, ep)
    total = (1 - ga) + (1 - d) + (1 - ep) + al + be
    assert abs(total - 2) <= 1e-12 * (1 + abs(al) + abs(be) + abs(ga) + abs(ep))


@settings(max_examples=40, deadline=None)
@given(cplx, cplx, cplx, cplx, cplx)
def test_indicial_relation_at_infinity(q, al, be, ga, ep):
    # y ~ z**-s at infinity: s(s-1) - s*(gamma+delta+epsilon) + alpha*beta = 0 for s = alpha, beta
    p = HeunParams(2.5, q, al, be, ga, ep)
    for s in (al, be):
        res = s * (s + 1) - s * (p.gamma + p.delta + p.epsilon) + p.alpha * p.beta
        assert abs(res) <= 1e-12 * (1 + abs(s) ** 2 + abs(s) * 6 + abs(al * be))


def test_delta_is_derived():
    p = HeunParams(2, 0.5, 1, 2, 3, 0.25)
    assert p.delta == fuchs_delta(1, 2, 3, 0.25)


@pytest.mark.parametrize("a", [0, 1, 1 + 0j])
def test_coalescing_a_rejected(a):
    with pytest.raises(DegenerateParams):
        HeunParams(a, 0, 1, 1, 1, 1)


@pytest.mark.parametrize("bad", [float("nan"), float("inf"), "x", None])
def test_non_finite_rejected(bad):
    with pytest.raises(InputError):
        HeunParams(2, bad, 1, 1, 1, 1)
    with pytest.raises(InputError):
        ConfluentParams(1, 1, 1, bad, 0)


def test_classification_general():
    info = classify_singularities(HeunParams(2, 0.3, 1, 2, 1, 0.5))
    assert [i.location for i in info] == [0, 1, 2, INFINITY]
    assert all(i.kind == "regular" for i in info)
    assert info[0].exponents == (0, 0) and info[0].degenerate


def test_classification_confluent():
    info = classify_singularities(ConfluentParams(1, 0.5, 0.2, 0.1, 0.3))
    assert info[0].exponents == (0, -0.5) and not info[0].degenerate
    assert info[2].kind == "irregular"


def test_is_integer():
    assert is_integer(3 + 0j) and is_integer(-2.0000000000001)
    assert not is_integer(0.5) and not is_integer(1 + 1e-6j)


@settings(max_examples=40, deadline=None)
@given(cplx, cplx, cplx, cplx, cplx)
def test_json_round_trip(q, al, be, ga, ep):
    p = HeunParams(1.5 - 0.5j, q, al, be, ga, ep)
    assert HeunParams.from_json(p.to_json()) == p
    c = ConfluentParams(al, be, ga, q, ep)
    assert ConfluentParams.from_json(c.to_json()) == c
    assert params_from_dict(json.loads(c.to_json())) == c


def test_from_dict_missing_key():
    with pytest.raises(InputError):
        HeunParams.from_dict({"a": 2})


def test_integrate_p_matches_quadrature():
    p = HeunParams(2 + 1j, 0.3, 1.2, 0.4 - 0.2j, 0.7, 0.3 + 0.1j)
    za, zb = 0.3 + 0.2j, 1.5 + 1.5j
    t = np.linspace(0, 1, 4001)
    z = za + t * (zb - za)
    vals = np.array([p.coefficients(w)[0] for w in z]) * (zb - za)
    from scipy.integrate import simpson

    num = simpson(vals.real, x=t) + 1j * simpson(vals.imag, x=t)
    assert abs(p.integrate_p(za, zb) - num) < 1e-10
    c = ConfluentParams(0.5j, 0.3, -0.4, 1, 2)
    vals = np.array([c.coefficients(w)[0] for w in z]) * (zb - za)
    num = simpson(vals.real, x=t) + 1j * simpson(vals.imag, x=t)
    assert abs(c.integrate_p(za, zb) - num) < 1e-10


def test_integrate_p_tracks_winding():
    # a closed square around 0 picks up 2*pi*i*gamma
    p = HeunParams(3, 0, 0, 0, 0.5, 0)
    sq = [0.5, 0.5j, -0.5, -0.5j, 0.5]
    total = sum(p.integrate_p(a, b) for a, b in zip(sq[:-1], sq[1:]))
    assert abs(total - 2j * cmath.pi * 0.5) < 1e-12
