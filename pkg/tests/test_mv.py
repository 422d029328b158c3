import json
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import preset
from entiredyn.combmap import CombMap
from entiredyn.dynamics import real_fixed_points
from entiredyn.errors import BracketFailure, EmptySupport, QuadratureAccuracyLoss, SignPatternViolation
from entiredyn.mv import (build_slit_domain, cossqrt_repelling_point, cossqrt_threshold, example2_stage,
                          g_eval, phi_eval, solve_parameters, truncated_example1)
from entiredyn.zoo import CosSqrt, critical_points


def solve(support):
    return solve_parameters(build_slit_domain(support))


@pytest.fixture(scope="module")
def g0map():
    return solve({1: -1.0, -1: -1.0})


@pytest.fixture(scope="module")
def comb4():
    return solve({1: -1.0, -1: -1.0, 5: -1.0, -5: -1.0})


@pytest.fixture(scope="module")
def asym():
    # no symmetry, mixed signs and sizes
    return solve({-2: 0.7, -1: -0.4, 0: 2.0, 3: -0.05, 4: 1.3})


def g0(z):
    return -z * z * np.exp(1 - z * z)


# -- slit domains -----------------------------------------------------------

def test_build_slit_domain_examples():
    s = build_slit_domain({0: 1})
    assert [(sl.height, sl.tip_real_part) for sl in s.slits] == [(0.0, 0.0)]
    s = build_slit_domain({-1: -1, 1: -1})
    assert [(sl.index, sl.tip_real_part) for sl in s.slits] == [(-1, 0.0), (1, 0.0)]
    assert s.slits[0].height == -math.pi and s.symmetric
    s = build_slit_domain({1: -1, -1: -1, 5: -1, -5: -1, 3: 0})
    assert [sl.index for sl in s.slits] == [-5, -1, 1, 5]
    assert [sl.height for sl in s.slits] == [n * math.pi for n in (-5, -1, 1, 5)]


def test_build_slit_domain_errors():
    with pytest.raises(SignPatternViolation):
        build_slit_domain({1: 0.5})
    with pytest.raises(SignPatternViolation):
        build_slit_domain({2: -1})
    with pytest.raises(EmptySupport):
        build_slit_domain({0: 0, 3: 0})


def test_slit_spec_json_round_trip():
    s = build_slit_domain({1: -1, -1: -1, 4: 2.5})
    t = type(s).from_json(json.loads(json.dumps(s.to_json())))
    assert t == s


# -- solver oracles -------------------------------------------------------------

def test_single_slit_is_minus_z_squared(rng):
    m = solve({0: 1.0})
    z = rng.uniform(-2, 2, 50) - 1j * rng.uniform(0.01, 2, 50)
    assert np.max(np.abs(m.phi(z) + z * z)) < 1e-10
    assert np.max(np.abs(m.g(z) - np.exp(-z * z))) < 1e-10
    assert abs(phi_eval(m, -2j, "quadrature") - 4) < 1e-10


def test_g0_oracle(g0map):
    assert np.allclose(g0map.tips, [-1, 1], atol=1e-12)
    x = np.linspace(-2, 2, 10)
    y = np.linspace(-2, 0, 11)[:-1]
    z = (x[None, :] + 1j * y[:, None]).ravel()
    z = np.concatenate([z, z.conjugate()])
    g = g0map.g(z)
    assert np.max(np.abs(g - g0(z)) / (1 + np.abs(g))) < 1e-6
    for zz in (1 + 0j, -1 + 0j):
        assert abs(phi_eval(g0map, zz) - 1j * math.pi * np.sign(zz.real)) < 1e-12


def test_g0_normalization(g0map):
    # the negative imaginary axis maps into R, with Re phi -> +inf
    for y in (-0.5, -1.0, -3.0):
        for method in ("closed", "quadrature"):
            assert abs(phi_eval(g0map, 1j * y, method).imag) < 1e-10
    vals = [phi_eval(g0map, 1j * y).real for y in (-1, -4, -16)]
    assert vals[0] < vals[1] < vals[2]


def test_g_eval_examples(g0map):
    assert abs(g_eval(g0map, 2) - (-4 * math.exp(-3))) < 1e-6
    assert abs(g_eval(g0map, 2) + 0.19915) < 1e-5
    assert abs(g_eval(g0map, -1j) - math.exp(2)) < 1e-9


def test_four_slit_forward_check(comb4):
    tips = comb4.tip_values
    for k, t in enumerate(comb4.tips):
        assert abs(phi_eval(comb4, t) - tips[k]) < 1e-8
        assert abs(phi_eval(comb4, t, "quadrature") - tips[k]) < 1e-8
    assert np.allclose(comb4.poles, -comb4.poles[::-1], atol=1e-14)
    assert np.allclose(comb4.tips, -comb4.tips[::-1], atol=1e-14)
    assert comb4.residual < 1e-10


def test_asymmetric_forward_check(asym):
    for k, t in enumerate(asym.tips):
        assert abs(phi_eval(asym, t) - asym.tip_values[k]) < 1e-8
    assert np.all(np.diff(asym.prevertices) > 0)
    assert asym.normalization["scale"] == "a = -1"


@pytest.mark.parametrize("name", ["g0map", "comb4", "asym"])
def test_quadrature_matches_closed_form(name, request, rng):
    m = request.getfixturevalue(name)
    z = rng.uniform(-6, 6, 30) - 1j * rng.uniform(1e-3, 4, 30)
    for zz in z:
        assert abs(phi_eval(m, zz, "quadrature") - phi_eval(m, zz)) < 1e-9 * (1 + abs(phi_eval(m, zz)))


def test_quadrature_guard_near_returns(comb4):
    with pytest.raises(QuadratureAccuracyLoss):
        phi_eval(comb4, comb4.poles[0] + 1e-13)
    with pytest.raises(ValueError):
        phi_eval(comb4, 1j)


@pytest.mark.parametrize("name", ["g0map", "comb4", "asym"])
@given(x=st.floats(-4, 4), y=st.floats(-3, 3))
def test_reflection_identity(name, request, x, y):
    m = request.getfixturevalue(name)
    z = complex(x, y)
    a, b = g_eval(m, z.conjugate()), g_eval(m, z).conjugate()
    assert abs(a - b) <= 1e-10 * (1 + abs(a))


@pytest.mark.parametrize("name", ["g0map", "comb4"])
def test_symmetric_specs_are_even(name, request, rng):
    m = request.getfixturevalue(name)
    z = rng.uniform(-2.5, 2.5, 100) + 1j * rng.uniform(-2.5, 2.5, 100)
    assert np.max(np.abs(m.g(-z) - m.g(z)) / (1 + np.abs(m.g(z)))) < 1e-8


def test_g_eval_agrees_with_entire_form(comb4, rng):
    z = rng.uniform(-3, 3, 40) + 1j * rng.uniform(-3, 3, 40)
    z[:5] = z[:5].real
    for zz in z:
        assert abs(g_eval(comb4, zz) - complex(comb4.g(zz))) <= 1e-9 * (1 + abs(comb4.g(zz)))


@pytest.mark.parametrize("name", ["g0map", "comb4", "asym"])
def test_real_critical_points_interpolate_c(name, request):
    m = request.getfixturevalue(name)
    from entiredyn.zoo import MVNumeric

    f = MVNumeric(m)
    lo, hi = m.prevertices[0] - 1.0, m.prevertices[-1] + 1.0
    pts = critical_points(f, (lo - 0.0123, hi + 0.0171, -0.3, 0.25))
    idx = list(m.slit_indices)
    # walk the critical points left to right, reading off the index labels
    labels = []
    for p in pts:
        assert abs(p.location.imag) < 1e-9
        v = complex(f(p.location)).real
        if abs(v) < 1e-9:
            labels.append(None)
        else:
            n = [k for k in idx if abs(m.support[k] - v) < 1e-6 and k not in labels]
            assert n, f"critical value {v} not in the support"
            labels.append(n[0])
    assert [n for n in labels if n is not None] == idx


def test_conformality_probe(comb4, rng):
    z = rng.uniform(-5, 5, 50) - 1j * rng.uniform(0.05, 3, 50)
    h = 1e-6
    for zz in z:
        dx = (phi_eval(comb4, zz + h) - phi_eval(comb4, zz - h)) / (2 * h)
        dy = (phi_eval(comb4, zz + 1j * h) - phi_eval(comb4, zz - 1j * h)) / (2 * h)
        jac = np.array([[dx.real, dy.real], [dx.imag, dy.imag]])
        assert abs(np.linalg.det(jac)) > 1e-8


def test_combmap_json_round_trip(comb4):
    m = CombMap.from_json(json.loads(json.dumps(comb4.to_json())))
    z = np.array([0.4 - 1j, 3 + 0.5j, -6.0])
    assert np.allclose(m.g(z), comb4.g(z), rtol=1e-14)


# -- example families -------------------------------------------------------------

def test_example1_delta_zero_is_g0():
    f = truncated_example1(0.0, 7)
    z = np.array([0.5 - 0.5j, 1.7 + 0.2j, -1.3])
    assert np.allclose(f(z), g0(z), rtol=1e-12)


def test_example1_interpolation():
    f = truncated_example1(0.05, 7)
    for z, v in ((1, -1), (-1, -1), (0, 0)):
        assert abs(complex(f(z)) - v) < 1e-8


def test_example1_cauchy_trend():
    x = np.linspace(-2, 2, 41)
    z = (x[None, :] + 1j * x[:, None]).ravel()
    v = [truncated_example1(0.05, M)(z) for M in (3, 7, 11, 15)]
    d = [np.max(np.abs(a - b)) for a, b in zip(v, v[1:])]
    assert d[1] < d[0] and d[2] < d[1]


def test_example1_argument_checks():
    with pytest.raises(ValueError):
        truncated_example1(1.0, 3)
    with pytest.raises(ValueError):
        truncated_example1(0.1, 4)


def test_example2_base_and_stage1():
    base = example2_stage((1,))
    assert np.allclose(base.comb.tips, [-1, 1]) and np.allclose(base.comb.poles, [0])
    f = example2_stage((1, 5))
    t = f.comb.tips
    pts = critical_points(f, (t[2] + 0.1, t[3] - 0.1, -0.5, 0.5))
    assert [p.multiplicity for p in pts] == [3]
    assert abs(complex(f(pts[0].location))) < 1e-12
    with pytest.raises(ValueError):
        example2_stage((1, 4))


def test_example2_fig5_stage():
    f = example2_stage((1, 5, 25))
    assert list(f.comb.orders) == [20, 4, 2, 4, 20]
    for k, t in enumerate(f.comb.tips):
        assert abs(phi_eval(f.comb, t) - f.comb.tip_values[k]) < 1e-8


# -- threshold ----------------------------------------------------------------------

def test_threshold_value_and_signs():
    u = cossqrt_threshold()
    assert abs(u - 2.7981186) < 1e-5
    assert (3 - 1) / (3 + 1) > cossqrt_repelling_point(3.0)
    assert (2 - 1) / (2 + 1) < cossqrt_repelling_point(2.0)


def test_repelling_point_oracle():
    # independent bisection on f(x) - x over (0.01, 0.99)
    f = CosSqrt(3.0)
    a, b = 0.01, 0.99
    h = lambda x: complex(f(x)).real - x
    assert h(a) * h(b) < 0
    for _ in range(80):
        m = 0.5 * (a + b)
        a, b = (m, b) if h(a) * h(m) > 0 else (a, m)
    assert abs(cossqrt_repelling_point(3.0) - a) < 1e-10
    (x, kind), = real_fixed_points(f, (0.01, 0.99))
    assert kind == "repelling"


def test_threshold_bracket_failure():
    with pytest.raises(BracketFailure):
        cossqrt_threshold(3.0, 10.0)
