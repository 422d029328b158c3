import cmath
import json
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import FIG1A_C, preset, random_box
from entiredyn.errors import BoundaryZero, Overflow
from entiredyn.zoo import (ClosedFormMV0, Cosine, CosSqrt, ExpAffine, argument_count, cos_sqrt,
                           critical_points, evaluate, evaluate_deriv, function_from_json, singular_set,
                           winding_number)

FAMILIES = [ExpAffine(FIG1A_C), Cosine(-0.75, 0.75), Cosine(0.3 - 1j, 2j), CosSqrt(3.0), CosSqrt(1.7),
            ClosedFormMV0()]
coord = st.floats(-3, 3, allow_nan=False)


# -- evaluation ------------------------------------------------------------

def test_eval_examples():
    assert evaluate(Cosine(-0.75, 0.75), 0) == 0
    assert abs(evaluate(CosSqrt(3), 1) - 1) < 1e-15
    assert evaluate(ExpAffine(FIG1A_C), 0) == 3 + 0.5j * math.pi


def test_eval_deriv_examples():
    assert evaluate_deriv(ClosedFormMV0(), -1) == 0
    assert abs(evaluate_deriv(Cosine(-2, 2), math.pi)) < 1e-15
    f = CosSqrt(3)
    assert evaluate_deriv(f, 0) == 0
    h = 1e-6
    fd = (evaluate(f, h) - evaluate(f, -h)) / (2 * h)
    assert abs(fd - evaluate_deriv(f, 0)) < 1e-6


def test_overflow_is_reported_with_input():
    with pytest.raises(Overflow) as exc:
        evaluate(ExpAffine(0), 1000)
    assert exc.value.z == 1000
    with pytest.raises(Overflow):
        evaluate(Cosine(1, 0), 800j)


def test_cosine_requires_nonzero_a_and_cossqrt_u_above_one():
    with pytest.raises(ValueError):
        Cosine(0, 1)
    with pytest.raises(ValueError):
        CosSqrt(1.0)


def test_cos_sqrt_matches_both_branches():
    w = np.array([-9.0, -0.25, 0.0, 2.5, 3 + 4j, -7 - 1e-3j, -7 + 1e-3j])
    r = np.sqrt(w.astype(complex))
    assert np.allclose(cos_sqrt(w), np.cos(r), rtol=1e-12, atol=1e-14)
    assert np.allclose(cos_sqrt(w), np.cos(-r), rtol=1e-12, atol=1e-14)


@given(coord, coord)
def test_cossqrt_branch_independent(x, y):
    f = CosSqrt(3.0)
    z = complex(x, y)
    w = f.A * z * z - f.B
    for s in (cmath.sqrt(w), -cmath.sqrt(w)):
        direct = (f.u - cmath.cos(s)) / (f.u + 1)
        assert abs(direct - evaluate(f, z)) <= 1e-12 * (1 + abs(direct))


@pytest.mark.parametrize("f", [f for f in FAMILIES if f.real_symmetric] + [CosSqrt(2.2)])
@given(x=coord, y=coord)
def test_real_symmetry(f, x, y):
    z = complex(x, y)
    a, b = evaluate(f, z.conjugate()), evaluate(f, z).conjugate()
    assert abs(a - b) <= 1e-12 * (1 + abs(b))


@pytest.mark.parametrize("f", FAMILIES + ["mv-g0", "mv-example2"], ids=str)
def test_finite_differences_match_derivative(f, rng):
    f = preset(f) if isinstance(f, str) else f
    z = rng.uniform(-3, 3, 100) + 1j * rng.uniform(-3, 3, 100)
    h = 1e-6
    fd = (f(z + h) - f(z - h)) / (2 * h)
    d = f.deriv(z)
    scale = np.maximum(np.abs(d), 1e-3 * np.abs(f(z)) + 1.0)
    assert np.max(np.abs(fd - d) / scale) < 1e-6


@pytest.mark.parametrize("f", FAMILIES[:4] + [ClosedFormMV0()], ids=lambda f: f.family)
def test_second_derivative_by_finite_differences(f, rng):
    z = rng.uniform(-2, 2, 50) + 1j * rng.uniform(-2, 2, 50)
    h = 1e-6
    fd = (f.deriv(z + h) - f.deriv(z - h)) / (2 * h)
    assert np.allclose(fd, f.deriv2(z), rtol=1e-6, atol=1e-6)


# -- singular sets -----------------------------------------------------------

def test_singular_sets():
    s = singular_set(Cosine(-2, 2))
    assert sorted(v.real for v in s.critical_values) == [0, 4] and s.asymptotic_values == []
    s = singular_set(CosSqrt(3))
    assert sorted(v.real for v in s.critical_values) == [0, 0.5, 1] and s.asymptotic_values == []
    s = singular_set(ExpAffine(FIG1A_C))
    assert s.critical_values == [] and s.asymptotic_values == [FIG1A_C]
    s = singular_set(preset("mv-g0"))
    assert sorted(v.real for v in s.critical_values) == [-1, 0] and s.asymptotic_values == [0]
    assert s.provenance == "Numeric" and s.is_class_b


@pytest.mark.parametrize("name", ["fig2a", "fig2b", "cossqrt", "fig1b", "mv-g0", "mv-example2"])
def test_critical_values_are_images_of_critical_points(name):
    f = preset(name)
    s = singular_set(f)
    for cp in s.critical_points:
        assert abs(evaluate_deriv(f, cp.location)) < 1e-9
        assert min(abs(evaluate(f, cp.location) - v) for v in s.critical_values) < 1e-9


# -- critical point search ------------------------------------------------------

def test_cosine_critical_points():
    pts = critical_points(Cosine(-2, 2), (-4, 4, -4, 4))
    assert [p.multiplicity for p in pts] == [1, 1, 1]
    assert np.allclose([p.location for p in pts], [-math.pi, 0, math.pi], atol=1e-12)


def test_mv0_critical_points_and_values():
    f = ClosedFormMV0()
    pts = critical_points(f, (-2, 2, -2, 2))
    assert np.allclose([p.location for p in pts], [-1, 0, 1], atol=1e-12)
    assert [p.multiplicity for p in pts] == [1, 1, 1]
    assert np.allclose([evaluate(f, p.location) for p in pts], [-1, 0, -1], atol=1e-12)


def test_cossqrt_critical_point_at_zero():
    f = CosSqrt(3)
    pts = critical_points(f, (-0.5, 0.5, -0.5, 0.5))
    assert len(pts) == 1 and abs(pts[0].location) < 1e-12 and pts[0].multiplicity == 1
    assert abs(evaluate(f, pts[0].location)) < 1e-12
    # oracle: f' changes sign across 0 on the real line
    assert evaluate_deriv(f, -1e-3).real * evaluate_deriv(f, 1e-3).real < 0


def test_boundary_zero_is_reported():
    with pytest.raises(BoundaryZero):
        critical_points(Cosine(-2, 2), (0.0, 1.0, -1.0, 1.0))


def test_box_must_have_area():
    with pytest.raises(ValueError):
        critical_points(Cosine(-2, 2), (0, 0, -1, 1))


def test_winding_number_counts_multiplicity():
    assert winding_number(lambda z: z ** 3, 0, 0.1) == 3
    assert winding_number(lambda z: (z - 1) ** 2 * z, 1, 1e-3) == 2


def _cos_oracle(box):
    # zeros of sin: k pi on the real axis
    xmin, xmax, ymin, ymax = box
    if not ymin < 0 < ymax:
        return 0
    return sum(1 for k in range(-5, 6) if xmin < k * math.pi < xmax)


def _cossqrt_oracle(f, box):
    # 0 and +-sqrt((k^2 pi^2 + B) / A) for k >= 1, all real
    xmin, xmax, ymin, ymax = box
    if not ymin < 0 < ymax:
        return 0
    xs = [0.0] + [s * math.sqrt((k * k * math.pi ** 2 + f.B) / f.A) for k in range(1, 40) for s in (1, -1)]
    return sum(1 for x in xs if xmin < x < xmax)


@pytest.mark.parametrize("which", ["cosine", "cossqrt"])
def test_argument_principle_matches_located_points(which, rng):
    f = Cosine(-2, 2) if which == "cosine" else CosSqrt(3.0)
    done = 0
    while done < 20:
        box = random_box(rng)
        try:
            pts = critical_points(f, box)
        except BoundaryZero:
            continue
        total = sum(p.multiplicity for p in pts)
        assert total == argument_count(f.deriv, box)
        oracle = _cos_oracle(box) if which == "cosine" else _cossqrt_oracle(f, box)
        assert total == oracle
        done += 1


# -- serialization ---------------------------------------------------------------

@pytest.mark.parametrize("name", ["fig1a", "fig1b", "fig2b", "cossqrt", "mv-g0"])
def test_json_round_trip(name):
    f = preset(name)
    g = function_from_json(json.loads(json.dumps(f.to_json())))
    z = np.array([0.3 - 0.2j, -1.1 + 0.7j, 2.0])
    assert type(g) is type(f) and g.label == f.label
    assert np.allclose(g(z), f(z), rtol=1e-14, atol=0)


def test_mvnumeric_json_without_map_solves():
    f = function_from_json({"family": "MVNumeric", "params": {"support": {"1": -1, "-1": -1}}})
    assert abs(evaluate(f, 2) - (-4 * math.exp(-3))) < 1e-12
