"""Acceptance gate: one test per criterion, one PASS/FAIL line each."""
import hashlib
import math
import time

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES, cycles_of, preset
from entiredyn.audit import CASE1, CASE2, dichotomy_case
from entiredyn.dynamics import classify_points, detect_cycles, hyperbolicity_report, verify_trap
from entiredyn.errors import BoundaryZero
from entiredyn.mv import build_slit_domain, cossqrt_threshold, example2_stage, solve_parameters, truncated_example1
from entiredyn.presets import FUNCTION_PRESETS, THRESHOLD_REFERENCE, fig2b
from entiredyn.render import Viewport, classify_grid, ppm_bytes, render, unbounded_evidence
from entiredyn.verification import cossqrt_critical_values
from entiredyn.zoo import ClosedFormMV0, Cosine, ExpAffine, argument_count, critical_points, singular_set


def report(n, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'} criterion {n}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def test_criterion_01_threshold():
    t = time.perf_counter()
    u = cossqrt_threshold()
    dt = time.perf_counter() - t
    report(1, abs(u - THRESHOLD_REFERENCE) < 1e-5 and dt < 5,
           f"u* = {u:.9f} vs {THRESHOLD_REFERENCE} (|diff| {abs(u - THRESHOLD_REFERENCE):.1e} < 1e-5), {dt:.2f}s < 5s")


def test_criterion_02_two_slit_map():
    t = time.perf_counter()
    comb = solve_parameters(build_slit_domain({-1: -1.0, 1: -1.0}))
    x = np.linspace(-2, 2, 10)
    y = np.linspace(-2, 0, 11)[:-1]
    z = (x[None, :] + 1j * y[:, None]).ravel()
    z = np.concatenate([z, z.conjugate()])
    g = comb.g(z)
    err = float(np.max(np.abs(g - (-z * z * np.exp(1 - z * z))) / (1 + np.abs(g))))
    dt = time.perf_counter() - t
    report(2, err < 1e-6 and dt < 120, f"max |g - (-z^2 e^(1-z^2))|/(1+|g|) = {err:.1e} < 1e-6, {dt:.2f}s < 120s")


def test_criterion_03_single_slit_map():
    comb = solve_parameters(build_slit_domain({0: 1.0}))
    rng = np.random.default_rng(3)
    z = rng.uniform(-2, 2, 50) + 1j * rng.uniform(-2, 2, 50)
    err = float(np.max(np.abs(comb.g(z) - np.exp(-z * z))))
    report(3, err < 1e-8, f"max |g - exp(-z^2)| = {err:.1e} on 50 points < 1e-8")


def _timed_cycles(f):
    t = time.perf_counter()
    cyc = detect_cycles(f, singular_set(f).values)
    return cyc, time.perf_counter() - t


def test_criterion_04_cycles():
    c1, t1 = _timed_cycles(ExpAffine(2 + 0.5j * math.pi))
    ok1 = [c.period for c in c1] == [3]
    c2, t2 = _timed_cycles(Cosine(-2.0, 2.0))
    ok2 = (any(c.period == 1 and abs(c.points[0]) < 1e-12 for c in c2)
           and any(c.period == 2 for c in c2))
    c3, t3 = _timed_cycles(fig2b())
    two = [c for c in c3 if c.period == 2]
    ok3 = (len(two) == 1 and min(abs(p) for p in two[0].points) < 1e-9
           and min(abs(p - 4j) for p in two[0].points) < 1e-9 and abs(two[0].multiplier) < 1e-9)
    ok = ok1 and ok2 and ok3 and max(t1, t2, t3) < 1
    mult = abs(two[0].multiplier) if two else float("nan")
    report(4, ok, f"periods {[c.period for c in c1]} / {sorted(c.period for c in c2)} / {{0, 4i}} |mult| {mult:.1e}; "
                  f"times {t1:.2f}s {t2:.2f}s {t3:.2f}s < 1s")


def test_criterion_05_dichotomy():
    table = [("lambda=3/4", Cosine.symmetric(0.75), CASE1), ("lambda=4pi/3", Cosine.symmetric(4 * math.pi / 3), CASE2),
             ("lambda=2", Cosine.symmetric(2.0), CASE2), ("fig2b", fig2b(), CASE1)]
    t = time.perf_counter()
    low = [dichotomy_case(f, resolutions=(400,)) for _, f, _ in table]
    dt = time.perf_counter() - t
    high = [dichotomy_case(f, resolutions=(800,)) for _, f, _ in table]
    ok = all(a == b == want for a, b, (_, _, want) in zip(low, high, table)) and dt < 60
    rows = ", ".join(f"{name}->{a.split('_')[0] if a else a}" for (name, _, _), a in zip(table, low))
    report(5, ok, f"{rows}; 400^2 == 800^2: {low == high}; {dt:.1f}s at 400^2 < 60s")


def test_criterion_06_cossqrt_critical_values():
    found = cossqrt_critical_values(3.0)
    err = max(min(abs(v - w) for v in found) for w in (0.0, 1.0, 0.5))
    stray = max(min(abs(v - w) for w in (0.0, 1.0, 0.5)) for v in found)
    report(6, max(err, stray) < 1e-9, f"critical values {[round(v.real, 12) for v in found]} within {max(err, stray):.1e} < 1e-9")


def test_criterion_07_hyperbolic_presets():
    verdicts = {}
    for name in FUNCTION_PRESETS:
        rep = hyperbolicity_report(preset(name), max_iter=10_000)
        undecided = sum(fate.verdict == "Undecided" for fate in rep.singular_fates)
        verdicts[name] = rep.hyperbolic is True and undecided == 0
    report(7, all(verdicts.values()), f"{sum(verdicts.values())}/{len(verdicts)} presets hyperbolic, no Undecided "
                                       f"fates at max_iter 1e4 ({', '.join(verdicts)})")


def test_criterion_08_tiled_determinism():
    f = Cosine(-2.0, 2.0)
    cyc = cycles_of(f)
    vp = Viewport.square(0j, 8.0, 800)
    ref = ppm_bytes(render(classify_grid(f, cyc, vp)))
    same = {t: ppm_bytes(render(classify_grid(f, cyc, vp, tile=t, threads=4))) == ref for t in (16, 64, 256)}
    report(8, all(same.values()), f"800^2 PPM sha256 {hashlib.sha256(ref).hexdigest()[:16]} identical for tiles {same}")


# -- criterion 9: property suites at their stated sizes ------------------------------------

REAL_PRESETS = ["fig1b", "fig2a", "fig2c", "fig2d", "cossqrt", "mv-g0", "mv-example2"]


def test_criterion_09a_reflection_identity():
    rng = np.random.default_rng(91)
    z = rng.uniform(-3, 3, 1000) + 1j * rng.uniform(-3, 3, 1000)
    worst = 0.0
    for name in REAL_PRESETS:
        f = preset(name)
        a, b = f(z.conjugate()), np.conjugate(f(z))
        worst = max(worst, float(np.max(np.abs(a - b) / (1 + np.abs(a)))))
    report(9, worst < 1e-12, f"reflection identity f(conj z) = conj f(z) on 1000 points x {len(REAL_PRESETS)} maps, "
                             f"worst {worst:.1e} < 1e-12")


def _conj_perm(cycles):
    perm = []
    for c in cycles:
        pts = np.conjugate(c.points)
        perm.append(next(k for k, d in enumerate(cycles)
                         if d.period == c.period and min(abs(d.points[0] - p) for p in pts) < 1e-9))
    return np.array(perm)


def test_criterion_09b_conjugate_symmetry_of_fates():
    rng = np.random.default_rng(92)
    z = rng.uniform(-4, 4, 1000) + 1j * rng.uniform(-4, 4, 1000)
    bad = 0
    for name in REAL_PRESETS:
        f = preset(name)
        cyc = cycles_of(f)
        perm = _conj_perm(cyc)
        s1, c1, t1 = classify_points(f, cyc, z, 500)
        s2, c2, t2 = classify_points(f, cyc, z.conjugate(), 500)
        mapped = np.where(c1 >= 0, perm[np.maximum(c1, 0)], -1)
        bad += int(np.count_nonzero((s1 != s2) | (mapped != c2) | (t1 != t2)))
    report(9, bad == 0, f"conjugate symmetry of fates on 1000 points x {len(REAL_PRESETS)} maps, {bad} mismatches")


def test_criterion_09c_monotone_decidedness():
    rng = np.random.default_rng(93)
    z = rng.uniform(-5, 5, 1000) + 1j * rng.uniform(-5, 5, 1000)
    bad = 0
    names = ["fig1a", "fig2b", "fig2d", "cossqrt"]
    for name in names:
        f = preset(name)
        cyc = cycles_of(f)
        short = classify_points(f, cyc, z, 20)
        long = classify_points(f, cyc, z, 2000)
        decided = short[0] != 0
        bad += int(np.count_nonzero(decided & ((short[0] != long[0]) | (short[1] != long[1]) | (short[2] != long[2]))))
        bad += int(np.count_nonzero(long[0] == 0) > np.count_nonzero(short[0] == 0))
    report(9, bad == 0, f"monotone decidedness on 1000 points x {len(names)} maps (20 vs 2000 iterations), {bad} violations")


def test_criterion_09d_argument_principle():
    rng = np.random.default_rng(94)
    checked = mismatch = 0
    for name in ["fig2d", "cossqrt"]:
        f = preset(name)
        done = 0
        while done < 20:
            x0, y0 = rng.uniform(-4, 3, 2)
            box = (x0, x0 + rng.uniform(0.5, 3), y0, y0 + rng.uniform(0.5, 3))
            try:
                count = argument_count(f.deriv, box)
                pts = critical_points(f, box)
            except BoundaryZero:
                continue
            done += 1
            checked += 1
            mismatch += count != sum(p.multiplicity for p in pts)
    report(9, checked == 40 and mismatch == 0,
           f"argument principle vs located critical points on 20 boxes x 2 maps, {mismatch} mismatches")


def test_criterion_09e_trap_invariance():
    total = failed = 0
    for name in FUNCTION_PRESETS:
        f = preset(name)
        for c in cycles_of(f):
            total += 1
            failed += not verify_trap(f, c, samples=720)
    report(9, total > 0 and failed == 0, f"trap forward invariance on 720 boundary samples for {total} cycles, {failed} failures")


# -- criterion 10: example checks ------------------------------------------------------------

def test_criterion_10a_example1_trend():
    x = np.linspace(-2, 2, 41)
    z = (x[None, :] + 1j * x[:, None]).ravel()
    vals = [truncated_example1(0.05, M)(z) for M in (3, 7, 11, 15)]
    d = [float(np.max(np.abs(a - b))) for a, b in zip(vals, vals[1:])]
    ratios = [d[1] / d[0], d[2] / d[1]]
    report(10, all(r < 1 for r in ratios),
           f"example1(0.05, M) sup-differences {['%.3g' % v for v in d]} for M 3->7->11->15, ratios {['%.3f' % r for r in ratios]} < 1")


def test_criterion_10b_example2_multiplicity():
    f = example2_stage((1, 5))
    tips = np.sort(f.comb.tips)
    found = []
    for lo, hi in zip(tips, tips[1:]):
        found += [p for p in critical_points(f, (lo + 0.05, hi - 0.05, -0.4, 0.4))
                  if p.multiplicity == 3 and abs(p.location.imag) < 1e-8]
    xs = sorted(p.location.real for p in found)
    # the map is even, so triple points come in mirror pairs
    ok = len(found) >= 1 and np.allclose(xs, [-x for x in reversed(xs)], atol=1e-8)
    report(10, ok, f"example2(1,5) real critical points of multiplicity 3 between tips: {[round(x, 8) for x in xs]}")


def test_criterion_10c_mv0_unbounded_component():
    f = ClosedFormMV0()
    cyc = cycles_of(f)
    zero = next(k for k, c in enumerate(cyc) if c.period == 1 and abs(c.points[0]) < 1e-12)
    vp = Viewport.square(0j, 8.0, 400)
    g = classify_grid(f, cyc, vp)
    comps = [g.component_at(x) for x in np.linspace(2.0, 3.9, 39)]
    one = None not in comps and len({c.id for c in comps}) == 1 and comps[0].cycle_id == zero
    ev = unbounded_evidence(f, cyc, vp, 3.0)
    report(10, one and ev is True, f"ClosedFormMV0 component through [2, 3.9] attracted to 0: {one}; "
                                   f"touches frame at widths 8 and 16: {ev}")
