"""The reproduction table behind ``entiredyn verify``.

Each row returns PASS, FAIL or UNKNOWN with a one-line detail.
"""
from __future__ import annotations

import hashlib
import math
import time
from dataclasses import dataclass

import numpy as np

from . import audit as _audit
from .dynamics import detect_cycles, hyperbolicity_report
from .errors import EntireDynError
from .mv import build_slit_domain, cossqrt_threshold, example2_stage, solve_parameters, truncated_example1
from .presets import FUNCTION_PRESETS, THRESHOLD_REFERENCE, fig2b, preset_function
from .render import Viewport, classify_grid, ppm_bytes, render, unbounded_evidence
from .zoo import ClosedFormMV0, Cosine, CosSqrt, ExpAffine, critical_points, singular_set

PASS, FAIL, UNKNOWN = "PASS", "FAIL", "UNKNOWN"


@dataclass
class Row:
    name: str
    claim: str
    verdict: str
    detail: str
    seconds: float = 0.0

    def line(self) -> str:
        return f"{self.verdict:<7} {self.name:<26} {self.claim:<48} {self.detail} [{self.seconds:.2f}s]"


def _ok(flag) -> str:
    return PASS if flag else FAIL


def lower_grid():
    x = np.linspace(-2.0, 2.0, 10)
    y = np.linspace(-2.0, 0.0, 11)[:-1]
    return (x[None, :] + 1j * y[:, None]).ravel()


def g0_exact(z):
    return -z * z * np.exp(1 - z * z)


def row_threshold():
    t = time.perf_counter()
    u = cossqrt_threshold()
    dt = time.perf_counter() - t
    return _ok(abs(u - THRESHOLD_REFERENCE) < 1e-5 and dt < 5.0), f"u* = {u:.10f} (ref {THRESHOLD_REFERENCE}), {dt:.2f}s"


def row_mv_g0():
    t = time.perf_counter()
    comb = solve_parameters(build_slit_domain({-1: -1.0, 1: -1.0}))
    z = lower_grid()
    z = np.concatenate([z, z.conjugate()])
    g = comb.g(z)
    err = float(np.max(np.abs(g - g0_exact(z)) / (1 + np.abs(g))))
    dt = time.perf_counter() - t
    return _ok(err < 1e-6 and dt < 120), f"max rel err {err:.2e}"


def row_single_slit():
    comb = solve_parameters(build_slit_domain({0: 1.0}))
    rng = np.random.default_rng(7)
    z = rng.uniform(-2, 2, 50) + 1j * rng.uniform(-2, 2, 50)
    err = float(np.max(np.abs(comb.g(z) - np.exp(-z * z))))
    return _ok(err < 1e-8), f"max err {err:.2e}"


def _cycles(f):
    return detect_cycles(f, singular_set(f).values)


def row_cycles_fig1a():
    cyc = _cycles(ExpAffine(2 + 0.5j * math.pi))
    return _ok(sorted(c.period for c in cyc) == [3]), f"periods {[c.period for c in cyc]}"


def row_cycles_fig2d():
    cyc = _cycles(Cosine.symmetric(2.0))
    fixed0 = any(c.period == 1 and abs(c.points[0]) < 1e-12 for c in cyc)
    two = any(c.period == 2 for c in cyc)
    return _ok(fixed0 and two), f"periods {[c.period for c in cyc]}"


def row_cycles_fig2b():
    cyc = _cycles(fig2b())
    hit = [c for c in cyc if c.period == 2 and min(abs(p) for p in c.points) < 1e-9
           and min(abs(p - 4j) for p in c.points) < 1e-9]
    ok = len(cyc) == 1 and bool(hit) and abs(hit[0].multiplier) < 1e-9
    return _ok(ok), f"cycles {[(c.period, abs(c.multiplier)) for c in cyc]}"


def _dichotomy_row(f, expected):
    def row():
        ev = []
        case = _audit.dichotomy_case(f, evidence=ev)
        if case is None:
            return UNKNOWN, "; ".join(ev)
        return _ok(case == expected), f"{case} (expected {expected})"
    return row


def cossqrt_critical_values(u=3.0):
    """Critical values from numerically located critical points near 0, 1 and
    the first positive critical point past 1."""
    f = CosSqrt(u)
    z2 = singular_set(f).critical_points[2].location.real
    boxes = [(-0.5, 0.5, -0.5, 0.5), (0.7, 1.3, -0.3, 0.3), (z2 - 0.2, z2 + 0.2, -0.2, 0.2)]
    found = []
    for box in boxes:
        found += [complex(f(p.location)) for p in critical_points(f, box)]
    return found


def row_cossqrt_critical():
    found = cossqrt_critical_values(3.0)
    ok = all(any(abs(v - w) < 1e-9 for v in found) for w in (0.0, 1.0, 0.5))
    ok = ok and all(min(abs(v - w) for w in (0.0, 1.0, 0.5)) < 1e-9 for v in found)
    return _ok(ok), f"critical values {[round(v.real, 12) for v in found]}"


def _hyperbolic_row(name):
    def row():
        rep = hyperbolicity_report(preset_function(name), max_iter=10_000)
        if rep.hyperbolic is None:
            return UNKNOWN, "undecided singular fates"
        return _ok(rep.hyperbolic), f"periods {[c.period for c in rep.cycles]}"
    return row


def row_determinism():
    f = Cosine.symmetric(2.0)
    cyc = _cycles(f)
    vp = Viewport.square(0j, 8.0, 800)
    ref = hashlib.sha256(ppm_bytes(render(classify_grid(f, cyc, vp)))).hexdigest()
    same = [hashlib.sha256(ppm_bytes(render(classify_grid(f, cyc, vp, tile=t)))).hexdigest() == ref
            for t in (16, 64, 256)]
    return _ok(all(same)), f"sha256 {ref[:12]} tiles 16/64/256 identical: {same}"


def row_example1_trend():
    x = np.linspace(-2, 2, 41)
    z = (x[None, :] + 1j * x[:, None]).ravel()
    vals = [truncated_example1(0.05, M)(z) for M in (3, 7, 11, 15)]
    d = [float(np.max(np.abs(a - b))) for a, b in zip(vals, vals[1:])]
    ratios = [d[1] / d[0], d[2] / d[1]]
    return _ok(all(r < 1 for r in ratios)), f"sup-differences {['%.3g' % v for v in d]}"


def row_example2_multiplicity():
    f = example2_stage((1, 5))
    t1, t2 = f.comb.tips[2], f.comb.tips[3]
    pts = critical_points(f, (t1 + 0.1, t2 - 0.1, -0.5, 0.5))
    mult = [p.multiplicity for p in pts]
    return _ok(mult == [3]), f"critical points between tips: {[(round(p.location.real, 6), p.multiplicity) for p in pts]}"


def row_fig1b_unbounded():
    f = ClosedFormMV0()
    cyc = _cycles(f)
    vp = Viewport.square(0j, 8.0, 400)
    g = classify_grid(f, cyc, vp)
    zero = [k for k, c in enumerate(cyc) if c.period == 1 and abs(c.points[0]) < 1e-12][0]
    xs = np.linspace(2.0, 3.9, 39)
    comps = {g.component_at(x).id if g.component_at(x) else None for x in xs}
    cids = {g.component_at(x).cycle_id if g.component_at(x) else None for x in xs}
    if len(comps) != 1 or None in comps or cids != {zero}:
        return FAIL, f"segment components {comps}, cycles {cids}"
    ev = unbounded_evidence(f, cyc, vp, 3.0)
    return _ok(ev), f"one component attracted to 0; touches frame at widths 8 and 16: {ev}"


ROWS = {
    "cossqrt-threshold": ("threshold u* = 2.7981186 +- 1e-5, < 5 s", row_threshold),
    "mv-g0": ("{+-1:-1} map = -z^2 exp(1-z^2), rel 1e-6", row_mv_g0),
    "mv-single-slit": ("{0:1} map = exp(-z^2), 1e-8", row_single_slit),
    "cycles-fig1a": ("exp(z)+2+pi i/2: period 3", row_cycles_fig1a),
    "cycles-fig2d": ("lambda=2: fixed 0 + period 2", row_cycles_fig2d),
    "cycles-fig2b": ("fig2b: superattracting {0, 4i}", row_cycles_fig2b),
    "dichotomy-fig2a": ("lambda=3/4 -> Case1", _dichotomy_row(Cosine.symmetric(0.75), _audit.CASE1)),
    "dichotomy-fig2b": ("fig2b -> Case1", _dichotomy_row(fig2b(), _audit.CASE1)),
    "dichotomy-fig2c": ("lambda=4pi/3 -> Case2", _dichotomy_row(Cosine.symmetric(4 * math.pi / 3), _audit.CASE2)),
    "dichotomy-fig2d": ("lambda=2 -> Case2", _dichotomy_row(Cosine.symmetric(2.0), _audit.CASE2)),
    "cossqrt-critical": ("u=3 critical values {0, 1, 0.5}", row_cossqrt_critical),
    **{f"hyperbolic-{n}": (f"{n} hyperbolic at 1e4 iterations", _hyperbolic_row(n)) for n in FUNCTION_PRESETS},
    "determinism-fig2d": ("fig2d 800^2 PPM tile-independent", row_determinism),
    "example1-trend": ("example1(0.05, M) Cauchy trend", row_example1_trend),
    "example2-multiplicity": ("example2(1,5) triple critical point", row_example2_multiplicity),
    "fig1b-unbounded": ("g0: [2, 3.9] in unbounded basin of 0", row_fig1b_unbounded),
}


def run_rows(names=None):
    out = []
    for name in names or ROWS:
        if name not in ROWS:
            raise KeyError(f"unknown verify row {name!r}")
        claim, fn = ROWS[name]
        t = time.perf_counter()
        try:
            verdict, detail = fn()
        except EntireDynError as exc:
            verdict, detail = FAIL, f"{type(exc).__name__}: {exc}"
        out.append(Row(name, claim, verdict, detail, time.perf_counter() - t))
    return out
