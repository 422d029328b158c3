"""Orbits, attracting cycles with verified trap discs, and hyperbolicity checks."""
from __future__ import annotations

import cmath
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import Inconclusive, NoCycleFound, TrapConstructionFailed
from .zoo import FunctionSpec, singular_set

log = logging.getLogger(__name__)

ESCAPE_RADIUS = 1e8
MAX_PERIOD = 32
TAIL = 64
TRAP_SAMPLES = 720
# 10^-1, 10^-1.5, ..., 10^-6
TRAP_SCHEDULE = tuple(10.0 ** (-k / 2) for k in range(2, 13))

UNDECIDED, ATTRACTED, ESCAPED = 0, 1, 2
VERDICTS = {UNDECIDED: "Undecided", ATTRACTED: "Attracted", ESCAPED: "Escaped"}


@dataclass(frozen=True)
class PointFate:
    verdict: str
    cycle_id: int | None = None
    time: int | None = None          # landing time (Attracted) or first exit time (Escaped)
    orbit_len_used: int = 0

    @property
    def attracted(self) -> bool:
        return self.verdict == "Attracted"

    def to_json(self):
        return {"verdict": self.verdict, "cycle_id": self.cycle_id, "time": self.time,
                "orbit_len_used": self.orbit_len_used}


@dataclass
class AttractingCycle:
    """Attracting periodic orbit with one trap-disc radius per point.

    The union of discs D(points[j], trap_radius[j]) is forward invariant:
    f maps each disc strictly inside the disc of the next point.
    """

    period: int
    points: list
    multiplier: complex
    trap_radius: list = field(default_factory=list)

    def contains(self, z) -> bool:
        return any(abs(z - p) < r for p, r in zip(self.points, self.trap_radius))

    def to_json(self):
        return {
            "period": self.period,
            "points": [[p.real, p.imag] for p in self.points],
            "multiplier": [self.multiplier.real, self.multiplier.imag],
            "multiplier_modulus": abs(self.multiplier),
            "trap_radius": list(self.trap_radius),
        }


def cycle_arrays(cycles):
    """Flatten cycles into the (points, ids, radii) arrays the kernels take."""
    pts, ids, rad = [], [], []
    for cid, c in enumerate(cycles):
        for p, r in zip(c.points, c.trap_radius):
            pts.append(p)
            ids.append(cid)
            rad.append(r)
    return (np.array(pts, np.complex128), np.array(ids, np.int64), np.array(rad, np.float64))


# --------------------------------------------------------------------------
# orbits

def _scalar(f: FunctionSpec, z: complex) -> complex:
    return complex(f(z))


def iterate(f: FunctionSpec, z0, max_iter: int = 1000, escape_radius: float = ESCAPE_RADIUS,
            cycles=()):
    """Iterate until trap entry, escape, or budget exhaustion.

    Returns ``(fate, orbit)``, where ``orbit`` holds z0 up to and including
    the deciding point.  Overflow counts as escape.
    """
    if max_iter < 1:
        raise ValueError("max_iter must be >= 1")
    if escape_radius < 1e3:
        raise ValueError("escape_radius must be >= 1e3")
    z = complex(z0)
    orbit = [z]
    for n in range(max_iter + 1):
        for cid, c in enumerate(cycles):
            if c.contains(z):
                return PointFate("Attracted", cid, n, n), orbit
        if not abs(z) <= escape_radius:
            return PointFate("Escaped", None, n, n), orbit
        if n == max_iter:
            break
        z = _scalar(f, z)
        orbit.append(z)
    return PointFate("Undecided", None, None, max_iter), orbit


def classify_points(f: FunctionSpec, cycles, zs, max_iter: int = 1000,
                    escape_radius: float = ESCAPE_RADIUS, backend=None):
    """Batch fates via the kernel: (status, cycle_id, time) integer arrays."""
    code, params, roots, orders = f.kernel_params()
    pts, ids, rad = cycle_arrays(cycles)
    zs = np.ascontiguousarray(np.asarray(zs, np.complex128).ravel())
    impl = kernels.get_backend(backend)
    return impl.classify_points(code, np.ascontiguousarray(params, np.complex128),
                                np.ascontiguousarray(roots, np.float64),
                                np.ascontiguousarray(orders, np.int64), zs,
                                pts, ids, rad, int(max_iter), float(escape_radius))


def fates_from_arrays(status, cycle, steps, max_iter):
    out = []
    for s, c, t in zip(status, cycle, steps):
        if s == ATTRACTED:
            out.append(PointFate("Attracted", int(c), int(t), int(t)))
        elif s == ESCAPED:
            out.append(PointFate("Escaped", None, int(t), int(t)))
        else:
            out.append(PointFate("Undecided", None, None, int(max_iter)))
    return out


# --------------------------------------------------------------------------
# cycles

def _orbit_derivative(f, z, p):
    """(f^p(z), (f^p)'(z)) by the chain rule."""
    d = 1.0 + 0j
    for _ in range(p):
        d *= complex(f.deriv(z))
        z = complex(f(z))
    return z, d


def _refine_cycle(f, z, p, iters=60):
    for _ in range(iters):
        w, d = _orbit_derivative(f, z, p)
        F = w - z
        if abs(F) < 1e-14 * (1 + abs(z)):
            break
        den = d - 1
        if den == 0 or not cmath.isfinite(den):
            return None
        z = z - F / den
        if not cmath.isfinite(z):
            return None
    w, _ = _orbit_derivative(f, z, p)
    if not abs(w - z) < 1e-9:
        return None
    return z


def _closest_return(tail, max_period, tol):
    tail = np.asarray(tail)
    n = len(tail) - max_period
    scale = 1 + np.max(np.abs(tail))
    for p in range(1, max_period + 1):
        dist = np.max(np.abs(tail[max_period:] - tail[max_period - p:max_period - p + n]))
        if dist < tol * scale:
            return p
    return None


def _canonical(points):
    k = min(range(len(points)), key=lambda i: (round(abs(points[i]), 12), points[i].real, points[i].imag))
    return points[k:] + points[:k]


def find_cycle(f, seed, max_period=MAX_PERIOD, max_iter=10000, escape_radius=ESCAPE_RADIUS):
    """Attracting cycle reached by the orbit of seed (trap radii not yet set)."""
    z = complex(seed)
    tail = []
    need = TAIL + max_period
    for n in range(max_iter):
        z = _scalar(f, z)
        if not abs(z) <= escape_radius:
            raise NoCycleFound(f"orbit of {seed!r} escapes at step {n + 1}")
        tail.append(z)
        if len(tail) > need:
            del tail[0]
        if len(tail) == need and n % 16 == 15:
            p = _closest_return(tail, max_period, 1e-7)
            if p is None:
                continue
            z0 = _refine_cycle(f, tail[-1], p)
            if z0 is None:
                continue
            pts = [z0]
            for _ in range(p - 1):
                pts.append(complex(f(pts[-1])))
            # minimal period
            if p > 1 and any(abs(pts[q] - pts[0]) < 1e-9 for q in range(1, p)):
                continue
            mult = 1.0 + 0j
            for w in pts:
                mult *= complex(f.deriv(w))
            if not abs(mult) < 1 - 1e-9:
                raise NoCycleFound(f"cycle of period {p} from {seed!r} is not attracting (|mult|={abs(mult):.3g})")
            return AttractingCycle(p, _canonical(pts), mult)
    raise NoCycleFound(f"no periodic tail for {seed!r} within {max_iter} steps")


def _maps_inside(f, center, r, target, r_target, samples=TRAP_SAMPLES):
    th = np.linspace(0, 2 * np.pi, samples, endpoint=False)
    img = f(center + r * np.exp(1j * th))
    return bool(np.all(np.abs(img - target) < r_target))


def verify_trap(f, cycle: AttractingCycle, samples=TRAP_SAMPLES) -> bool:
    p = cycle.period
    return all(_maps_inside(f, cycle.points[j], cycle.trap_radius[j], cycle.points[(j + 1) % p],
                            cycle.trap_radius[(j + 1) % p], samples) for j in range(p))


def build_trap(f, points, limit=np.inf):
    """Largest schedule radius r (at points[0]) admitting a forward-invariant
    disc chain; the other radii are pulled back along the cycle."""
    p = len(points)
    cap = min(limit, TRAP_SCHEDULE[0])
    for r0 in TRAP_SCHEDULE:
        if r0 > limit:
            continue
        radii = [0.0] * p
        radii[0] = r0
        ok = True
        for j in range(p - 1, 0, -1):
            nxt = radii[(j + 1) % p]
            for k in range(0, 121):
                r = cap * 10.0 ** (-k / 8)
                if _maps_inside(f, points[j], r, points[(j + 1) % p], nxt):
                    radii[j] = r
                    break
            else:
                ok = False
                break
        if ok and _maps_inside(f, points[0], r0, points[1 % p], radii[1 % p]):
            return radii
    raise TrapConstructionFailed(f"no verified trap around cycle {points}")


def detect_cycles(f: FunctionSpec, seeds, max_period: int = MAX_PERIOD, max_iter: int = 10000,
                  escape_radius: float = ESCAPE_RADIUS):
    """Attracting cycles reached from the seeds, deduplicated, with traps."""
    cycles = []
    for s in seeds:
        try:
            c = find_cycle(f, s, max_period, max_iter, escape_radius)
        except NoCycleFound as exc:
            log.info("%s", exc)
            continue
        if any(c.period == o.period and min(abs(c.points[0] - q) for q in o.points) < 1e-6
               for o in cycles):
            continue
        cycles.append(c)
    allpts = np.array([q for c in cycles for q in c.points])
    start = 0
    for c in cycles:
        own = np.arange(start, start + c.period)
        start += c.period
        dist = np.abs(allpts[own][:, None] - allpts[None, :])
        dist[np.arange(c.period), own] = np.inf
        limit = 0.45 * dist.min() if dist.size > c.period else np.inf
        c.trap_radius = build_trap(f, c.points, limit)
    return cycles


# --------------------------------------------------------------------------
# hyperbolicity

@dataclass
class HyperbolicityReport:
    is_class_B: bool
    singular_values: list
    singular_fates: list
    cycles: list
    hyperbolic: bool | None
    postsingular_truncation: list

    def require(self):
        if self.hyperbolic is None:
            raise Inconclusive("some singular value is undecided at the iteration budget")
        return self.hyperbolic

    def to_json(self):
        return {
            "is_class_B": self.is_class_B,
            "hyperbolic": self.hyperbolic,
            "cycles": [c.to_json() for c in self.cycles],
            "singular_fates": [{"value": [v.real, v.imag], "fate": fate.to_json()}
                               for v, fate in zip(self.singular_values, self.singular_fates)],
            "postsingular_truncation": [[[z.real, z.imag] for z in orb]
                                        for orb in self.postsingular_truncation],
        }


def hyperbolicity_report(f: FunctionSpec, max_iter: int = 10000, escape_radius: float = ESCAPE_RADIUS,
                         truncation: int = 200) -> HyperbolicityReport:
    sing = singular_set(f)
    values = sing.values
    cycles = detect_cycles(f, values, max_iter=max_iter, escape_radius=escape_radius)
    fates, post = [], []
    for v in values:
        fate, _ = iterate(f, v, max_iter, escape_radius, cycles)
        fates.append(fate)
        orb = [complex(v)]
        for _ in range(truncation - 1):
            z = _scalar(f, orb[-1])
            if not abs(z) <= escape_radius:
                break
            orb.append(z)
        post.append(orb)
    if any(x.verdict == "Undecided" for x in fates):
        hyp = None
    else:
        hyp = all(x.attracted for x in fates)
    if hyp is not None:
        hyp = hyp and sing.is_class_b
    return HyperbolicityReport(sing.is_class_b, values, fates, cycles, hyp, post)


# --------------------------------------------------------------------------
# real fixed points

def _stability(d: float) -> str:
    if d < 1e-9:
        return "superattracting"
    if d < 1 - 1e-9:
        return "attracting"
    if d > 1 + 1e-9:
        return "repelling"
    return "neutral"


def real_fixed_points(f: FunctionSpec, interval, grid: int = 10001, xtol: float = 1e-12):
    """Solutions of f(x) = x on [lo, hi]: sign-change bracketing + bisection.

    Returns a list of (x, stability) with stability one of
    superattracting / attracting / repelling / neutral.
    """
    lo, hi = map(float, interval)
    xs = np.linspace(lo, hi, grid)
    g = lambda x: complex(f(x)).real - x
    v = np.real(f(xs)) - xs
    s = np.sign(np.where(np.abs(v) < 1e-14, 0.0, v))
    roots = []
    i = 0
    while i < grid:
        if s[i] == 0:
            j = i
            while j + 1 < grid and s[j + 1] == 0:
                j += 1
            roots.append(float(xs[(i + j) // 2]))
            i = j + 1
            continue
        if i + 1 < grid and s[i] * s[i + 1] < 0:
            a, b, ga = xs[i], xs[i + 1], v[i]
            while b - a > xtol:
                m = 0.5 * (a + b)
                gm = g(m)
                if gm == 0:
                    a = b = m
                    break
                if (gm < 0) == (ga < 0):
                    a, ga = m, gm
                else:
                    b = m
            roots.append(0.5 * (a + b))
        i += 1
    return [(x, _stability(abs(complex(f.deriv(x))))) for x in roots]
