"""Families of entire functions, derivatives, critical points and singular sets."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import ClassVar, NamedTuple

import numpy as np

from .combmap import CombMap
from .errors import BoundaryZero, CountMismatch, Overflow

# kernel family codes, shared with the compiled core
EXP_AFFINE, COSINE, COS_SQRT, MV_CLOSED, MV_NUMERIC = range(5)


def _c(z) -> complex:
    return complex(z)


def _cjson(z) -> list:
    z = complex(z)
    return [z.real, z.imag]


def _from_cjson(v) -> complex:
    if isinstance(v, (list, tuple)):
        return complex(v[0], v[1])
    return complex(v)


class FunctionSpec:
    """Base class: an immutable member of a named entire-function family.

    Instances are callable on scalars or arrays; the vectorized call never
    raises and lets overflow show up as inf/nan.  Use :func:`evaluate` for a
    checked scalar evaluation.
    """

    family: ClassVar[str] = ""
    kernel_code: ClassVar[int] = -1
    label: str

    def __call__(self, z):
        raise NotImplementedError

    def deriv(self, z):
        raise NotImplementedError

    def deriv2(self, z):
        raise NotImplementedError

    @property
    def real_symmetric(self) -> bool:
        return False

    def params_json(self) -> dict:
        raise NotImplementedError

    def kernel_params(self):
        """(code, complex params, real roots, integer orders) for the kernels."""
        return (self.kernel_code, np.zeros(4, complex), np.zeros(0), np.zeros(0, np.int64))

    def to_json(self) -> dict:
        return {"family": self.family, "params": self.params_json(), "label": self.label}


@dataclass(frozen=True)
class ExpAffine(FunctionSpec):
    """z -> exp(z) + c."""

    c: complex
    label: str = ""
    family: ClassVar[str] = "ExpAffine"
    kernel_code: ClassVar[int] = EXP_AFFINE

    def __post_init__(self):
        object.__setattr__(self, "c", _c(self.c))

    def __call__(self, z):
        with np.errstate(over="ignore", invalid="ignore"):
            return np.exp(np.asarray(z, complex)) + self.c

    def deriv(self, z):
        with np.errstate(over="ignore", invalid="ignore"):
            return np.exp(np.asarray(z, complex))

    deriv2 = deriv

    @property
    def real_symmetric(self):
        return self.c.imag == 0

    def params_json(self):
        return {"c": _cjson(self.c)}

    def kernel_params(self):
        p = np.zeros(4, complex)
        p[0] = self.c
        return (self.kernel_code, p, np.zeros(0), np.zeros(0, np.int64))


@dataclass(frozen=True)
class Cosine(FunctionSpec):
    """z -> a cos(z) + b with a != 0."""

    a: complex
    b: complex
    label: str = ""
    family: ClassVar[str] = "Cosine"
    kernel_code: ClassVar[int] = COSINE

    def __post_init__(self):
        object.__setattr__(self, "a", _c(self.a))
        object.__setattr__(self, "b", _c(self.b))
        if self.a == 0:
            raise ValueError("Cosine requires a != 0")

    @classmethod
    def symmetric(cls, lam, label=""):
        """The normalization -a = b = lam, with a superattracting fixed point at 0."""
        return cls(-lam, lam, label)

    def __call__(self, z):
        with np.errstate(over="ignore", invalid="ignore"):
            return self.a * np.cos(np.asarray(z, complex)) + self.b

    def deriv(self, z):
        with np.errstate(over="ignore", invalid="ignore"):
            return -self.a * np.sin(np.asarray(z, complex))

    def deriv2(self, z):
        with np.errstate(over="ignore", invalid="ignore"):
            return -self.a * np.cos(np.asarray(z, complex))

    @property
    def real_symmetric(self):
        return self.a.imag == 0 and self.b.imag == 0

    def params_json(self):
        return {"a": _cjson(self.a), "b": _cjson(self.b)}

    def kernel_params(self):
        p = np.zeros(4, complex)
        p[:2] = self.a, self.b
        return (self.kernel_code, p, np.zeros(0), np.zeros(0, np.int64))


def cos_sqrt(w):
    """cos(sqrt(w)) as an entire function of w (independent of the root's branch)."""
    w = np.asarray(w, complex)
    neg = (w.imag == 0) & (w.real < 0)
    with np.errstate(over="ignore", invalid="ignore"):
        out = np.cos(np.sqrt(w))
        if np.any(neg):
            out = np.where(neg, np.cosh(np.sqrt(np.abs(w.real))) + 0j, out)
    return out


def sinc_sqrt(w):
    """sin(s)/s with s = sqrt(w); even in s, so entire in w."""
    w = np.asarray(w, complex)
    small = np.abs(w) < 1e-2
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        s = np.sqrt(w)
        out = np.sin(s) / s
    series = 1 - w / 6 + w * w / 120 - w ** 3 / 5040 + w ** 4 / 362880
    return np.where(small, series, out)


def _h_sqrt(w):
    """(s cos s - sin s) / s**3 with s = sqrt(w)."""
    w = np.asarray(w, complex)
    small = np.abs(w) < 1e-2
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        s = np.sqrt(w)
        out = (s * np.cos(s) - np.sin(s)) / (s * w)
    series = -1 / 3 + w / 30 - w * w / 840 + w ** 3 / 45360
    return np.where(small, series, out)


@dataclass(frozen=True)
class CosSqrt(FunctionSpec):
    """(u - cos sqrt((arcosh(u)^2 + pi^2) z^2 - arcosh(u)^2)) / (u + 1), u > 1.

    Critical values 0, 1 and (u - 1)/(u + 1); no asymptotic values.
    """

    u: float
    label: str = ""
    family: ClassVar[str] = "CosSqrt"
    kernel_code: ClassVar[int] = COS_SQRT

    def __post_init__(self):
        object.__setattr__(self, "u", float(self.u))
        if not self.u > 1:
            raise ValueError("CosSqrt requires u > 1")

    @property
    def B(self) -> float:
        return math.acosh(self.u) ** 2

    @property
    def A(self) -> float:
        return self.B + math.pi ** 2

    @property
    def c_u(self) -> float:
        return (self.u - 1) / (self.u + 1)

    def _w(self, z):
        z = np.asarray(z, complex)
        return self.A * z * z - self.B

    def __call__(self, z):
        return (self.u - cos_sqrt(self._w(z))) / (self.u + 1)

    def deriv(self, z):
        z = np.asarray(z, complex)
        return self.A * z * sinc_sqrt(self._w(z)) / (self.u + 1)

    def deriv2(self, z):
        z = np.asarray(z, complex)
        w = self._w(z)
        return self.A * (sinc_sqrt(w) + self.A * z * z * _h_sqrt(w)) / (self.u + 1)

    @property
    def real_symmetric(self):
        return True

    def params_json(self):
        return {"u": self.u}

    def kernel_params(self):
        p = np.zeros(4, complex)
        p[:3] = self.A, self.B, self.u
        return (self.kernel_code, p, np.zeros(0), np.zeros(0, np.int64))


@dataclass(frozen=True)
class ClosedFormMV0(FunctionSpec):
    """-z^2 exp(1 - z^2)."""

    label: str = ""
    family: ClassVar[str] = "ClosedFormMV0"
    kernel_code: ClassVar[int] = MV_CLOSED

    def __call__(self, z):
        z = np.asarray(z, complex)
        with np.errstate(over="ignore", invalid="ignore"):
            return -z * z * np.exp(1 - z * z)

    def deriv(self, z):
        z = np.asarray(z, complex)
        with np.errstate(over="ignore", invalid="ignore"):
            return 2 * z * (z * z - 1) * np.exp(1 - z * z)

    def deriv2(self, z):
        z = np.asarray(z, complex)
        z2 = z * z
        with np.errstate(over="ignore", invalid="ignore"):
            return (-4 * z2 * z2 + 10 * z2 - 2) * np.exp(1 - z2)

    @property
    def real_symmetric(self):
        return True

    def params_json(self):
        return {}


@dataclass(frozen=True)
class MVNumeric(FunctionSpec):
    """g = exp(phi) for a numerically solved comb map."""

    comb: CombMap
    label: str = ""
    family: ClassVar[str] = "MVNumeric"
    kernel_code: ClassVar[int] = MV_NUMERIC

    def __call__(self, z):
        return self.comb.g(z)

    def deriv(self, z):
        return self.comb.dg(z)

    def deriv2(self, z):
        return self.comb.d2g(z)

    @property
    def real_symmetric(self):
        return True

    def params_json(self):
        return {"support": {str(n): c for n, c in sorted(self.comb.support.items())},
                "map": self.comb.to_json()}

    def kernel_params(self):
        m = self.comb
        p = np.array([m.d, m.a, m.b, m.sign], complex)
        return (self.kernel_code, p, np.asarray(m.poles, float), np.asarray(m.orders, np.int64))


FAMILIES = {cls.family: cls for cls in (ExpAffine, Cosine, CosSqrt, ClosedFormMV0, MVNumeric)}


def function_from_json(obj: dict) -> FunctionSpec:
    fam = obj["family"]
    params = obj.get("params", {})
    label = obj.get("label", "")
    if fam == "ExpAffine":
        return ExpAffine(_from_cjson(params["c"]), label)
    if fam == "Cosine":
        return Cosine(_from_cjson(params["a"]), _from_cjson(params["b"]), label)
    if fam == "CosSqrt":
        return CosSqrt(float(params["u"]), label)
    if fam == "ClosedFormMV0":
        return ClosedFormMV0(label)
    if fam == "MVNumeric":
        if "map" in params:
            return MVNumeric(CombMap.from_json(params["map"]), label)
        from .mv import build_slit_domain, solve_parameters
        support = {int(n): float(c) for n, c in params["support"].items()}
        return MVNumeric(solve_parameters(build_slit_domain(support)), label)
    raise ValueError(f"unknown family {fam!r}")


# --------------------------------------------------------------------------
# checked evaluation

def evaluate(f: FunctionSpec, z) -> complex:
    """f(z) for a finite scalar z; raises Overflow instead of returning inf/nan."""
    z = complex(z)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise ValueError(f"z must be finite, got {z!r}")
    v = complex(f(z))
    if not (math.isfinite(v.real) and math.isfinite(v.imag)):
        raise Overflow(z, v)
    return v


def evaluate_deriv(f: FunctionSpec, z) -> complex:
    z = complex(z)
    v = complex(f.deriv(z))
    if not (math.isfinite(v.real) and math.isfinite(v.imag)):
        raise Overflow(z, v)
    return v


# --------------------------------------------------------------------------
# singular sets

class CriticalPoint(NamedTuple):
    location: complex
    multiplicity: int


@dataclass
class SingularSet:
    critical_values: list
    asymptotic_values: list
    critical_points: list = field(default_factory=list)
    provenance: str = "Symbolic"
    # index labels covered by each critical point (comb maps only)
    covered_indices: list = field(default_factory=list)

    @property
    def values(self) -> list:
        """All singular values: critical values followed by new asymptotic values."""
        out = list(self.critical_values)
        for a in self.asymptotic_values:
            if all(abs(a - c) > 1e-12 for c in out):
                out.append(a)
        return out

    @property
    def is_class_b(self) -> bool:
        vals = self.values
        return all(math.isfinite(abs(v)) for v in vals)

    def to_json(self):
        return {
            "critical_values": [_cjson(v) for v in self.critical_values],
            "asymptotic_values": [_cjson(v) for v in self.asymptotic_values],
            "critical_points": [{"location": _cjson(p.location), "multiplicity": p.multiplicity}
                                for p in self.critical_points],
            "provenance": self.provenance,
        }


def _dedupe(values, tol=1e-12):
    out = []
    for v in values:
        if all(abs(v - w) > tol for w in out):
            out.append(complex(v))
    return out


def singular_set(f: FunctionSpec) -> SingularSet:
    if isinstance(f, ExpAffine):
        return SingularSet([], [f.c])
    if isinstance(f, Cosine):
        # representatives: 0 -> b + a, pi -> b - a (all others are 2*pi translates)
        return SingularSet(_dedupe([f.b + f.a, f.b - f.a]), [],
                           [CriticalPoint(0j, 1), CriticalPoint(complex(math.pi), 1)])
    if isinstance(f, CosSqrt):
        z2 = math.sqrt((4 * math.pi ** 2 + f.B) / f.A)
        return SingularSet([0j, 1 + 0j, complex(f.c_u)], [],
                           [CriticalPoint(0j, 1), CriticalPoint(1 + 0j, 1), CriticalPoint(complex(z2), 1)])
    if isinstance(f, ClosedFormMV0):
        return SingularSet([-1 + 0j, 0j], [0j],
                           [CriticalPoint(-1 + 0j, 1), CriticalPoint(0j, 1), CriticalPoint(1 + 0j, 1)])
    if isinstance(f, MVNumeric):
        return comb_singular_set(f.comb)
    raise TypeError(f"no singular set for {type(f).__name__}")


def comb_singular_set(m: CombMap) -> SingularSet:
    """Critical values are the nonzero c_n, plus 0 when some zero entry sits
    between two nonzero ones; 0 is asymptotic since both tails vanish."""
    pts, covered, vals = [], [], []
    idx = list(m.slit_indices)
    for k, n in enumerate(idx):
        pts.append(CriticalPoint(complex(m.tips[k]), 1))
        covered.append([n])
        vals.append(complex(m.support[n]))
        if k < len(m.poles) and m.orders[k] >= 2:
            pts.append(CriticalPoint(complex(m.poles[k]), int(m.orders[k]) - 1))
            covered.append(list(range(n + 1, idx[k + 1])))
            vals.append(0j)
    order = np.argsort([p.location.real for p in pts], kind="stable")
    return SingularSet(
        critical_values=sorted(_dedupe(vals), key=lambda v: v.real),
        asymptotic_values=[0j],
        critical_points=[pts[i] for i in order],
        provenance="Numeric",
        covered_indices=[covered[i] for i in order],
    )


# --------------------------------------------------------------------------
# critical point search

def winding_number(func, center, radius, samples=256) -> int:
    """Winding number of func around 0 on the circle |z - center| = radius."""
    th = np.linspace(0, 2 * np.pi, samples, endpoint=False)
    vals = func(center + radius * np.exp(1j * th))
    dang = np.angle(np.roll(vals, -1) / vals)
    return int(round(dang.sum() / (2 * np.pi)))


def argument_count(func, box, tol=1e-8, max_points=2 ** 22) -> int:
    """Zeros of func in the box by the argument principle on its boundary."""
    xmin, xmax, ymin, ymax = box
    corners = [complex(xmin, ymin), complex(xmax, ymin), complex(xmax, ymax), complex(xmin, ymax)]
    n = 1024
    while True:
        t = np.linspace(0, 1, n, endpoint=False)
        path = np.concatenate([a + (b - a) * t for a, b in zip(corners, corners[1:] + corners[:1])])
        vals = func(path)
        if not np.all(np.isfinite(vals)):
            raise BoundaryZero("f' is not finite on the box boundary")
        if np.any(vals == 0):
            raise BoundaryZero("f' vanishes on the box boundary")
        dang = np.angle(np.roll(vals, -1) / vals)
        if np.max(np.abs(dang)) < np.pi / 4 or 4 * n > max_points:
            return int(round(dang.sum() / (2 * np.pi)))
        n *= 4


def _newton_seeds(f, seeds, iters=300):
    z = np.array(seeds, complex)
    alive = np.ones(z.shape, bool)
    for _ in range(iters):
        d1 = f.deriv(z[alive])
        d2 = f.deriv2(z[alive])
        with np.errstate(all="ignore"):
            step = np.where(d1 == 0, 0, d1 / d2)
        ok = np.isfinite(step)
        zz = z[alive]
        zz[ok] -= step[ok]
        z[alive] = zz
        idx = np.nonzero(alive)[0]
        alive[idx[~ok]] = False
        small = np.abs(step) <= 1e-15 * (1 + np.abs(zz))
        alive[idx[ok & small]] = False
        if not alive.any():
            break
    good = np.isfinite(z)
    return z[good]


def critical_points(f: FunctionSpec, box, tol: float = 1e-8, grid: int = 50, refinements: int = 3):
    """All zeros of f' in box = (xmin, xmax, ymin, ymax) with multiplicities.

    Newton on f' from a grid of seeds, deduplicated at ``tol``; each root's
    multiplicity is the winding number of f' on a circle of radius 1e-3.  The
    multiplicity total must match the argument-principle count over the box.
    """
    xmin, xmax, ymin, ymax = box
    if not (xmax > xmin and ymax > ymin):
        raise ValueError("box must have positive area")
    expected = argument_count(f.deriv, box)
    n = grid
    for _ in range(refinements + 1):
        xs = np.linspace(xmin, xmax, n)
        ys = np.linspace(ymin, ymax, n)
        seeds = (xs[None, :] + 1j * ys[:, None]).ravel()
        cand = _newton_seeds(f, seeds)
        # accept only genuine zeros of f'
        scale = np.abs(f.deriv2(cand)) + np.abs(f(cand)) + 1.0
        cand = cand[np.abs(f.deriv(cand)) <= 1e-8 * scale]
        roots = []
        for z in cand[np.argsort(cand.real + 1e-3 * cand.imag)]:
            if all(abs(z - r) > tol for r in roots):
                roots.append(complex(z))
        for r in roots:
            edge = min(abs(r.real - xmin), abs(r.real - xmax), abs(r.imag - ymin), abs(r.imag - ymax))
            if edge <= tol and xmin - tol <= r.real <= xmax + tol and ymin - tol <= r.imag <= ymax + tol:
                raise BoundaryZero(f"zero of f' at {r!r} lies on the box boundary")
        inside = [r for r in roots if xmin < r.real < xmax and ymin < r.imag < ymax]
        rad = min(1e-3, 0.25 * _min_sep(inside)) if len(inside) > 1 else 1e-3
        pts = [CriticalPoint(_clean(r), winding_number(f.deriv, r, rad)) for r in inside]
        if sum(p.multiplicity for p in pts) == expected:
            return sorted(pts, key=lambda p: (round(p.location.real, 9), p.location.imag))
        n *= 2
    raise CountMismatch(f"located {sum(p.multiplicity for p in pts)} critical points, "
                        f"argument principle counts {expected}")


def _min_sep(pts):
    a = np.array(pts)
    d = np.abs(a[:, None] - a[None, :])
    d[np.diag_indices_from(d)] = np.inf
    return float(d.min())


def _clean(z: complex, eps=1e-14) -> complex:
    re = 0.0 if abs(z.real) < eps else z.real
    im = 0.0 if abs(z.imag) < eps else z.imag
    return complex(re, im)
