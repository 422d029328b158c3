"""Solved comb maps: the conformal map onto a slit domain and g = exp(phi).

For a finitely supported critical-value sequence the Schwarz-Christoffel
integrand of the lower half-plane onto the comb domain is rational: every
slit tip is a vertex of interior angle 2*pi (exponent +1) and every return
to -infinity between two slits at heights n*pi < m*pi is a channel of width
(m - n)*pi (exponent -1 with residue m - n).  Hence

    phi'(z) = 2a * prod(z - t_k) / prod(z - r_k)
            = 2a z + b + sum m_k / (z - r_k)

and phi integrates in closed form.  ``CombMap`` evaluates both the closed
form and an independent compound Gauss-Jacobi quadrature of the product
form of the integrand, anchored at a tip whose image is known from the
boundary correspondence.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.special import roots_jacobi

from .errors import QuadratureAccuracyLoss

QUAD_NODES = 64
POLE_GUARD = 1e-12
REAL_OFFSET = 1e-9


@lru_cache(maxsize=None)
def jacobi_table(alpha: int, beta: int, n: int = QUAD_NODES):
    """Nodes/weights on [-1, 1] for the weight (1 - x)**alpha * (1 + x)**beta."""
    x, w = roots_jacobi(n, alpha, beta)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


@dataclass(frozen=True, eq=False)
class CombMap:
    """Numerically solved map phi from the lower half-plane onto Omega(c).

    ``tips`` are the prevertices of the slit tips (one per nonzero c_n, in
    increasing order of height) and ``poles`` the prevertices of the returns
    to -infinity between consecutive slits; ``orders[k]`` is the index gap
    between the slits either side of ``poles[k]`` (the zero order of g there).
    """

    support: dict
    slit_indices: tuple
    tips: np.ndarray
    poles: np.ndarray
    orders: np.ndarray
    a: float
    b: float
    d: float
    normalization: dict = field(default_factory=dict)
    residual: float = 0.0
    iterations: int = 0

    # -- derived data -----------------------------------------------------
    @property
    def top_index(self) -> int:
        return self.slit_indices[-1]

    @property
    def sign(self) -> float:
        return -1.0 if self.top_index % 2 else 1.0

    @property
    def sc_constant(self) -> complex:
        return complex(2.0 * self.a)

    @property
    def prevertices(self) -> np.ndarray:
        return np.sort(np.concatenate([self.tips, self.poles]))

    @property
    def tip_values(self) -> np.ndarray:
        """Slit tips in the phi-plane: log|c_n| + i*n*pi."""
        return np.array([np.log(abs(self.support[n])) + 1j * np.pi * n
                         for n in self.slit_indices])

    @property
    def anchor(self) -> int:
        """Position in ``tips`` of the tip used to anchor the quadrature route."""
        if 1 in self.slit_indices:
            return self.slit_indices.index(1)
        return len(self.slit_indices) - 1

    @property
    def quadrature(self) -> dict:
        return {(al, be): jacobi_table(al, be) for al in (0, 1) for be in (0, 1)}

    # -- closed form --------------------------------------------------------
    def _offsets(self, z, lower=True):
        w = np.asarray(z, dtype=complex)[..., None] - self.poles
        if lower:
            # boundary values are limits from the lower half-plane
            w = np.where(w.imag == 0, np.conj(w.real.astype(complex)), w)
        return w

    def log_g(self, z):
        """d + a z^2 + b z + sum m_k Log(z - r_k); exp of this is g / sign."""
        z = np.asarray(z, dtype=complex)
        w = self._offsets(z)
        with np.errstate(divide="ignore"):
            logs = (self.orders * np.log(w)).sum(axis=-1)
        return self.d + self.a * z * z + self.b * z + logs

    def phi(self, z):
        """Closed-form phi on the closed lower half-plane."""
        return 1j * np.pi * self.top_index + self.log_g(z)

    def dphi(self, z):
        z = np.asarray(z, dtype=complex)
        with np.errstate(divide="ignore", invalid="ignore"):
            return 2 * self.a * z + self.b + (self.orders / self._offsets(z, False)).sum(axis=-1)

    def d2phi(self, z):
        z = np.asarray(z, dtype=complex)
        with np.errstate(divide="ignore", invalid="ignore"):
            return 2 * self.a - (self.orders / self._offsets(z, False) ** 2).sum(axis=-1)

    def sc_integrand(self, z, skip=()):
        """Product form 2a prod(z - t_k) / prod(z - r_k), omitting tips in ``skip``."""
        z = np.asarray(z, dtype=complex)
        keep = np.ones(len(self.tips), bool)
        keep[list(skip)] = False
        num = np.prod(z[..., None] - self.tips[keep], axis=-1)
        den = np.prod(z[..., None] - self.poles, axis=-1)
        return 2 * self.a * num / den

    # -- g = exp(phi), entire -------------------------------------------------
    def g(self, z):
        """Entire function s*exp(d + a z^2 + b z) * prod (z - r_k)**m_k."""
        z = np.asarray(z, dtype=complex)
        with np.errstate(over="ignore", invalid="ignore"):
            val = self.sign * np.exp(self.log_g(z))
        if self.poles.size:
            val = np.where(np.isin(z, self.poles), 0.0, val)
        return val

    def _at_pole(self, z, k, nder):
        """nder-th derivative of g at the pole r_k (exact limit)."""
        m = int(self.orders[k])
        if m > nder:
            return 0.0j
        r = self.poles[k]
        others = np.delete(np.arange(len(self.poles)), k)
        h = lambda x: self.sign * np.exp(self.d + self.a * x * x + self.b * x) * np.prod(
            (x - self.poles[others]) ** self.orders[others])
        if m == nder:
            return complex(math.factorial(m) * h(r))
        # m == 1, nder == 2: g = (z - r) h  =>  g'' = 2 h'(r)
        hp = h(r) * (2 * self.a * r + self.b + np.sum(self.orders[others] / (r - self.poles[others])))
        return complex(2 * hp)

    def dg(self, z):
        z = np.asarray(z, dtype=complex)
        with np.errstate(over="ignore", invalid="ignore"):
            out = self.g(z) * self.dphi(z)
        return self._fix_poles(z, out, 1)

    def d2g(self, z):
        z = np.asarray(z, dtype=complex)
        with np.errstate(over="ignore", invalid="ignore"):
            p = self.dphi(z)
            out = self.g(z) * (self.d2phi(z) + p * p)
        return self._fix_poles(z, out, 2)

    def _fix_poles(self, z, out, nder):
        if not self.poles.size:
            return out
        hit = np.isin(z, self.poles)
        if not np.any(hit):
            return out
        out = np.array(out, dtype=complex)
        for idx in zip(*np.nonzero(np.atleast_1d(hit))):
            zz = np.atleast_1d(z)[idx]
            k = int(np.nonzero(self.poles == zz.real)[0][0])
            if out.ndim == 0:
                out = np.asarray(self._at_pole(zz, k, nder))
            else:
                out[idx] = self._at_pole(zz, k, nder)
        return out

    # -- quadrature route --------------------------------------------------
    def _check_guard(self, zeta):
        if self.poles.size and np.min(np.abs(zeta - self.poles)) < POLE_GUARD:
            raise QuadratureAccuracyLoss(f"zeta={zeta!r} within {POLE_GUARD} of a return prevertex")

    def _pieces(self, z0, z1, depth=0):
        L = abs(z1 - z0)
        if self.poles.size and depth < 80:
            # distance from poles (real) to the segment
            t = np.clip(((self.poles - z0) * np.conj(z1 - z0)).real / (L * L), 0.0, 1.0)
            dist = np.min(np.abs(z0 + t * (z1 - z0) - self.poles))
            if dist < 0.5 * L:
                zm = 0.5 * (z0 + z1)
                return self._pieces(z0, zm, depth + 1) + self._pieces(zm, z1, depth + 1)
        return [(z0, z1)]

    def _segment(self, z0, z1, tip0=None, tip1=None):
        """Integral of phi' along [z0, z1]; tip0/tip1 index a tip sitting at an endpoint."""
        total = 0.0j
        pieces = self._pieces(complex(z0), complex(z1))
        for i, (p0, p1) in enumerate(pieces):
            at0 = tip0 if i == 0 else None
            at1 = tip1 if i == len(pieces) - 1 else None
            skip = [k for k in (at0, at1) if k is not None]
            x, w = jacobi_table(1 if at1 is not None else 0, 1 if at0 is not None else 0)
            h = 0.5 * (p1 - p0)
            z = 0.5 * (p0 + p1) + h * x
            vals = self.sc_integrand(z, skip) * h
            if at0 is not None:
                vals = vals * h          # (z - t) = h (1 + x); (1 + x) is in the weight
            if at1 is not None:
                vals = vals * (-h)       # (z - t) = -h (1 - x)
            total += np.dot(w, vals)
        return total

    def phi_quadrature(self, zeta):
        """phi(zeta) by integrating the SC integrand from the anchor tip."""
        zeta = complex(zeta)
        if zeta.imag > 0:
            raise ValueError("phi is defined on the lower half-plane")
        self._check_guard(zeta)
        k = self.anchor
        t = float(self.tips[k])
        start = self.tip_values[k]
        hit = np.nonzero(np.isclose(self.tips, zeta.real, rtol=0, atol=1e-15))[0]
        if zeta.imag == 0:
            if zeta.real == t:
                return complex(start)
            # boundary target: detour through the lower half-plane
            mid = 0.5 * (t + zeta.real) - 0.5j * abs(zeta.real - t)
            end_tip = int(hit[0]) if hit.size else None
            return complex(start + self._segment(t, mid, tip0=k) + self._segment(mid, zeta, tip1=end_tip))
        return complex(start + self._segment(t, zeta, tip0=k))

    # -- serialization -----------------------------------------------------
    def to_json(self) -> dict:
        return {
            "support": {str(n): float(c) for n, c in sorted(self.support.items())},
            "slit_indices": list(self.slit_indices),
            "tips": [float(x) for x in self.tips],
            "poles": [float(x) for x in self.poles],
            "orders": [int(m) for m in self.orders],
            "a": self.a, "b": self.b, "d": self.d,
            "sc_constant": [self.sc_constant.real, self.sc_constant.imag],
            "normalization": dict(self.normalization),
            "residual": self.residual,
            "iterations": self.iterations,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "CombMap":
        return cls(
            support={int(n): float(c) for n, c in obj["support"].items()},
            slit_indices=tuple(int(n) for n in obj["slit_indices"]),
            tips=np.array(obj["tips"], dtype=float),
            poles=np.array(obj["poles"], dtype=float),
            orders=np.array(obj["orders"], dtype=np.int64),
            a=float(obj["a"]), b=float(obj["b"]), d=float(obj["d"]),
            normalization=dict(obj.get("normalization", {})),
            residual=float(obj.get("residual", 0.0)),
            iterations=int(obj.get("iterations", 0)),
        )
