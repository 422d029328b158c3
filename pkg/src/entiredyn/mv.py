"""MacLane-Vinberg construction: slit domains, the parameter solve, and the
truncated example families.

The unknowns of the parameter problem are the return prevertices r_k (as a
leftmost position plus log gaps, so ordering is automatic), the constant d and,
when the scale is fixed by a tip position, log(-a).  The tip prevertices are
never unknowns: each is the unique zero of phi' on its interval between
consecutive returns.  Residuals are Re phi(t_k) - log|c_{n_k}| (the slit
heights are exact by the integer exponents), plus t_1 - 1 when the tip of
slit 1 pins the scale.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .combmap import REAL_OFFSET, CombMap
from .errors import BracketFailure, EmptySupport, NonConvergence, SignPatternViolation
from .zoo import CosSqrt, MVNumeric

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Slit:
    index: int
    height: float
    tip_real_part: float


@dataclass(frozen=True)
class SlitDomainSpec:
    support: dict
    slits: tuple
    symmetric: bool

    @property
    def indices(self) -> tuple:
        return tuple(s.index for s in self.slits)

    def to_json(self) -> dict:
        return {"support": {str(n): c for n, c in sorted(self.support.items())}}

    @classmethod
    def from_json(cls, obj: dict) -> "SlitDomainSpec":
        return build_slit_domain({int(n): float(c) for n, c in obj["support"].items()})


def build_slit_domain(support: dict) -> SlitDomainSpec:
    """Validate a finitely supported sequence n -> c_n and list its slits."""
    clean = {}
    for n, c in support.items():
        n, c = int(n), float(c)
        if (-1) ** (n % 2) * c < 0:
            raise SignPatternViolation(f"(-1)^n c_n >= 0 fails at n={n}, c_n={c}")
        if c != 0:
            clean[n] = c
    if not clean:
        raise EmptySupport("at least one c_n must be nonzero")
    slits = tuple(Slit(n, n * math.pi, math.log(abs(clean[n]))) for n in sorted(clean))
    symmetric = all(clean.get(-n) == c for n, c in clean.items())
    return SlitDomainSpec(clean, slits, symmetric)


# --------------------------------------------------------------------------
# parameter problem

def _dphi(x, a, r, m):
    return 2 * a * x + np.sum(m / (x - r))


def _tips(a, r, m):
    """Zeros of phi' = 2a x + sum m/(x - r), one per interval between poles."""
    K = len(r) + 1
    out = np.empty(K)
    for k in range(K):
        lo = r[k - 1] if k > 0 else None
        hi = r[k] if k < K - 1 else None
        f = lambda x: _dphi(x, a, r, m)
        if lo is None and hi is None:
            out[k] = 0.0
            continue
        if lo is None:
            step = max(1.0, abs(hi))
            L = hi - step
            while f(L) <= 0:
                step *= 2
                L = hi - step
            H = hi - 1e-13 * max(1.0, abs(hi))
            lo_x, hi_x = L, H
        elif hi is None:
            step = max(1.0, abs(lo))
            H = lo + step
            while f(H) >= 0:
                step *= 2
                H = lo + step
            lo_x, hi_x = lo + 1e-13 * max(1.0, abs(lo)), H
        else:
            gap = hi - lo
            lo_x, hi_x = lo + 1e-13 * gap, hi - 1e-13 * gap
        out[k] = brentq(f, lo_x, hi_x, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=500)
    return out


class _Problem:
    def __init__(self, spec: SlitDomainSpec):
        self.spec = spec
        idx = np.array(spec.indices)
        self.orders = np.diff(idx).astype(np.int64)
        self.targets = np.array([s.tip_real_part for s in spec.slits])
        self.K = len(idx)
        self.pin = spec.symmetric and 1 in spec.support and self.K >= 2
        self.kstar = list(spec.indices).index(1) if self.pin else None

    def unpack(self, p):
        i = 0
        if self.pin:
            a = -math.exp(p[0])
            i = 1
        else:
            a = -1.0
        d = p[i]
        if self.K > 1:
            r = p[i + 1] + np.concatenate([[0.0], np.cumsum(np.exp(p[i + 2:]))])
        else:
            r = np.zeros(0)
        return a, d, r

    def pack(self, a, d, r):
        head = [math.log(-a)] if self.pin else []
        tail = [r[0], *np.log(np.diff(r))] if len(r) else []
        return np.array(head + [d] + tail, dtype=float)

    def residual(self, p):
        a, d, r = self.unpack(p)
        t = _tips(a, r, self.orders)
        re_phi = d + a * t * t + np.sum(self.orders * np.log(np.abs(t[:, None] - r)), axis=1)
        F = re_phi
        if self.pin:
            F = np.append(F, t[self.kstar])
        return F, t

    def jacobian(self, p, t):
        a, d, r = self.unpack(p)
        m = self.orders
        cols = []
        # derivatives w.r.t. (a, d, r_j) in natural variables
        dF_da = t * t
        dF_dd = np.ones_like(t)
        dF_dr = -m[None, :] / (t[:, None] - r[None, :]) if len(r) else np.zeros((len(t), 0))
        if self.pin:
            ts = t[self.kstar]
            phi2 = 2 * a - np.sum(m / (ts - r) ** 2)
            dt_da = -2 * ts / phi2
            dt_dr = -(m / (ts - r) ** 2) / phi2
            dF_da = np.append(dF_da, dt_da)
            dF_dd = np.append(dF_dd, 0.0)
            dF_dr = np.vstack([dF_dr, dt_dr[None, :]]) if len(r) else dF_dr
        if self.pin:
            cols.append(dF_da * a)  # d/d log(-a)
        cols.append(dF_dd)
        if len(r):
            cols.append(dF_dr.sum(axis=1))  # leftmost position shifts all poles
            gaps = np.exp(p[-(len(r) - 1):]) if len(r) > 1 else np.zeros(0)
            for i, gi in enumerate(gaps):
                cols.append(dF_dr[:, i + 1:].sum(axis=1) * gi)
        return np.column_stack(cols)

    def initial_guess(self):
        idx = np.array(self.spec.indices, dtype=float)
        nu = 0.5 * (idx[:-1] + idx[1:])
        r = np.sign(nu) * np.sqrt(np.abs(nu))
        return self.pack(-1.0, 0.0, r)


def _newton(prob, p, goal, tol, maxit):
    F, t = prob.residual(p)
    R = F - goal
    nr = np.max(np.abs(R))
    for it in range(maxit):
        if nr < tol:
            return p, nr, it, True
        J = prob.jacobian(p, t)
        dp = np.linalg.lstsq(J, -R, rcond=None)[0]
        s = 1.0
        while s > 1e-6:
            q = p + s * dp
            try:
                Fq, tq = prob.residual(q)
            except (ValueError, RuntimeError, FloatingPointError):
                s *= 0.5
                continue
            nq = np.max(np.abs(Fq - goal))
            if np.isfinite(nq) and nq < nr:
                break
            s *= 0.5
        else:
            return p, nr, it, False
        p, F, t, R, nr = q, Fq, tq, Fq - goal, nq
    return p, nr, maxit, nr < tol


def solve_parameters(spec: SlitDomainSpec, tol: float = 1e-11, maxit: int = 60) -> CombMap:
    """Solve the comb-map parameter problem by continuation + damped Newton.

    The initial guess is an exact solution for its own tip heights; the
    targets are then moved to the prescribed log|c_n| along a homotopy with
    adaptive step size, correcting with damped Newton at each stage.
    """
    prob = _Problem(spec)
    p = prob.initial_guess()
    F0, _ = prob.residual(p)
    goal = prob.targets if not prob.pin else np.append(prob.targets, 1.0)
    lam, step, total = 0.0, 0.25, 0
    while lam < 1.0:
        nxt = min(1.0, lam + step)
        q, res, its, ok = _newton(prob, p, (1 - nxt) * F0 + nxt * goal, tol if nxt == 1.0 else 1e-9, 30)
        total += its
        if ok:
            p, lam = q, nxt
            step = min(1.0, step * 2)
        else:
            step *= 0.5
            if step < 1e-6:
                raise NonConvergence("continuation stalled", residual=res, iterate=q)
    p, res, its, ok = _newton(prob, p, goal, tol, maxit)
    total += its
    if not ok:
        raise NonConvergence(f"residual {res:.3e} above tol {tol:.1e}", residual=res, iterate=p)
    a, d, r = prob.unpack(p)
    t = _tips(a, r, prob.orders)
    if spec.symmetric:
        # the solution is odd; remove rounding asymmetry (a middle pole lands on 0)
        r = 0.5 * (r - r[::-1])
        t = 0.5 * (t - t[::-1])
        res = max(res, float(np.max(np.abs(prob.residual(prob.pack(a, d, r))[0] - goal))))
    norm = {"translation": "b = 0"}
    norm["scale"] = "tip of slit 1 at x = 1" if prob.pin else "a = -1"
    log.debug("comb map solved: K=%d residual=%.2e iterations=%d", prob.K, res, total)
    return CombMap(
        support=dict(spec.support), slit_indices=spec.indices, tips=t, poles=r,
        orders=prob.orders, a=a, b=0.0, d=d, normalization=norm,
        residual=float(res), iterations=total,
    )


# --------------------------------------------------------------------------
# evaluation

def phi_eval(comb: CombMap, zeta, method: str = "closed") -> complex:
    """phi(zeta) for Im(zeta) <= 0; real zeta gives the boundary limit."""
    zeta = complex(zeta)
    if zeta.imag > 0:
        raise ValueError("phi_eval expects Im(zeta) <= 0")
    comb._check_guard(zeta)
    if method == "quadrature":
        return comb.phi_quadrature(zeta)
    return complex(comb.phi(zeta))


def g_eval(comb: CombMap, z) -> complex:
    """g = exp(phi) continued to C by Schwarz reflection."""
    z = complex(z)
    if z.imag < 0:
        return complex(np.exp(comb.phi(z)))
    if z.imag > 0:
        return g_eval(comb, z.conjugate()).conjugate()
    # real axis: lower-side offset, cross-checked against the reflected side
    zl = complex(z.real, -REAL_OFFSET)
    low = complex(np.exp(comb.phi(zl)))
    predicted = -REAL_OFFSET * complex(comb.dg(z.real)).real
    assert abs(low.imag - predicted) <= 1e-7 * (1 + abs(low)), "reflection mismatch on the real axis"
    return complex(low.real, 0.0)


# --------------------------------------------------------------------------
# example families

def truncated_example1(delta: float, M: int, tol: float = 1e-11) -> MVNumeric:
    """c_{+-1} = -1 and c_n = -delta for odd 3 <= |n| <= M, zero otherwise."""
    if not 0 <= delta < 1:
        raise ValueError("delta must lie in [0, 1)")
    if M < 3 or M % 2 == 0:
        raise ValueError("M must be odd and >= 3")
    support = {1: -1.0, -1: -1.0}
    if delta > 0:
        for n in range(3, M + 1, 2):
            support[n] = support[-n] = -float(delta)
    comb = solve_parameters(build_slit_domain(support), tol)
    return MVNumeric(comb, f"example1(delta={delta:g}, M={M})")


def example2_stage(N_list, tol: float = 1e-11) -> MVNumeric:
    """c_n = -1 for |n| in N_list = (1, N_1, ..., N_K), zero otherwise.

    Finite support, so the result keeps the asymptotic value 0.
    """
    N = [int(n) for n in N_list]
    if not N or N[0] != 1 or any(n % 2 == 0 for n in N) or any(b <= a for a, b in zip(N, N[1:])):
        raise ValueError("N_list must be strictly increasing odd integers starting at 1")
    support = {}
    for n in N:
        support[n] = support[-n] = -1.0
    comb = solve_parameters(build_slit_domain(support), tol)
    return MVNumeric(comb, "example2(" + ",".join(map(str, N)) + ")")


def cossqrt_repelling_point(u: float) -> float:
    """The interior fixed point p_u of the CosSqrt map in (0, 1)."""
    from .dynamics import real_fixed_points

    pts = [x for x, _ in real_fixed_points(CosSqrt(u), (0.01, 0.99))]
    if len(pts) != 1:
        raise BracketFailure(f"expected one interior fixed point for u={u}, found {pts}")
    return pts[0]


def cossqrt_threshold(lo: float = 1.5, hi: float = 10.0, tol: float = 1e-8) -> float:
    """Smallest u with c_u > p_u, by bisection on u -> c_u - p_u."""
    h = lambda u: (u - 1) / (u + 1) - cossqrt_repelling_point(u)
    hlo, hhi = h(lo), h(hi)
    if not hlo < 0 < hhi:
        raise BracketFailure(f"c_u - p_u does not change sign on [{lo}, {hi}]")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if h(mid) < 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
