"""Pure numpy fallback for the compiled kernels (same semantics, vectorized)."""
import numpy as np

EXP_AFFINE, COSINE, COS_SQRT, MV_CLOSED, MV_NUMERIC = range(5)


def _cos(z):
    x, y = z.real, z.imag
    return np.cos(x) * np.cosh(y) - 1j * (np.sin(x) * np.sinh(y))


def _step(code, p, roots, orders, z, escape_radius):
    with np.errstate(all="ignore"):
        if code == EXP_AFFINE:
            return np.exp(z) + p[0]
        if code == COSINE:
            return p[0] * _cos(z) + p[1]
        if code == COS_SQRT:
            w = p[0].real * (z * z) - p[1].real
            return (p[2].real - _cos(np.sqrt(w))) / (p[2].real + 1.0)
        if code == MV_CLOSED:
            w = z * z
            return -w * np.exp(1.0 - w)
        L = p[0].real + p[1].real * (z * z) + p[2].real * z
        hit = np.zeros(z.shape, bool)
        for r, m in zip(roots, orders):
            dz = z - r
            hit |= dz == 0
            L = L + m * (np.log(np.abs(dz)) + 1j * np.arctan2(dz.imag, dz.real))
        out = p[3].real * np.exp(L)
        out[L.real > np.log(escape_radius) + 1.0] = 1e308 + 1e308j
        out[hit] = 0.0
        return out


def step_points(code, params, roots, orders, z, escape_radius):
    return _step(code, np.asarray(params), np.asarray(roots), np.asarray(orders),
                 np.asarray(z, np.complex128), escape_radius)


def classify_points(code, params, roots, orders, z0, cyc, cyc_ids, trap_r, max_iter, escape_radius):
    z0 = np.asarray(z0, np.complex128)
    n = z0.shape[0]
    status = np.zeros(n, np.int8)
    cycle = np.full(n, -1, np.int32)
    steps = np.full(n, max_iter, np.int32)
    cyc = np.asarray(cyc, np.complex128)
    cyc_ids = np.asarray(cyc_ids, np.int64)
    r2 = np.asarray(trap_r, np.float64) ** 2
    R2 = escape_radius * escape_radius
    idx = np.arange(n)
    z = z0.copy()
    for it in range(max_iter + 1):
        if idx.size == 0:
            break
        # trap check (first matching cycle point wins, as in the compiled core)
        found = np.full(idx.size, -1, np.int64)
        with np.errstate(all="ignore"):
            for j in range(cyc.size):
                d = z - cyc[j]
                inside = (found < 0) & (d.real * d.real + d.imag * d.imag < r2[j])
                found[inside] = cyc_ids[j]
        att = found >= 0
        status[idx[att]] = 1
        cycle[idx[att]] = found[att]
        steps[idx[att]] = it
        with np.errstate(all="ignore"):
            esc = ~att & ~(z.real * z.real + z.imag * z.imag <= R2)
        status[idx[esc]] = 2
        steps[idx[esc]] = it
        keep = ~(att | esc)
        idx, z = idx[keep], z[keep]
        if it == max_iter or idx.size == 0:
            break
        z = _step(code, params, roots, orders, z, escape_radius)
    return status, cycle, steps
