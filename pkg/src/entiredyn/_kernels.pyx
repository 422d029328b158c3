# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled per-point iteration kernel.

Complex arithmetic is spelled out on (re, im) pairs with libm so the result
does not depend on the C compiler's complex support.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport exp, cos, sin, cosh, sinh, sqrt, log, atan2, hypot, fabs, copysign

cnp.import_array()

cdef enum:
    EXP_AFFINE = 0
    COSINE = 1
    COS_SQRT = 2
    MV_CLOSED = 3
    MV_NUMERIC = 4


cdef inline void c_exp(double x, double y, double* ore, double* oim) noexcept nogil:
    cdef double e = exp(x)
    ore[0] = e * cos(y)
    oim[0] = e * sin(y)


cdef inline void c_cos(double x, double y, double* ore, double* oim) noexcept nogil:
    ore[0] = cos(x) * cosh(y)
    oim[0] = -sin(x) * sinh(y)


cdef inline void c_sqrt(double x, double y, double* ore, double* oim) noexcept nogil:
    cdef double r = hypot(x, y), t
    if r == 0.0:
        ore[0] = 0.0
        oim[0] = y
        return
    if x >= 0.0:
        t = sqrt(0.5 * (r + x))
        ore[0] = t
        oim[0] = y / (2.0 * t)
    else:
        t = sqrt(0.5 * (r - x))
        ore[0] = fabs(y) / (2.0 * t)
        oim[0] = copysign(t, y)


cdef inline int fstep(int code, const double complex* p, const double* roots,
                      const long long* orders, Py_ssize_t nroots, double log_escape,
                      double x, double y, double* ore, double* oim) noexcept nogil:
    """One application of the map.  Returns 1 if the value is known to overflow."""
    cdef double re, im, wr, wi, sr, si, ar, ai, Lr, Li, dx, t
    cdef Py_ssize_t k
    if code == EXP_AFFINE:
        c_exp(x, y, &re, &im)
        ore[0] = re + p[0].real
        oim[0] = im + p[0].imag
    elif code == COSINE:
        c_cos(x, y, &re, &im)
        ar = p[0].real
        ai = p[0].imag
        ore[0] = ar * re - ai * im + p[1].real
        oim[0] = ar * im + ai * re + p[1].imag
    elif code == COS_SQRT:
        # w = A z^2 - B
        wr = p[0].real * (x * x - y * y) - p[1].real
        wi = p[0].real * (2.0 * x * y)
        c_sqrt(wr, wi, &sr, &si)
        c_cos(sr, si, &re, &im)
        t = p[2].real
        ore[0] = (t - re) / (t + 1.0)
        oim[0] = -im / (t + 1.0)
    elif code == MV_CLOSED:
        # -z^2 exp(1 - z^2)
        wr = x * x - y * y
        wi = 2.0 * x * y
        c_exp(1.0 - wr, -wi, &re, &im)
        ore[0] = -(wr * re - wi * im)
        oim[0] = -(wr * im + wi * re)
    else:
        # sign * exp(d + a z^2 + b z + sum m_k Log(z - r_k))
        Lr = p[0].real + p[1].real * (x * x - y * y) + p[2].real * x
        Li = p[1].real * (2.0 * x * y) + p[2].real * y
        for k in range(nroots):
            dx = x - roots[k]
            if dx == 0.0 and y == 0.0:
                ore[0] = 0.0
                oim[0] = 0.0
                return 0
            Lr += orders[k] * log(hypot(dx, y))
            Li += orders[k] * atan2(y, dx)
        if Lr > log_escape + 1.0:
            return 1
        c_exp(Lr, Li, &re, &im)
        ore[0] = p[3].real * re
        oim[0] = p[3].real * im
    return 0


cdef void classify_range(int code, const double complex* p, const double* roots,
                         const long long* orders, Py_ssize_t nroots,
                         const double complex* z0, Py_ssize_t n,
                         const double complex* cyc, const long long* cid, const double* r2,
                         Py_ssize_t ncyc, int max_iter, double escape_radius,
                         signed char* status, int* cycle, int* steps) noexcept nogil:
    cdef Py_ssize_t i, j
    cdef int it, found
    cdef double x, y, nx, ny, dx, dy, R2 = escape_radius * escape_radius
    cdef double log_escape = log(escape_radius)
    for i in range(n):
        x = z0[i].real
        y = z0[i].imag
        status[i] = 0
        cycle[i] = -1
        steps[i] = max_iter
        for it in range(max_iter + 1):
            found = -1
            for j in range(ncyc):
                dx = x - cyc[j].real
                dy = y - cyc[j].imag
                if dx * dx + dy * dy < r2[j]:
                    found = <int>cid[j]
                    break
            if found >= 0:
                status[i] = 1
                cycle[i] = found
                steps[i] = it
                break
            if not (x * x + y * y <= R2):
                status[i] = 2
                steps[i] = it
                break
            if it == max_iter:
                break
            if fstep(code, p, roots, orders, nroots, log_escape, x, y, &nx, &ny):
                x = 1e308
                y = 1e308
            else:
                x = nx
                y = ny


def classify_points(int code, double complex[::1] params, double[::1] roots,
                    long long[::1] orders, double complex[::1] z0,
                    double complex[::1] cyc, long long[::1] cyc_ids, double[::1] trap_r,
                    int max_iter, double escape_radius):
    """Fates for the points z0: status (0 undecided, 1 attracted, 2 escaped),
    cycle id (-1 unless attracted) and the landing/exit step."""
    cdef Py_ssize_t n = z0.shape[0], ncyc = cyc.shape[0], nroots = roots.shape[0]
    status = np.empty(n, dtype=np.int8)
    cycle = np.empty(n, dtype=np.int32)
    steps = np.empty(n, dtype=np.int32)
    r2 = np.asarray(trap_r, dtype=np.float64) ** 2
    cdef signed char[::1] st = status
    cdef int[::1] cy = cycle
    cdef int[::1] sp = steps
    cdef double[::1] rr = r2
    cdef const double complex* pc = &cyc[0] if ncyc else NULL
    cdef const long long* pid = &cyc_ids[0] if ncyc else NULL
    cdef const double* pr = &rr[0] if ncyc else NULL
    cdef const double* proots = &roots[0] if nroots else NULL
    cdef const long long* pord = &orders[0] if nroots else NULL
    if n == 0:
        return status, cycle, steps
    with nogil:
        classify_range(code, &params[0], proots, pord, nroots, &z0[0], n,
                       pc, pid, pr, ncyc, max_iter, escape_radius,
                       &st[0], &cy[0], &sp[0])
    return status, cycle, steps


def step_points(int code, double complex[::1] params, double[::1] roots,
                long long[::1] orders, double complex[::1] z, double escape_radius):
    """One application of the map to each point (inf where it overflows)."""
    cdef Py_ssize_t i, n = z.shape[0], nroots = roots.shape[0]
    out = np.empty(n, dtype=np.complex128)
    cdef double complex[::1] o = out
    cdef double nx, ny, le = log(escape_radius)
    cdef const double* proots = &roots[0] if nroots else NULL
    cdef const long long* pord = &orders[0] if nroots else NULL
    with nogil:
        for i in range(n):
            if fstep(code, &params[0], proots, pord, nroots, le, z[i].real, z[i].imag, &nx, &ny):
                o[i] = 1e308 + 1e308j
            else:
                o[i].real = nx
                o[i].imag = ny
    return out
