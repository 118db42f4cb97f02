# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels: dense LU and the Radau IIA loop for ``y' = A y``.

Same algorithms and status codes as ``_pykernels``; the integration loop
runs without the GIL so sweeps can use threads.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport fabs, sqrt, pow, INFINITY
from libc.stdlib cimport malloc, free

from ._radau_tableau import A_RK as _A_RK, E_EST as _E_EST, MU_REAL as _MU_REAL

cnp.import_array()

cdef enum:
    OK = 0
    SINGULAR = 1
    STEP_UNDERFLOW = 2
    NEWTON_DIVERGENCE = 3

cdef double PIVOT_FLOOR = 1e-300
cdef double STALL_TOL = 1.4901161193847656e-08  # sqrt(machine epsilon)


cdef int _lu_factor(double* a, Py_ssize_t* piv, Py_ssize_t n) noexcept nogil:
    cdef Py_ssize_t i, j, k, p
    cdef double amax, tmp, f
    for i in range(n):
        piv[i] = i
    for k in range(n):
        p = k
        amax = fabs(a[k * n + k])
        for i in range(k + 1, n):
            if fabs(a[i * n + k]) > amax:
                amax = fabs(a[i * n + k])
                p = i
        if amax < PIVOT_FLOOR:
            return SINGULAR
        if p != k:
            for j in range(n):
                tmp = a[k * n + j]
                a[k * n + j] = a[p * n + j]
                a[p * n + j] = tmp
            i = piv[k]
            piv[k] = piv[p]
            piv[p] = i
        for i in range(k + 1, n):
            f = a[i * n + k] / a[k * n + k]
            a[i * n + k] = f
            if f != 0.0:
                for j in range(k + 1, n):
                    a[i * n + j] -= f * a[k * n + j]
    return OK


cdef void _lu_solve(const double* lu, const Py_ssize_t* piv, const double* b,
                    double* x, Py_ssize_t n) noexcept nogil:
    cdef Py_ssize_t i, j
    cdef double s
    for i in range(n):
        s = b[piv[i]]
        for j in range(i):
            s -= lu[i * n + j] * x[j]
        x[i] = s
    for i in range(n - 1, -1, -1):
        s = x[i]
        for j in range(i + 1, n):
            s -= lu[i * n + j] * x[j]
        x[i] = s / lu[i * n + i]


cdef inline void _matvec(const double* A, const double* x, double* out, Py_ssize_t n) noexcept nogil:
    cdef Py_ssize_t i, j
    cdef double s
    for i in range(n):
        s = 0.0
        for j in range(n):
            s += A[i * n + j] * x[j]
        out[i] = s


cdef inline double _rms_scaled(const double* v, const double* scale, Py_ssize_t n) noexcept nogil:
    cdef Py_ssize_t i
    cdef double s = 0.0, q
    for i in range(n):
        q = v[i] / scale[i]
        s += q * q
    return sqrt(s / n)


def lu_factor(a):
    cdef cnp.ndarray[cnp.float64_t, ndim=2, mode="c"] lu = np.array(a, dtype=np.float64, order="C")
    cdef Py_ssize_t n = lu.shape[0]
    cdef cnp.ndarray[cnp.intp_t, ndim=1] piv = np.empty(n, dtype=np.intp)
    cdef int status
    with nogil:
        status = _lu_factor(&lu[0, 0], <Py_ssize_t*>&piv[0], n)
    return lu, piv, status


def lu_solve(lu, piv, b):
    cdef cnp.ndarray[cnp.float64_t, ndim=2, mode="c"] lu_c = np.ascontiguousarray(lu, dtype=np.float64)
    cdef cnp.ndarray[cnp.intp_t, ndim=1] piv_c = np.ascontiguousarray(piv, dtype=np.intp)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] b_c = np.ascontiguousarray(b, dtype=np.float64)
    cdef Py_ssize_t n = lu_c.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] x = np.empty(n, dtype=np.float64)
    with nogil:
        _lu_solve(&lu_c[0, 0], <Py_ssize_t*>&piv_c[0], &b_c[0], &x[0], n)
    return x


cdef double _initial_step(const double* A, const double* y0, const double* f0, double* work,
                          Py_ssize_t n, double rtol, double atol, double span,
                          double max_step) noexcept nogil:
    cdef Py_ssize_t i
    cdef double d0 = 0.0, d1 = 0.0, d2 = 0.0, h0, h1, sc, q
    for i in range(n):
        sc = atol + rtol * fabs(y0[i])
        d0 += (y0[i] / sc) ** 2
        d1 += (f0[i] / sc) ** 2
    d0 = sqrt(d0 / n)
    d1 = sqrt(d1 / n)
    if d0 < 1e-5 or d1 < 1e-5:
        h0 = 1e-6
    else:
        h0 = 0.01 * d0 / d1
    if h0 > span:
        h0 = span
    for i in range(n):
        work[n + i] = y0[i] + h0 * f0[i]
    _matvec(A, &work[n], work, n)
    for i in range(n):
        sc = atol + rtol * fabs(y0[i])
        q = (work[i] - f0[i]) / sc
        d2 += q * q
    d2 = sqrt(d2 / n) / h0
    if d1 <= 1e-15 and d2 <= 1e-15:
        h1 = h0 * 1e-3
        if h1 < 1e-6:
            h1 = 1e-6
    else:
        h1 = pow(0.01 / (d1 if d1 > d2 else d2), 0.25)
    q = 100.0 * h0
    if h1 < q:
        q = h1
    if span < q:
        q = span
    if max_step < q:
        q = max_step
    return q


cdef int _radau(const double* A, const double* AkA, const double* ark, const double* eest,
                double mu_real, double* y, double t0, const double* t_out, Py_ssize_t n_out,
                double* states, Py_ssize_t n, double rtol, double atol, double max_step,
                double newton_tol, int max_newton, double h_min, long* counters) noexcept nogil:
    cdef Py_ssize_t N = 3 * n
    cdef Py_ssize_t i, j, k, s
    cdef int it, status = OK, converged, landing
    cdef double t = t0, h, h_step, h_lu = -1.0, target, remaining, dz, prev, zmax
    cdef double err_norm, fac, h_next, scale_max, span, sc
    cdef bint rejected = False, first = True

    cdef double* M = <double*>malloc(N * N * sizeof(double))
    cdef double* Mr = <double*>malloc(n * n * sizeof(double))
    cdef Py_ssize_t* piv = <Py_ssize_t*>malloc(N * sizeof(Py_ssize_t))
    cdef Py_ssize_t* pivr = <Py_ssize_t*>malloc(n * sizeof(Py_ssize_t))
    cdef double* Z = <double*>malloc(N * sizeof(double))
    cdef double* W = <double*>malloc(N * sizeof(double))
    cdef double* R = <double*>malloc(N * sizeof(double))
    cdef double* dZ = <double*>malloc(N * sizeof(double))
    cdef double* f = <double*>malloc(n * sizeof(double))
    cdef double* ynew = <double*>malloc(n * sizeof(double))
    cdef double* ze = <double*>malloc(n * sizeof(double))
    cdef double* err = <double*>malloc(n * sizeof(double))
    cdef double* tmp = <double*>malloc(2 * n * sizeof(double))
    cdef double* scale = <double*>malloc(n * sizeof(double))

    if (M == NULL or Mr == NULL or piv == NULL or pivr == NULL or Z == NULL or W == NULL
            or R == NULL or dZ == NULL or f == NULL or ynew == NULL or ze == NULL
            or err == NULL or tmp == NULL or scale == NULL):
        status = -1
        n_out = 0

    if n_out > 0:
        _matvec(A, y, f, n)
        span = t_out[n_out - 1] - t0
        h = _initial_step(A, y, f, tmp, n, rtol, atol, span, max_step) if span > 0 else 0.0

    for k in range(n_out):
        if status != OK:
            break
        target = t_out[k]
        while t < target:
            remaining = target - t
            landing = h >= remaining * (1.0 - 1e-12)
            h_step = remaining if landing else h
            if not landing and h_step < h_min:
                status = STEP_UNDERFLOW
                break
            if h_step != h_lu:
                for i in range(N * N):
                    M[i] = -h_step * AkA[i]
                for i in range(N):
                    M[i * N + i] += 1.0
                status = _lu_factor(M, piv, N)
                if status != OK:
                    break
                for i in range(n * n):
                    Mr[i] = -A[i]
                for i in range(n):
                    Mr[i * n + i] += mu_real / h_step
                status = _lu_factor(Mr, pivr, n)
                if status != OK:
                    break
                h_lu = h_step
                counters[3] += 1

            scale_max = 0.0
            for i in range(n):
                sc = atol + rtol * fabs(y[i])
                if sc > scale_max:
                    scale_max = sc
            for i in range(N):
                Z[i] = 0.0
            prev = INFINITY
            converged = 0
            for it in range(1, max_newton + 1):
                counters[2] += 1
                for s in range(3):
                    for i in range(n):
                        W[s * n + i] = y[i] + Z[s * n + i]
                _matvec(AkA, W, R, N)
                for i in range(N):
                    R[i] = -Z[i] + h_step * R[i]
                _lu_solve(M, piv, R, dZ, N)
                dz = 0.0
                zmax = 0.0
                for i in range(N):
                    Z[i] += dZ[i]
                    if fabs(dZ[i]) > dz:
                        dz = fabs(dZ[i])
                    if fabs(Z[i]) > zmax:
                        zmax = fabs(Z[i])
                # a correction that stops contracting has hit the rounding floor
                if dz <= newton_tol * (1.0 + zmax) or (it >= 2 and dz >= 0.5 * prev
                                                         and (dz <= 1e-2 * scale_max or dz <= STALL_TOL * (1.0 + zmax))):
                    converged = 1
                    break
                prev = dz
            if not converged:
                status = NEWTON_DIVERGENCE
                break

            for i in range(n):
                ynew[i] = y[i] + Z[2 * n + i]
                ze[i] = (eest[0] * Z[i] + eest[1] * Z[n + i] + eest[2] * Z[2 * n + i]) / h_step
                tmp[i] = f[i] + ze[i]
                scale[i] = atol + rtol * (fabs(y[i]) if fabs(y[i]) > fabs(ynew[i]) else fabs(ynew[i]))
            _lu_solve(Mr, pivr, tmp, err, n)
            err_norm = _rms_scaled(err, scale, n)
            if err_norm > 1.0 and (first or rejected):
                for i in range(n):
                    tmp[n + i] = y[i] + err[i]
                _matvec(A, &tmp[n], tmp, n)
                for i in range(n):
                    tmp[i] += ze[i]
                _lu_solve(Mr, pivr, tmp, err, n)
                err_norm = _rms_scaled(err, scale, n)

            if err_norm > 1.0:
                fac = 0.9 * pow(err_norm, -0.25)
                if fac < 0.2:
                    fac = 0.2
                h = h_step * fac
                if h < h_min:
                    status = STEP_UNDERFLOW
                    break
                counters[1] += 1
                rejected = True
                continue

            t = target if landing else t + h_step
            for i in range(n):
                y[i] = ynew[i]
            _matvec(A, y, f, n)
            counters[0] += 1
            first = False
            if err_norm == 0.0:
                fac = 10.0
            else:
                fac = 0.9 * pow(err_norm, -0.25)
                if fac > 10.0:
                    fac = 10.0
            if rejected and fac > 1.0:
                fac = 1.0
            rejected = False
            h_next = h_step * fac
            if h_next > max_step:
                h_next = max_step
            if landing:
                if h_next > h:
                    h = h_next
            else:
                h = h_next
            if h > max_step:
                h = max_step
        if status != OK:
            break
        for i in range(n):
            states[k * n + i] = y[i]

    free(M); free(Mr); free(piv); free(pivr); free(Z); free(W); free(R); free(dZ)
    free(f); free(ynew); free(ze); free(err); free(tmp); free(scale)
    return status


def radau_linear(A, y0, double t0, t_out, double rtol, double atol, double max_step,
                 double newton_tol, int max_newton, double h_min):
    cdef cnp.ndarray[cnp.float64_t, ndim=2, mode="c"] A_c = np.ascontiguousarray(A, dtype=np.float64)
    cdef Py_ssize_t n = A_c.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=2, mode="c"] AkA = np.ascontiguousarray(np.kron(_A_RK, A_c))
    cdef cnp.ndarray[cnp.float64_t, ndim=2, mode="c"] ark = np.ascontiguousarray(_A_RK)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] eest = np.ascontiguousarray(_E_EST)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] y = np.array(y0, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] tout = np.ascontiguousarray(t_out, dtype=np.float64)
    cdef Py_ssize_t n_out = tout.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=2, mode="c"] states = np.empty((n_out, n), dtype=np.float64)
    cdef long counters[4]
    cdef int status
    cdef double mu_real = _MU_REAL
    cdef double* tout_p = &tout[0] if n_out > 0 else NULL
    cdef double* states_p = &states[0, 0] if n_out > 0 else NULL
    counters[0] = counters[1] = counters[2] = counters[3] = 0
    with nogil:
        status = _radau(&A_c[0, 0], &AkA[0, 0], &ark[0, 0], &eest[0], mu_real, &y[0], t0,
                        tout_p, n_out, states_p, n, rtol, atol, max_step,
                        newton_tol, max_newton, h_min, counters)
    if status < 0:
        raise MemoryError("radau workspace allocation failed")
    return states, counters[0], counters[1], counters[2], counters[3], status
