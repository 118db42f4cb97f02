"""Pure-Python kernels, used when the compiled extension is unavailable.

Mirrors ``_kernels.pyx`` function for function. Status codes are shared
with the compiled version through ``_status``.
"""
import math

import numpy as np

from . import _status
from ._radau_tableau import A_RK, E_EST, MU_REAL

PIVOT_FLOOR = 1e-300
STALL_TOL = 1.4901161193847656e-08  # sqrt(machine epsilon)


def lu_factor(a):
    """In-place-style LU with partial pivoting on a copy of `a`.

    Returns ``(lu, piv, status)``; status is ``_status.SINGULAR`` when a pivot
    falls below ``PIVOT_FLOOR`` in magnitude.
    """
    lu = np.array(a, dtype=float, order="C")
    n = lu.shape[0]
    piv = np.arange(n, dtype=np.intp)
    for k in range(n):
        p = k + int(np.argmax(np.abs(lu[k:, k])))
        if abs(lu[p, k]) < PIVOT_FLOOR:
            return lu, piv, _status.SINGULAR
        if p != k:
            lu[[k, p]] = lu[[p, k]]
            piv[[k, p]] = piv[[p, k]]
        if k + 1 < n:
            lu[k + 1:, k] /= lu[k, k]
            lu[k + 1:, k + 1:] -= np.outer(lu[k + 1:, k], lu[k, k + 1:])
    return lu, piv, _status.OK


def lu_solve(lu, piv, b):
    n = lu.shape[0]
    x = np.asarray(b, dtype=float)[piv].copy()
    for i in range(1, n):
        x[i] -= lu[i, :i] @ x[:i]
    for i in range(n - 1, -1, -1):
        x[i] = (x[i] - lu[i, i + 1:] @ x[i + 1:]) / lu[i, i]
    return x


def _rms(v):
    return math.sqrt(float(v @ v) / v.size)


def _initial_step(A, y0, f0, rtol, atol, span, max_step):
    scale = atol + rtol * np.abs(y0)
    d0 = _rms(y0 / scale)
    d1 = _rms(f0 / scale)
    h0 = 1e-6 if (d0 < 1e-5 or d1 < 1e-5) else 0.01 * d0 / d1
    h0 = min(h0, span)
    y1 = y0 + h0 * f0
    d2 = _rms((A @ y1 - f0) / scale) / h0
    if d1 <= 1e-15 and d2 <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** 0.25
    return min(100.0 * h0, h1, span, max_step)


def radau_linear(A, y0, t0, t_out, rtol, atol, max_step, newton_tol, max_newton, h_min):
    """Integrate ``y' = A y`` with 3-stage Radau IIA, landing on every `t_out`.

    Returns ``(states, n_steps, n_rejected, n_newton, n_lu, status)`` where
    ``states[k]`` is the solution at ``t_out[k]``.
    """
    A = np.asarray(A, dtype=float)
    n = A.shape[0]
    y = np.array(y0, dtype=float)
    t_out = np.asarray(t_out, dtype=float)
    states = np.empty((t_out.size, n))
    n_steps = n_rej = n_newton = n_lu = 0
    eye_n = np.eye(n)
    eye_big = np.eye(3 * n)
    AkronA = np.kron(A_RK, A)

    t = float(t0)
    f = A @ y
    span = float(t_out[-1] - t0) if t_out.size else 0.0
    h = _initial_step(A, y, f, rtol, atol, span, max_step) if span > 0 else 0.0
    h_lu = -1.0
    lu_big = piv_big = lu_real = piv_real = None
    rejected = False
    first = True

    for k in range(t_out.size):
        target = float(t_out[k])
        while t < target:
            remaining = target - t
            landing = h >= remaining * (1.0 - 1e-12)
            h_step = remaining if landing else h
            if not landing and h_step < h_min:
                return states, n_steps, n_rej, n_newton, n_lu, _status.STEP_UNDERFLOW

            if h_step != h_lu:
                lu_big, piv_big, st = lu_factor(eye_big - h_step * AkronA)
                if st != _status.OK:
                    return states, n_steps, n_rej, n_newton, n_lu, st
                lu_real, piv_real, st = lu_factor(MU_REAL / h_step * eye_n - A)
                if st != _status.OK:
                    return states, n_steps, n_rej, n_newton, n_lu, st
                h_lu = h_step
                n_lu += 1

            scale = atol + rtol * np.abs(y)
            scale_max = float(scale.max())
            Z = np.zeros(3 * n)
            base = np.tile(y, 3)
            prev = math.inf
            converged = False
            for it in range(1, max_newton + 1):
                n_newton += 1
                residual = -Z + h_step * (AkronA @ (base + Z))
                dZ = lu_solve(lu_big, piv_big, residual)
                Z += dZ
                dz = float(np.max(np.abs(dZ)))
                z_size = 1.0 + float(np.max(np.abs(Z)))
                # a correction that stops contracting has hit the rounding floor
                if dz <= newton_tol * z_size or (it >= 2 and dz >= 0.5 * prev
                                                    and (dz <= 1e-2 * scale_max or dz <= STALL_TOL * z_size)):
                    converged = True
                    break
                prev = dz
            if not converged:
                return states, n_steps, n_rej, n_newton, n_lu, _status.NEWTON_DIVERGENCE

            y_new = y + Z[2 * n:]
            ze = (E_EST[0] * Z[:n] + E_EST[1] * Z[n:2 * n] + E_EST[2] * Z[2 * n:]) / h_step
            err = lu_solve(lu_real, piv_real, f + ze)
            scale = atol + rtol * np.maximum(np.abs(y), np.abs(y_new))
            err_norm = _rms(err / scale)
            if err_norm > 1.0 and (first or rejected):
                err = lu_solve(lu_real, piv_real, A @ (y + err) + ze)
                err_norm = _rms(err / scale)

            if err_norm > 1.0:
                fac = max(0.2, 0.9 * err_norm ** -0.25)
                h = h_step * fac
                if h < h_min:
                    return states, n_steps, n_rej, n_newton, n_lu, _status.STEP_UNDERFLOW
                n_rej += 1
                rejected = True
                continue

            t = target if landing else t + h_step
            y = y_new
            f = A @ y
            n_steps += 1
            first = False
            fac = 10.0 if err_norm == 0.0 else min(10.0, 0.9 * err_norm ** -0.25)
            if rejected:
                fac = min(fac, 1.0)
            rejected = False
            h_next = min(h_step * fac, max_step)
            # a truncated landing step must not shrink the controller's step
            h = max(h_next, h) if landing else h_next
            h = min(h, max_step)
        states[k] = y
    return states, n_steps, n_rej, n_newton, n_lu, _status.OK
