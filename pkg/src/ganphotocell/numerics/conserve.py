"""Trace-free reformulation of generator dynamics.

For a generator (columns summing to zero) the total population is conserved,
but an eigenvalue sits at zero and rounding in ``A @ rho`` leaks straight into
that neutral direction. Replacing the last population by ``total - sum(others)``
and appending a constant unit component gives ``z' = B z`` whose only neutral
mode is that constant component, carried by an exactly zero row of ``B``.
"""
import numpy as np

_EPS = np.finfo(float).eps


def is_generator(A):
    """True when every column of the square matrix `A` sums to zero up to rounding."""
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] < 2:
        return False
    col = np.abs(A).max(axis=0)
    return bool(np.all(np.abs(A.sum(axis=0)) <= 64 * _EPS * np.maximum(col, 1e-300)))


def reduce_generator(A, total):
    """Matrix ``B`` acting on ``z = (rho[:-1], 1)``."""
    A = np.asarray(A, dtype=float)
    B = np.zeros_like(A)
    B[:-1, :-1] = A[:-1, :-1] - A[:-1, -1:]
    B[:-1, -1] = A[:-1, -1] * total
    return B


def to_reduced(rho):
    rho = np.asarray(rho, dtype=float)
    return np.append(rho[:-1], 1.0), float(rho.sum())


def from_reduced(z, total):
    """Populations from reduced states; `z` may be one state or a stack of rows."""
    z = np.asarray(z, dtype=float)
    head = z[..., :-1]
    return np.concatenate([head, (total - head.sum(axis=-1))[..., None]], axis=-1)
