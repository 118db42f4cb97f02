"""Dense LU factorization with partial pivoting."""
import numpy as np

from ..errors import SingularMatrix
from . import _status
from .backend import get_kernels


def lu_factor(A, backend=None):
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {A.shape}")
    lu, piv, status = get_kernels(backend).lu_factor(A)
    if status == _status.SINGULAR:
        raise SingularMatrix("pivot magnitude below 1e-300")
    return lu, piv


def lu_solve(A, b, backend=None):
    """Solve ``A x = b``."""
    b = np.asarray(b, dtype=float)
    lu, piv = lu_factor(A, backend)
    if b.shape != (lu.shape[0],):
        raise ValueError(f"right-hand side shape {b.shape} does not match {lu.shape}")
    return get_kernels(backend).lu_solve(lu, piv, b)
