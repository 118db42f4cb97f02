"""Stationary distributions of continuous-time Markov generators."""
import numpy as np
from scipy.sparse import csgraph

from ..errors import DegenerateKernel
from .linalg import lu_factor
from .backend import get_kernels

NEG_TOL = 1e-12


def _adjacency(A):
    # edge j -> i whenever A[i, j] is a positive off-diagonal rate
    adj = (A.T > 0).astype(float)
    np.fill_diagonal(adj, 0.0)
    return adj


def closed_classes(A):
    """Recurrent classes of the chain; their number is the null-space dimension."""
    A = np.asarray(A, dtype=float)
    adj = _adjacency(A)
    n_comp, labels = csgraph.connected_components(adj, directed=True, connection="strong")
    out = []
    for c in range(n_comp):
        members = np.flatnonzero(labels == c)
        leaves = adj[members][:, labels != c].any()
        if not leaves:
            out.append(tuple(members.tolist()))
    return out


def reachable(A, sources):
    adj = _adjacency(np.asarray(A, dtype=float))
    seen = set()
    for s in sources:
        order = csgraph.breadth_first_order(adj, int(s), directed=True, return_predecessors=False)
        seen.update(order.tolist())
    return seen


def _solve_connected(A, backend=None):
    n = A.shape[0]
    M = A.copy()
    M[-1, :] = 1.0
    rhs = np.zeros(n)
    rhs[-1] = 1.0
    lu, piv = lu_factor(M, backend)
    k = get_kernels(backend)
    rho = k.lu_solve(lu, piv, rhs)
    # one step of iterative refinement
    rho = rho + k.lu_solve(lu, piv, rhs - M @ rho)
    if rho.min() < -NEG_TOL:
        raise DegenerateKernel(1, f"stationary solve produced population {rho.min():.3g}")
    rho = np.clip(rho, 0.0, None)
    return rho / rho.sum()


def steady_state(g, rho0=None, backend=None):
    """Stationary populations of ``rho' = A rho``.

    Solves ``A rho = 0`` with the last equation replaced by ``sum(rho) = 1``.
    When the kernel is degenerate and `rho0` is given, the long-time limit is
    still unique if only one recurrent class is reachable from the support of
    `rho0`; that class's distribution is returned. Otherwise raises
    DegenerateKernel.
    """
    A = np.asarray(getattr(g, "matrix", g), dtype=float)
    classes = closed_classes(A)
    if len(classes) == 1:
        return _solve_connected(A, backend)
    if rho0 is not None:
        v = np.asarray(getattr(rho0, "values", rho0), dtype=float)
        hit = reachable(A, np.flatnonzero(v > 0))
        targets = [c for c in classes if hit.intersection(c)]
        if len(targets) == 1:
            members = list(targets[0])
            rho = np.zeros(A.shape[0])
            if len(members) == 1:
                rho[members[0]] = 1.0
            else:
                rho[members] = _solve_connected(A[np.ix_(members, members)], backend)
            return rho
    raise DegenerateKernel(len(classes))
