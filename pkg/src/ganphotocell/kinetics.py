"""Pauli master equations of the uncoupled and coupled photocells.

Both variants share the state order ``(excited1, excited2, alpha, beta, b)``.
Off-diagonal entries are transition rates ``A[i, j]`` from ``j`` to ``i``;
each diagonal entry is the negated column sum, so the trace is conserved.
"""
from dataclasses import dataclass, field

import numpy as np

from .model import DerivedRates, ModelKind

N_STATES = 5
X1, X2, ALPHA, BETA, B = range(N_STATES)
TRACE_TOL = 1e-10


@dataclass(frozen=True)
class PopulationState:
    values: np.ndarray
    kind: ModelKind = ModelKind.COUPLED

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.shape != (N_STATES,):
            raise ValueError(f"expected {N_STATES} populations, got shape {v.shape}")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @classmethod
    def ground(cls, kind=ModelKind.COUPLED):
        v = np.zeros(N_STATES)
        v[B] = 1.0
        return cls(v, kind)

    @property
    def labels(self):
        return self.kind.state_labels

    @property
    def trace(self):
        return float(self.values.sum())

    def is_valid(self, trace_tol=TRACE_TOL, neg_tol=0.0):
        v = self.values
        return abs(v.sum() - 1.0) <= trace_tol and v.min() >= -neg_tol and v.max() <= 1.0 + neg_tol

    def __getitem__(self, label):
        return float(self.values[self.labels.index(label)])

    def as_dict(self):
        return dict(zip(self.labels, self.values.tolist()))


@dataclass(frozen=True)
class Generator:
    matrix: np.ndarray
    kind: ModelKind
    rates: DerivedRates = field(repr=False)

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    def column_sums(self):
        return self.matrix.sum(axis=0)


def _close(A):
    # diagonal = minus total outflow, so every column sums to zero
    np.fill_diagonal(A, 0.0)
    np.fill_diagonal(A, -A.sum(axis=0))
    return A


def _charge_separation(A, r):
    A[BETA, ALPHA] = r.Gamma_load
    A[B, ALPHA] = r.chi * r.Gamma_load
    A[B, BETA] = r.Gamma_beta_b


def uncoupled_generator(r):
    """Generator of two independent dots sharing the charge-separation levels."""
    A = np.zeros((N_STATES, N_STATES))
    half = r.gamma_h / 2.0
    for i in (X1, X2):
        A[i, B] = half * r.n_h
        A[B, i] = half * (1.0 + r.n_h)
        A[ALPHA, i] = r.Gamma_a_alpha
    _charge_separation(A, r)
    return Generator(_close(A), ModelKind.UNCOUPLED, r)


def coupled_generator(r):
    """Generator with the bright state x1, dark state x2 and phonon relaxation."""
    A = np.zeros((N_STATES, N_STATES))
    gx, nx = r.gamma_x, r.n_x
    A[X1, X2] = gx * nx
    A[X2, X1] = gx * (1.0 + nx)
    A[X1, B] = r.gamma_h * r.n_h
    A[B, X1] = r.gamma_h * (1.0 + r.n_h)
    A[ALPHA, X1] = r.Gamma_x1_alpha
    A[ALPHA, X2] = r.Gamma_x2_alpha
    _charge_separation(A, r)
    return Generator(_close(A), ModelKind.COUPLED, r)


def build_generator(r, kind):
    kind = ModelKind(kind)
    return coupled_generator(r) if kind is ModelKind.COUPLED else uncoupled_generator(r)


def rhs(g, rho):
    """Time derivative ``A @ rho`` of the populations (1/ns)."""
    v = rho.values if isinstance(rho, PopulationState) else np.asarray(rho, dtype=float)
    if v.shape != (N_STATES,):
        raise ValueError(f"expected {N_STATES} populations, got shape {v.shape}")
    return g.matrix @ v
