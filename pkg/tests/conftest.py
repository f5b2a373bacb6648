"""Shared fixtures and independent brute-force reference constructions.

Everything in here is deliberately written with raw ``numpy.kron`` loops,
not with :mod:`qcpchain.operators`, so the package's sparse assembly can be
cross-checked against a second, independent implementation of the same
conventions (site 0 = most significant bit, ``|1>`` = spin-up, basis index
0 = all spins down).
"""

import numpy as np
import pytest

X2 = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
Y2 = np.array([[0.0, 1.0j], [-1.0j, 0.0]], dtype=complex)
Z2 = np.array([[-1.0, 0.0], [0.0, 1.0]], dtype=complex)
N2 = np.array([[0.0, 0.0], [0.0, 1.0]], dtype=complex)
I2 = np.eye(2, dtype=complex)


def kron_site(mat, site, L):
    """Embed a 2x2 block at ``site`` with plain dense Kronecker products."""
    out = np.array([[1.0 + 0.0j]])
    for k in range(L):
        out = np.kron(out, mat if k == site else I2)
    return out


def dense_qcp(L, omega=1.0, gamma=0.0, boundary="periodic", probe=0.0):
    """Reference dense Hamiltonian built from first principles.

    Each bond {j, k} contributes ``omega * (X_j N_k + N_j X_k)`` once; the
    periodic wrap bond exists only for L > 2 (for L = 2 the wrap would
    duplicate the single physical bond).  The loss term is ``-gamma/2``
    times the total up-spin number operator, and the probe subtracts
    ``probe/2`` times the total Z operator.
    """
    dim = 2 ** L
    h = np.zeros((dim, dim), dtype=complex)
    bonds = [(k, k + 1) for k in range(L - 1)]
    if boundary == "periodic" and L > 2:
        bonds.append((L - 1, 0))
    for j, k in bonds:
        h += omega * (kron_site(X2, j, L) @ kron_site(N2, k, L))
        h += omega * (kron_site(N2, j, L) @ kron_site(X2, k, L))
    for k in range(L):
        h -= (gamma / 2.0) * kron_site(N2, k, L)
        if probe:
            h -= (probe / 2.0) * kron_site(Z2, k, L)
    return h


def matched_distance(a, b):
    """Max pairwise distance between two spectra under optimal matching."""
    from scipy.optimize import linear_sum_assignment

    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    cost = np.abs(a[:, None] - b[None, :])
    rows, cols = linear_sum_assignment(cost)
    return float(cost[rows, cols].max())


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20260816)
