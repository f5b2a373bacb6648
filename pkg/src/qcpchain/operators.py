"""Spin-1/2 Hilbert-space bookkeeping and sparse Pauli-string algebra.

Basis convention (fixed for the whole package): site 0 is the most
significant bit of the computational-basis index, ``|1>`` is spin-up and
``|0>`` is spin-down, so basis index 0 is the all-down state.  Every
index-dependent quantity (correlations, partial traces) relies on this.
"""

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

# Single-site 2x2 blocks under the convention above (row/col 0 = down).
_BLOCKS = {
    "I": np.array([[1, 0], [0, 1]], dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, 1j], [-1j, 0]], dtype=complex),
    "Z": np.array([[-1, 0], [0, 1]], dtype=complex),
    "P": np.array([[0, 0], [1, 0]], dtype=complex),   # sigma_plus (raises down->up)
    "M": np.array([[0, 1], [0, 0]], dtype=complex),   # sigma_minus
    "N": np.array([[0, 0], [0, 1]], dtype=complex),   # sigma_+ sigma_- = (Z+I)/2
}

PAULI_KINDS = tuple(_BLOCKS)


def pauli_block(kind):
    """Return the 2x2 matrix for a single-site Pauli factor kind."""
    try:
        return _BLOCKS[kind].copy()
    except KeyError:
        raise ValueError(f"unknown Pauli kind {kind!r}; expected one of {PAULI_KINDS}")


@dataclass(frozen=True)
class PauliString:
    """A coefficient times a product of single-site factors.

    ``factors`` is a tuple of (kind, site) pairs with strictly increasing
    site indices and at most one factor per site.  An empty tuple denotes
    coefficient times identity.
    """

    coefficient: complex = 1.0
    factors: tuple = field(default_factory=tuple)

    def __post_init__(self):
        sites = [s for _, s in self.factors]
        if sorted(set(sites)) != sites:
            raise ValueError(f"factor sites must be strictly increasing, got {sites}")
        for kind, _ in self.factors:
            if kind not in _BLOCKS:
                raise ValueError(f"unknown Pauli kind {kind!r}")


def embed(kind, site, L):
    """Embed a single-site operator at ``site`` into the 2^L-dim space (CSR)."""
    if not 0 <= site < L:
        raise ValueError(f"site {site} out of range for L={L}")
    left = sp.identity(2 ** site, dtype=complex, format="csr")
    right = sp.identity(2 ** (L - site - 1), dtype=complex, format="csr")
    op = sp.kron(sp.kron(left, sp.csr_matrix(_BLOCKS[kind])), right, format="csr")
    op.sum_duplicates()
    return op


def assemble(terms, L):
    """Sum of coefficient-weighted embedded Pauli strings, exact, CSR output.

    Construction accumulates coordinate triplets and merges duplicates
    canonically so the sparse layout is deterministic.
    """
    dim = 2 ** L
    acc = sp.coo_matrix((dim, dim), dtype=complex)
    for term in terms:
        op = sp.identity(dim, dtype=complex, format="csr")
        for kind, site in term.factors:
            if not 0 <= site < L:
                raise ValueError(f"site {site} out of range for L={L}")
            op = op @ embed(kind, site, L)
        acc = acc + term.coefficient * op
    out = sp.csr_matrix(acc)
    out.sum_duplicates()
    out.sort_indices()
    return out


def site_sum(kind, L):
    """Sum_k of a single-site operator over all sites, as CSR."""
    dim = 2 ** L
    total = sp.csr_matrix((dim, dim), dtype=complex)
    for k in range(L):
        total = total + embed(kind, k, L)
    total.sum_duplicates()
    return total


def op_add(a, b):
    """Exact sparse sum of two operators of matching dimension."""
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch {a.shape} vs {b.shape}")
    out = sp.csr_matrix(a + b)
    out.sum_duplicates()
    return out


def op_scale(c, a):
    """Scalar multiple of an operator."""
    out = sp.csr_matrix(c * a)
    out.sum_duplicates()
    return out


def op_matvec(a, v):
    """Matrix-vector product, the hot path for iterative solvers."""
    v = np.asarray(v)
    if a.shape[1] != v.shape[0]:
        raise ValueError(f"dimension mismatch {a.shape} vs {v.shape}")
    return a @ v


def op_commutator(a, b):
    """[A, B] = AB - BA as CSR."""
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch {a.shape} vs {b.shape}")
    out = sp.csr_matrix(a @ b - b @ a)
    out.sum_duplicates()
    return out


def is_hermitian(a, tol=1e-14):
    """True when A equals its conjugate transpose within absolute ``tol``."""
    diff = a - a.conj().T
    if diff.nnz == 0:
        return True
    return np.max(np.abs(diff.data)) <= tol
