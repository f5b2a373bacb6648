"""Model builders: QCP coherent Hamiltonian, non-Hermitian effective
Hamiltonian with complex field, and the z-axis probe perturbation.

The effective Hamiltonian is

    H = Omega * Sum_k (sx_k n_{k+1} + n_k sx_{k+1})  -  (gamma/2) * Sum_k n_k

with n = sigma_+ sigma_-.  A purely imaginary ``gamma`` is the dissipative
case studied throughout; a purely real ``gamma`` gives the Hermitian
counterpart; the general complex value interpolates between them.
"""

import warnings
from dataclasses import dataclass, replace

import numpy as np
import scipy.sparse as sp

from .operators import embed, site_sum

BOUNDARIES = ("periodic", "open")
PROBE_WARN = 1e-2


@dataclass(frozen=True)
class ModelParams:
    """Immutable chain parameters shared by every builder and sweep."""

    L: int
    omega: float = 1.0
    gamma: complex = 0.0j
    boundary: str = "periodic"
    probe: float = 0.0

    def __post_init__(self):
        if self.L < 2:
            raise ValueError(f"L must be >= 2, got {self.L}")
        if self.omega <= 0:
            raise ValueError(f"omega must be > 0, got {self.omega}")
        if self.boundary not in BOUNDARIES:
            raise ValueError(f"boundary must be one of {BOUNDARIES}")
        if self.probe < 0:
            raise ValueError(f"probe must be >= 0, got {self.probe}")
        if self.probe > PROBE_WARN:
            warnings.warn(f"probe {self.probe} exceeds the weak-field "
                          f"threshold {PROBE_WARN}", stacklevel=2)

    @property
    def dim(self):
        return 2 ** self.L

    def with_gamma(self, gamma):
        return replace(self, gamma=complex(gamma))

    def with_probe(self, probe):
        return replace(self, probe=float(probe))


def _bonds(L, boundary):
    """Oriented nearest-neighbour bonds (k, k+1), each pair once per
    orientation.  At L=2 the periodic wrap duplicates the single bond, so
    it is emitted exactly once to match the explicit 4x4 matrix form."""
    pairs = [(k, k + 1) for k in range(L - 1)]
    if boundary == "periodic" and L > 2:
        pairs.append((L - 1, 0))
    return pairs


def build_h0(params):
    """Coherent QCP Hamiltonian Omega * Sum (sx_k n_{k+1} + n_k sx_{k+1})."""
    L = params.L
    dim = 2 ** L
    h = sp.csr_matrix((dim, dim), dtype=complex)
    for a, b in _bonds(L, params.boundary):
        h = h + embed("X", a, L) @ embed("N", b, L)
        h = h + embed("N", a, L) @ embed("X", b, L)
    h = params.omega * h
    h.sum_duplicates()
    h.sort_indices()
    return h


def build_heff(params):
    """Effective Hamiltonian H0 - (gamma/2) Sum_k n_k, probe included."""
    h = build_h0(params) - 0.5 * params.gamma * site_sum("N", params.L)
    if params.probe:
        h = apply_probe(h, params.probe, params.L)
    h = sp.csr_matrix(h)
    h.sum_duplicates()
    h.sort_indices()
    return h


def apply_probe(h, dh, L):
    """Main-text probe convention: H -> H - (dh/2) Sum_k sz_k."""
    if dh < 0:
        raise ValueError(f"probe must be >= 0, got {dh}")
    if dh == 0:
        return h
    out = sp.csr_matrix(h - 0.5 * dh * site_sum("Z", L))
    out.sum_duplicates()
    out.sort_indices()
    return out


def _rotate(b, L):
    """Cyclic one-site shift of a basis index (site 0 = MSB)."""
    return ((b << 1) & ((1 << L) - 1)) | (b >> (L - 1))


def _reflect(b, L):
    """Spatial reflection of a basis index: site j -> L-1-j."""
    out = 0
    for j in range(L):
        if b & (1 << j):
            out |= 1 << (L - 1 - j)
    return out


def symmetric_sector_basis(L):
    """Isometry onto the fully symmetric sector of a periodic chain.

    Returns a sparse (2^L, m) matrix whose columns are the normalized
    equal-weight sums over orbits of the dihedral group (cyclic shifts
    plus reflection).  A translation- and reflection-invariant operator
    maps this subspace to itself, so ``basis.T @ h @ basis`` is its exact
    block.  The all-down dark state and the tracked ground branch both
    live here, and the sector is ~2L times smaller than the full space.
    Column order follows ascending orbit representatives, so the basis is
    deterministic.
    """
    if L < 2:
        raise ValueError(f"L must be >= 2, got {L}")
    dim = 1 << L
    seen = np.zeros(dim, dtype=bool)
    rows, cols, data = [], [], []
    col = 0
    for b in range(dim):
        if seen[b]:
            continue
        orbit = set()
        c = b
        for _ in range(L):
            orbit.add(c)
            c = _rotate(c, L)
        for c in [_reflect(x, L) for x in orbit]:
            d = c
            for _ in range(L):
                orbit.add(d)
                d = _rotate(d, L)
        idx = sorted(orbit)
        seen[np.array(idx)] = True
        w = 1.0 / np.sqrt(len(idx))
        rows.extend(idx)
        cols.extend([col] * len(idx))
        data.extend([w] * len(idx))
        col += 1
    return sp.csr_matrix((data, (rows, cols)), shape=(dim, col))
