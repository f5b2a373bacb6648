"""Observables on tracked ground states: magnetizations, occupation,
probe susceptibility, connected correlations, bipartite entropy, gaps.

All default expectation values are right-right, ``<psi|O|psi>/<psi|psi>``,
which is the convention the sweep outputs use; a biorthogonal left-right
variant is provided for diagnostics.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .operators import is_hermitian, site_sum

HERMITIAN_IM_TOL = 1e-10
NORM_TOL = 1e-8
LR_INNER_FLOOR = 1e-12
SCHMIDT_FLOOR = 1e-14


@lru_cache(maxsize=64)
def magnetization_ops(L):
    """Cached (Sx, Sy, Sz, Nup) total operators for a chain of length L."""
    return (site_sum("X", L), site_sum("Y", L), site_sum("Z", L),
            site_sum("N", L))


def expect_rr(state, op, hermitian=None):
    """Right-right expectation value; real for Hermitian operators.

    Raises ValueError if the state norm deviates from 1 by more than 1e-8
    or if a Hermitian operator yields an imaginary part above 1e-10.
    """
    state = np.asarray(state)
    nrm = np.linalg.norm(state)
    if abs(nrm - 1.0) > NORM_TOL:
        raise ValueError(f"state norm {nrm} deviates from 1 beyond {NORM_TOL}")
    val = complex(state.conj() @ (op @ state))
    if hermitian is None:
        hermitian = is_hermitian(op)
    if hermitian:
        if abs(val.imag) > HERMITIAN_IM_TOL:
            raise ValueError(
                f"Hermitian expectation has imaginary part {val.imag:.3e}")
        return val.real
    return val


def expect_lr(left, right, op):
    """Biorthogonal expectation <l|O|r>/<l|r> (left conjugated).

    Raises ValueError when |<l|r>| <= 1e-12 (defective or mismatched pair).
    """
    left = np.asarray(left)
    right = np.asarray(right)
    inner = complex(left.conj() @ right)
    if abs(inner) <= LR_INNER_FLOOR:
        raise ValueError(f"|<l|r>| = {abs(inner):.3e} too small for a "
                         f"biorthogonal expectation")
    return complex(left.conj() @ (op @ right)) / inner


def magnetization(state, L, alpha):
    """Total magnetization M^alpha = <sum_i sigma^alpha_i>, alpha in xyz."""
    ops = {"x": 0, "y": 1, "z": 2}
    if alpha not in ops:
        raise ValueError(f"alpha must be one of {tuple(ops)}")
    return expect_rr(state, magnetization_ops(L)[ops[alpha]], hermitian=True)


def occupation(state, L):
    """Total up-spin occupation n_up = <sum_i n_i>."""
    return expect_rr(state, magnetization_ops(L)[3], hermitian=True)


class RuleMismatchError(RuntimeError):
    """The probe flipped the tracked branch, so the finite difference
    would mix two different states."""


BRANCH_OVERLAP_MIN = 0.99


@dataclass
class ChiEstimate:
    value: float
    record: object            # unprobed GroundStateRecord at this point
    converged: bool = None    # dh vs dh/2 agreement; None when unchecked


def _probed_mz(params, gamma, rec, dh, solver, policy, hermitian):
    """M^z of the probed solve continued from the unprobed state ``rec``.

    The probe shifts real parts by O(dh), so the probed family can
    legitimately re-open a tiny real part past the EP; branch identity is
    therefore judged by overlap with the unprobed state, not by the rule
    label.
    """
    from .groundstate import select_ground, solve_point

    ph = params.with_gamma(gamma).with_probe(dh)
    values, vectors = solve_point(ph, rec, solver)
    j, _, ov = select_ground(values, vectors, rec, policy=policy,
                             eps_re=1e-8 * params.omega,
                             hermitian=hermitian)
    if ov < BRANCH_OVERLAP_MIN:
        raise RuleMismatchError(
            f"probed state overlaps the unprobed branch by only {ov:.4f} "
            f"at gamma={gamma}; the probe flipped the selected branch")
    return magnetization(vectors[:, j], params.L, "z")


def susceptibility(params, gamma, prev=None, dh=1e-5, solver="auto",
                   policy="min-im", record=None, check_convergence=False):
    """Probe susceptibility chi = [M^z(dh) - M^z(0)] / (2 dh) at one Gamma.

    Both solves are tracked: the unprobed one from ``prev`` (skipped when a
    ``record`` for this Gamma is already available), the probed one from
    the unprobed state at the same point.  RuleMismatchError signals that
    the probe flipped the selected branch.  With ``check_convergence`` a
    third solve at dh/2 sets ``converged`` to whether the two estimates
    agree within 5% (expected away from the critical point).
    """
    from .groundstate import GroundStateRecord, select_ground, solve_point

    if dh <= 0:
        raise ValueError("dh must be > 0")
    eps_re = 1e-8 * params.omega
    hermitian = complex(gamma).imag == 0.0
    if record is not None:
        rec = record
    else:
        p0 = params.with_gamma(gamma).with_probe(0.0)
        values, vectors = solve_point(p0, prev, solver)
        i, rule0, ov = select_ground(values, vectors, prev, policy=policy,
                                     eps_re=eps_re, hermitian=hermitian)
        rec = GroundStateRecord(gamma, complex(values[i]), vectors[:, i],
                                rule0, ov)
    mz0 = magnetization(rec.state, params.L, "z")
    mzh = _probed_mz(params, gamma, rec, dh, solver, policy, hermitian)
    chi = (mzh - mz0) / (2.0 * dh)
    converged = None
    if check_convergence:
        mzh2 = _probed_mz(params, gamma, rec, dh / 2, solver, policy,
                          hermitian)
        chi2 = (mzh2 - mz0) / dh
        scale = max(abs(chi), abs(chi2), 1e-300)
        converged = bool(abs(chi - chi2) / scale < 0.05)
    return ChiEstimate(value=chi, record=rec, converged=converged)


def correlation_profile(state, L):
    """Connected x-x correlations C(n) = <s^x_1 s^x_n> - <s^x_1><s^x_n>
    for n = 2..L (1-based sites).  Returns (n_values, C_values).

    The boundary enters only through the state itself: a periodic chain
    yields the symmetric rebound C(n) = C(L + 2 - n), an open chain a
    monotone decay."""
    from .operators import assemble, PauliString

    state = np.asarray(state)
    sx1 = assemble([PauliString(1.0, (("X", 0),))], L)
    m1 = expect_rr(state, sx1, hermitian=True)
    ns = np.arange(2, L + 1)
    out = np.empty(len(ns))
    for k, n in enumerate(ns):
        sxn = assemble([PauliString(1.0, (("X", n - 1),))], L)
        pair = assemble([PauliString(1.0, (("X", 0), ("X", n - 1)))], L)
        mn = expect_rr(state, sxn, hermitian=True)
        out[k] = expect_rr(state, pair, hermitian=True) - m1 * mn
    return ns, out


ENTROPY_KINDS = ("biorthogonal", "right")
SELF_ORTHO_FLOOR = 1e-300


def entanglement_entropy(state, L, cut, kind="biorthogonal"):
    """Bipartite von Neumann entropy of the first ``cut`` sites (natural log).

    Two notions are exposed because a non-Hermitian eigenstate supports two
    distinct reduced density matrices, and they answer different questions:

    - ``kind="biorthogonal"`` (default): the reduction of the biorthogonal
      density matrix.  The Hamiltonians built here are complex symmetric,
      so the left eigenvector is the conjugate of the right one and
      ``rho_A = Tr_B(r r^T) / (r^T r)`` needs only the right vector.  Its
      eigenvalues are complex; the entropy is ``Re(-sum l ln l)``.  This is
      the transition diagnostic: it develops a sharp peak at the spectral
      closing, amplified by the self-orthogonality ``r^T r -> 0`` at the
      exceptional point.  It is not bounded by ln(dim) and can be negative;
      for a real state it reduces exactly to the standard entropy.
    - ``kind="right"``: the ordinary Hermitian entropy of the right vector
      alone, from Schmidt weights of ``r / |r|``.  Bounded by
      ``ln(min(2^cut, 2^(L-cut)))``; the natural object for size and
      area-law comparisons.

    Weights below 1e-14 in magnitude are dropped.  Both kinds satisfy
    S(cut) = S(L - cut).  Raises ValueError for a self-orthogonal state
    (``|r^T r|`` below 1e-300), where the biorthogonal entropy diverges.
    """
    if not 1 <= cut <= L - 1:
        raise ValueError(f"cut must be in [1, {L - 1}]")
    if kind not in ENTROPY_KINDS:
        raise ValueError(f"kind must be one of {ENTROPY_KINDS}")
    state = np.asarray(state)
    psi = state / np.linalg.norm(state)
    m = psi.reshape(2 ** cut, 2 ** (L - cut))
    if kind == "right":
        s = np.linalg.svd(m, compute_uv=False)
        p = s * s
        p = p[p >= SCHMIDT_FLOOR]
        p = p / p.sum()
        return float(-(p * np.log(p)).sum())
    a = m if cut <= L - cut else m.T
    rho = a @ a.T
    inner = np.trace(rho)
    if abs(inner) < SELF_ORTHO_FLOOR:
        raise ValueError(
            "self-orthogonal state (r^T r = 0): the biorthogonal entropy "
            "diverges at an exceptional point")
    lam = np.linalg.eigvals(rho / inner)
    lam = lam[np.abs(lam) >= SCHMIDT_FLOOR]
    return float((-(lam * np.log(lam.astype(complex))).sum()).real)


def energy_gap(values, index):
    """Distance |E_n - E_sel| to the nearest other eigenvalue."""
    values = np.asarray(values)
    if len(values) < 2:
        raise ValueError("need at least two eigenvalues for a gap")
    d = np.abs(values - values[index])
    d[index] = np.inf
    return float(d.min())


def sweep_observables(params, grid, axis="im", dh=1e-5, solver="auto",
                      policy="min-im", with_entropy=True, with_chi=True,
                      k=10, entropy_kind="biorthogonal"):
    """Tracked sweep with the full per-point observable set.

    Returns a list of dict rows matching the sweep CSV schema.  chi is NaN
    where the probed and unprobed selections disagree (the finite
    difference is undefined across the branch switch there).  svn_half is
    the half-chain entropy of ``entropy_kind`` (biorthogonal by default,
    the transition diagnostic).
    """
    from .groundstate import sweep

    rows = []
    prev_holder = {"rec": None}

    def on_point(rec, values, vectors):
        L = params.L
        mx = magnetization(rec.state, L, "x")
        my = magnetization(rec.state, L, "y")
        mz = magnetization(rec.state, L, "z")
        nup = occupation(rec.state, L)
        gap = energy_gap(values, int(np.argmin(
            np.abs(values - rec.energy))))
        if with_chi:
            try:
                chi = susceptibility(params, rec.gamma, dh=dh,
                                     solver=solver, policy=policy,
                                     record=rec).value
            except RuleMismatchError:
                chi = float("nan")
        else:
            chi = float("nan")
        svn = entanglement_entropy(rec.state, L, L // 2,
                                   kind=entropy_kind) \
            if with_entropy else float("nan")
        rows.append({
            "L": L, "omega": params.omega,
            "gamma_re": rec.gamma.real, "gamma_im": rec.gamma.imag,
            "e0_re": rec.energy.real, "e0_im": rec.energy.imag,
            "rule": rec.rule, "overlap_prev": rec.overlap_prev,
            "mx": mx, "my": my, "mz": mz, "nup": nup, "chi": chi,
            "gap": gap, "svn_half": svn,
        })
        prev_holder["rec"] = rec

    sweep(params, grid, axis=axis, solver=solver, policy=policy, k=k,
          on_point=on_point)
    return rows
