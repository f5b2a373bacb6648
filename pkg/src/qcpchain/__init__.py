"""Exact-diagonalization toolkit for a dissipative quantum contact
process on a spin chain: sparse Pauli-string operators, non-Hermitian
eigensolvers with biorthogonal left states, ground-state tracking through
the exceptional point, observables, and critical-exponent fits.
"""

__version__ = "0.1.0"

from .criticality import (CriticalPoint, FitError, FitResult,
                          extrapolate_gc, fit_beta, fit_gamma, fit_nu,
                          fit_xi)
from .eigensolver import (SolverError, Spectrum, eig_full, eig_left,
                          eig_targeted, eigsh_lowest)
from .groundstate import (GroundStateRecord, MethodsDisagreeError,
                          SweepTrace, find_crossing_hermitian,
                          find_gamma_c, select_ground, solve_point, sweep)
from .models import ModelParams, apply_probe, build_h0, build_heff
from .observables import (ChiEstimate, RuleMismatchError,
                          correlation_profile, energy_gap,
                          entanglement_entropy, expect_lr, expect_rr,
                          magnetization, occupation, susceptibility,
                          sweep_observables)
from .operators import (PauliString, assemble, embed, is_hermitian,
                        op_add, op_commutator, op_matvec, op_scale,
                        pauli_block, site_sum)
from .oracle import (L2Solution, l2_ep, l2_hermitian_mx, l2_matrix, l2_mx,
                     l2_spectrum, run_checks)

__all__ = [
    "__version__",
    "CriticalPoint", "FitError", "FitResult", "extrapolate_gc",
    "fit_beta", "fit_gamma", "fit_nu", "fit_xi",
    "SolverError", "Spectrum", "eig_full", "eig_left", "eig_targeted",
    "eigsh_lowest",
    "GroundStateRecord", "MethodsDisagreeError", "SweepTrace",
    "find_crossing_hermitian", "find_gamma_c", "select_ground",
    "solve_point", "sweep",
    "ModelParams", "apply_probe", "build_h0", "build_heff",
    "ChiEstimate", "RuleMismatchError", "correlation_profile", "energy_gap",
    "entanglement_entropy", "expect_lr", "expect_rr", "magnetization",
    "occupation", "susceptibility", "sweep_observables",
    "PauliString", "assemble", "embed", "is_hermitian", "op_add",
    "op_commutator", "op_matvec", "op_scale", "pauli_block", "site_sum",
    "L2Solution", "l2_ep", "l2_hermitian_mx", "l2_matrix", "l2_mx",
    "l2_spectrum", "run_checks",
]
