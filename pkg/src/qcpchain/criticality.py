"""Power-law fits for critical exponents and thermodynamic-limit
extrapolation of the critical point.

All exponent fits are least-squares lines in log-log (or log-linear for
the correlation length) space; ``normr`` is the Euclidean norm of the
linear-fit residuals in that space.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import curve_fit

from .groundstate import CriticalPoint, find_gamma_c  # noqa: F401 (re-export)

BETA_WINDOW = (1e-3, 0.5)
GAMMA_WINDOW = (1e-2, 1.0)
MONOTONE_SLACK = 1e-10

FIT_KINDS = ("beta", "gamma", "xi", "nu", "gc-extrapolation")


class FitError(RuntimeError):
    """Fit could not be carried out (optimizer failure, degenerate data)."""


@dataclass
class FitResult:
    kind: str
    value: float
    amplitude: float
    window: tuple
    normr: float
    points_used: int
    low_confidence: bool = False
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in FIT_KINDS:
            raise ValueError(f"kind must be one of {FIT_KINDS}")
        lo, hi = self.window
        if not lo < hi:
            raise ValueError("window must be nondegenerate (lo < hi)")


def _line_fit(x, y):
    """Least-squares line y = a*x + b; returns (a, b, normr)."""
    A = np.vstack([x, np.ones_like(x)]).T
    coef, res, rank, _ = np.linalg.lstsq(A, y, rcond=None)
    normr = float(np.sqrt(res[0])) if res.size else 0.0
    return float(coef[0]), float(coef[1]), normr


def fit_beta(series, gamma_c, window=BETA_WINDOW):
    """Order-parameter exponent: |M^x| ~ A (gamma_c - Gamma)^beta below
    the transition.  ``series`` holds (Gamma, M^x) pairs, all below
    gamma_c."""
    series = np.asarray(series, dtype=float)
    g, mx = series[:, 0], series[:, 1]
    if np.any(g >= gamma_c):
        raise ValueError("all Gamma values must lie below gamma_c")
    x = gamma_c - g
    lo, hi = window
    m = (x >= lo) & (x <= hi) & (np.abs(mx) > 0)
    if m.sum() < 3:
        raise ValueError(f"only {int(m.sum())} points in window [{lo}, {hi}]"
                         f"; need at least 3")
    slope, intercept, normr = _line_fit(np.log(x[m]), np.log(np.abs(mx[m])))
    return FitResult(kind="beta", value=slope, amplitude=float(np.exp(
        intercept)), window=(lo, hi), normr=normr, points_used=int(m.sum()))


def fit_gamma(series, gamma_c, window=GAMMA_WINDOW):
    """Susceptibility exponent: chi ~ chi0 (Gamma - gamma_c)^-gamma above
    the transition.  ``series`` holds (Gamma, chi) pairs, all above
    gamma_c; chi must be positive inside the window."""
    series = np.asarray(series, dtype=float)
    g, chi = series[:, 0], series[:, 1]
    if np.any(g <= gamma_c):
        raise ValueError("all Gamma values must lie above gamma_c")
    x = g - gamma_c
    lo, hi = window
    m = (x >= lo) & (x <= hi)
    if m.sum() < 3:
        raise ValueError(f"only {int(m.sum())} points in window [{lo}, {hi}]"
                         f"; need at least 3")
    if np.any(chi[m] <= 0):
        raise ValueError("nonpositive chi inside the fit window")
    slope, intercept, normr = _line_fit(np.log(x[m]), np.log(chi[m]))
    return FitResult(kind="gamma", value=-slope, amplitude=float(np.exp(
        intercept)), window=(lo, hi), normr=normr, points_used=int(m.sum()))


def fit_xi(ns, values, window=None):
    """Correlation length from an exponential tail: ln|C(n)| ~ -n/xi.

    ``window`` bounds the offsets n used (default [2, L/2] with L taken
    as max(n)).  A log-profile that rises anywhere inside the window marks
    the fit low-confidence (the tail is not a clean exponential there).
    """
    ns = np.asarray(ns, dtype=float)
    values = np.asarray(values, dtype=float)
    if window is None:
        window = (2, int(ns.max()) // 2)
    lo, hi = window
    m = (ns >= lo) & (ns <= hi) & (np.abs(values) > 1e-12)
    if m.sum() < 4:
        raise ValueError(f"only {int(m.sum())} usable offsets in window "
                         f"[{lo}, {hi}]; need at least 4")
    y = np.log(np.abs(values[m]))
    low_confidence = bool(np.any(np.diff(y) > MONOTONE_SLACK))
    slope, intercept, normr = _line_fit(ns[m], y)
    if slope >= 0:
        low_confidence = True
        xi = float("inf")
    else:
        xi = -1.0 / slope
    return FitResult(kind="xi", value=xi, amplitude=float(np.exp(intercept)),
                     window=(lo, hi), normr=normr, points_used=int(m.sum()),
                     low_confidence=low_confidence)


def fit_nu(xis, gamma_c, window=None):
    """Correlation-length exponent: xi ~ (Gamma - gamma_c)^-nu above the
    transition.  ``xis`` holds (Gamma, xi) pairs."""
    xis = np.asarray(xis, dtype=float)
    g, xi = xis[:, 0], xis[:, 1]
    if np.any(g <= gamma_c):
        raise ValueError("all Gamma values must lie above gamma_c")
    x = g - gamma_c
    if window is None:
        window = (float(x.min()), float(x.max()))
    lo, hi = window
    m = (x >= lo) & (x <= hi)
    if m.sum() < 3:
        raise ValueError(f"only {int(m.sum())} points in window [{lo}, {hi}]"
                         f"; need at least 3")
    if np.any(xi[m] <= 0):
        raise ValueError("nonpositive xi inside the fit window")
    slope, intercept, normr = _line_fit(np.log(x[m]), np.log(xi[m]))
    return FitResult(kind="nu", value=-slope, amplitude=float(np.exp(
        intercept)), window=(lo, hi), normr=normr, points_used=int(m.sum()))


def extrapolate_gc(points):
    """Thermodynamic-limit critical point from gamma_c(L) = gc_inf -
    a * L^(-p) with a, p > 0 free.  ``points`` holds (L, gamma_c) pairs
    for at least 4 distinct sizes."""
    points = np.asarray(points, dtype=float)
    Ls, gcs = points[:, 0], points[:, 1]
    if len(np.unique(Ls)) < 4:
        raise ValueError("need gamma_c at 4 or more distinct L")

    def model(L, gc_inf, a, p):
        return gc_inf - a * L ** (-p)

    gc0 = gcs.max() + 0.1 * (gcs.max() - gcs.min())
    p0 = 2.0
    a0 = max((gc0 - gcs.min()) * Ls.min() ** p0, 1e-3)
    try:
        popt, _ = curve_fit(model, Ls, gcs, p0=(gc0, a0, p0),
                            bounds=([-np.inf, 0.0, 0.0],
                                    [np.inf, np.inf, np.inf]),
                            maxfev=20000)
    except RuntimeError as exc:
        resid = gcs - model(Ls, gc0, a0, p0)
        raise FitError(f"extrapolation did not converge: {exc}; residuals "
                       f"at the start point were {resid}") from exc
    resid = gcs - model(Ls, *popt)
    return FitResult(kind="gc-extrapolation", value=float(popt[0]),
                     amplitude=float(popt[1]),
                     window=(float(Ls.min()), float(Ls.max())),
                     normr=float(np.linalg.norm(resid)),
                     points_used=len(Ls), meta={"p": float(popt[2])})
