"""Longitudinal spin-spin correlator as a Toeplitz determinant of contractions."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.linalg import LinAlgWarning, lu_factor

from .contractions import Backend, ContractionTable, Convention
from .errors import FitError


@dataclass(frozen=True)
class CorrelatorResult:
    """``C^x_{l,l+r}`` with its determinant bookkeeping.

    ``log_abs`` and ``phase`` hold the determinant in polar form so that values far
    below the float range are still reported. ``condition_hint`` is the smallest
    pivot magnitude met during elimination.
    """

    r: int
    value: complex
    log_abs: float
    phase: float
    convention: Convention
    backend: Backend
    condition_hint: float


def toeplitz_matrix(table: ContractionTable, r: int) -> np.ndarray:
    """``M[a, b] = G_{b - a + 1}`` for ``a, b = 0..r-1``."""
    if r < 1:
        raise ValueError(f"separation must be >= 1, got {r}")
    table.require(2 - r, r)
    a = np.arange(r)
    return table.take(a[None, :] - a[:, None] + 1)


def lu_determinant(m: np.ndarray):
    """Determinant via LU with partial pivoting.

    Returns ``(value, log_abs, phase, min_pivot)``. An exactly singular pivot gives
    ``(0, -inf, 0, 0)``.
    """
    m = np.asarray(m, dtype=complex)
    if m.shape[0] == 0:
        return 1.0 + 0j, 0.0, 0.0, math.inf
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", LinAlgWarning)
        lu, piv = lu_factor(m, check_finite=True)
    diag = np.diag(lu)
    pivots = np.abs(diag)
    min_pivot = float(pivots.min())
    if min_pivot == 0.0:
        return 0j, -math.inf, 0.0, 0.0
    swaps = int(np.count_nonzero(piv != np.arange(piv.size)))
    log_abs = float(np.sum(np.log(pivots)))
    phase = float(np.sum(np.angle(diag)) + math.pi * swaps)
    phase = math.remainder(phase, 2 * math.pi)
    value = complex(math.exp(log_abs) * complex(math.cos(phase), math.sin(phase))) if log_abs > -745 else 0j
    return value, log_abs, phase, min_pivot


def correlator_x(table: ContractionTable, r: int) -> CorrelatorResult:
    """``C^x_{l,l+r} = Tr[rho_g sx_l sx_{l+r}]`` from the contraction table."""
    value, log_abs, phase, min_pivot = lu_determinant(toeplitz_matrix(table, r))
    return CorrelatorResult(int(r), value, log_abs, phase, table.convention, table.backend, min_pivot)


def correlator_curve(table: ContractionTable, rs) -> list[CorrelatorResult]:
    return [correlator_x(table, int(r)) for r in rs]


@dataclass(frozen=True)
class PowerLawFit:
    exponent: float
    amplitude: float
    residual: float
    n_points: int


def scaling_fit(values, window) -> PowerLawFit:
    """Least-squares fit of ``ln y = exponent * ln x + ln amplitude`` inside ``window``.

    ``values`` is a sequence of ``(x, y)`` pairs (e.g. ``(r, Re C^x)``); ``residual``
    is the RMS deviation in log space.
    """
    lo, hi = window
    pts = [(float(x), float(y)) for x, y in values if lo <= x <= hi]
    if len(pts) < 8:
        raise FitError(f"window [{lo}, {hi}] holds {len(pts)} points, need at least 8")
    for x, y in pts:
        if not y > 0:
            raise FitError(f"non-positive value {y!r} at x={x:g}; log-log fit undefined")
    lx = np.log([p[0] for p in pts])
    ly = np.log([p[1] for p in pts])
    slope, intercept = np.polyfit(lx, ly, 1)
    resid = ly - (slope * lx + intercept)
    return PowerLawFit(float(slope), float(math.exp(intercept)),
                       float(np.sqrt(np.mean(resid**2))), len(pts))


def log_fit(values, window):
    """Fit ``y = slope * ln x + offset``; returns ``(slope, offset, rms_residual)``.

    Used for entanglement growth ``S_L ~ (c/3) ln L``.
    """
    lo, hi = window
    pts = [(float(x), float(y)) for x, y in values if lo <= x <= hi]
    if len(pts) < 2:
        raise FitError(f"window [{lo}, {hi}] holds {len(pts)} points, need at least 2")
    lx = np.log([p[0] for p in pts])
    y = np.array([p[1] for p in pts])
    slope, offset = np.polyfit(lx, y, 1)
    resid = y - (slope * lx + offset)
    return float(slope), float(offset), float(np.sqrt(np.mean(resid**2)))
