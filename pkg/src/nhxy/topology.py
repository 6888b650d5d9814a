"""Winding number of ``r(k) = d(k) - d_e(k_c)`` around the exceptional point.

``d(k) = lam - cos k + i gamma sin k`` traces an ellipse centred on ``lam``.
The reference ``d_e`` is built from the EP ``lam_e`` obtained by projecting
``lam`` radially (in ``(Re lam, Im lam / gamma)`` coordinates) onto the EP
ellipse. The winding is the net change of ``arg r(k)`` over ``k in [0, 2 pi]``
divided by ``2 pi``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import ConvergenceError
from .model import ModelParams

BOUNDARY_EPS = 1e-6
RADIAL_DELTA = 1e-4
MAX_SAMPLES = 2**20
SNAP_TOL = 0.02


@dataclass(frozen=True)
class EpReference:
    lambda_e: complex
    k_c: float
    d_e: complex
    hermitian_line: bool = False


@dataclass(frozen=True)
class WindingResult:
    """``value`` is snapped to the nearest half integer (NaN when undefined)."""

    value: float
    raw: float
    snap_distance: float
    min_radius: float
    on_boundary: bool
    samples: int
    defined: bool = True


def ep_reference(params: ModelParams) -> EpReference:
    g, lam = params.gamma, params.lam
    if g == 0.0:
        raise ValueError("EP reference is undefined for gamma = 0 (ellipse collapses)")
    if lam == 0:
        raise ValueError("EP reference is undefined at lambda = 0 (no radial direction)")
    if lam.imag == 0.0:
        lam_e = complex(math.copysign(1.0, lam.real), 0.0)
        k_c = math.acos(lam_e.real)
        return EpReference(lam_e, k_c, lam_e - math.cos(k_c) + 1j * g * math.sin(k_c), True)
    rho = math.hypot(lam.real, lam.imag / g)
    lam_e = complex(lam.real / rho, lam.imag / rho)
    k_c = math.acos(min(1.0, max(-1.0, lam_e.real)))
    d_e = lam_e - math.cos(k_c) + 1j * g * math.sin(k_c)
    return EpReference(lam_e, k_c, d_e, False)


def _curve(lam, gamma, d_e, k):
    return lam - np.cos(k) + 1j * gamma * np.sin(k) - d_e


def _raw_winding(lam, gamma, d_e, m):
    k = np.linspace(0.0, 2 * np.pi, m + 1)
    r = _curve(lam, gamma, d_e, k)
    r[-1] = r[0]
    # an exact zero sample only happens on the boundary, where the two-sided rule takes over
    with np.errstate(divide="ignore", invalid="ignore"):
        steps = np.nan_to_num(np.angle(r[1:] / r[:-1]))
    return float(np.sum(steps) / (2 * np.pi)), k, np.abs(r)


def _min_radius(lam, gamma, d_e, k, radius):
    j = int(np.argmin(radius))
    lo, hi = k[max(j - 1, 0)], k[min(j + 1, k.size - 1)]
    res = minimize_scalar(lambda q: abs(_curve(lam, gamma, d_e, q)), bounds=(lo, hi),
                          method="bounded", options={"xatol": 1e-14})
    return float(min(radius[j], abs(_curve(lam, gamma, d_e, res.x))))


def _converged_winding(lam, gamma, d_e, samples, max_samples):
    m = samples
    prev, k, radius = _raw_winding(lam, gamma, d_e, m)
    cur = prev
    while True:
        m *= 2
        if m > max_samples:
            raise ConvergenceError(f"winding did not settle below {max_samples} samples "
                                   f"(last estimates {prev:.6f}, {cur:.6f})")
        cur, k, radius = _raw_winding(lam, gamma, d_e, m)
        if abs(cur - prev) <= 1e-3:
            return cur, m, _min_radius(lam, gamma, d_e, k, radius)
        prev = cur


def winding_number(params: ModelParams, samples: int = 1024, boundary_eps: float = BOUNDARY_EPS,
                   delta: float = RADIAL_DELTA, max_samples: int = MAX_SAMPLES) -> WindingResult:
    """Winding of ``r(k)`` about the origin.

    When the contour passes within ``boundary_eps`` of the origin the value is the
    mean of the windings at ``lam * (1 +- delta)``, which gives the half-integer
    boundary values. On the Hermitian line the reference EP is not defined and a
    NaN result with ``defined=False`` is returned.
    """
    if samples < 256:
        raise ValueError("at least 256 samples are required")
    if params.lam.imag == 0.0:
        return WindingResult(math.nan, math.nan, math.nan, math.nan, False, 0, defined=False)
    ref = ep_reference(params)
    lam, g = params.lam, params.gamma
    raw, m, min_r = _converged_winding(lam, g, ref.d_e, samples, max_samples)
    on_boundary = min_r < boundary_eps
    if on_boundary:
        sides = [_converged_winding(lam * s, g, ref.d_e, samples, max_samples)[0]
                 for s in (1 + delta, 1 - delta)]
        raw = 0.5 * (sides[0] + sides[1])
    value = round(2 * raw) / 2
    snap = abs(raw - value)
    if snap > SNAP_TOL:
        raise ConvergenceError(f"winding {raw:.4f} is {snap:.3f} from a half integer")
    return WindingResult(float(value), float(raw), float(snap), min_r, on_boundary, m)
