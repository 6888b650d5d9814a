"""Band structure diagnostics: extrema of Re/Im of the dispersion, full bands, emergent U(1)."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateModeError
from .model import ModelParams, mode_momenta, solve_mode, solve_modes

GOLDEN_TOL = 1e-12
_INV_PHI = (math.sqrt(5) - 1) / 2


@dataclass(frozen=True)
class BandExtrema:
    min_abs_re: float
    argmin_re_k: float
    min_abs_im: float
    argmin_im_k: float


@dataclass(frozen=True)
class CriticalMode:
    exists: bool
    k_c: float
    degenerate_re: bool


@dataclass(frozen=True, eq=False)
class BandTable:
    k: np.ndarray
    energy: np.ndarray
    sign_changes: tuple

    def rows(self):
        return [(float(k), float(e.real), float(e.imag)) for k, e in zip(self.k, self.energy)]


@dataclass(frozen=True)
class U1Check:
    """Deviation of the critical-mode state under ``diag(1, exp(-2 i theta))``.

    ``deviation`` is for the Hermitian part ``rho + rho^+``; ``anti_deviation``
    for ``rho - rho^+``. ``predicted``/``anti_predicted`` are the closed forms
    ``|Re sin theta_k| * max|1 - exp(2 i theta)|`` and the same with ``Im``.
    """

    deviation: float
    predicted: float
    anti_deviation: float
    anti_predicted: float


def momentum_grid(resolution: int) -> np.ndarray:
    """Cell midpoints ``(j + 1/2) pi / resolution``; endpoints 0 and pi excluded."""
    return (np.arange(resolution) + 0.5) * np.pi / resolution


def golden_section(f, a, b, tol=GOLDEN_TOL, max_iter=200):
    """Minimize a unimodal ``f`` on ``[a, b]`` to an interval width ``tol``."""
    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(max_iter):
        if b - a <= tol:
            break
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - _INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INV_PHI * (b - a)
            fd = f(d)
    return (c, fc) if fc <= fd else (d, fd)


def _refined_min(f, k, values, n_candidates=4):
    n = k.size
    is_min = np.ones(n, dtype=bool)
    is_min[1:] &= values[1:] <= values[:-1]
    is_min[:-1] &= values[:-1] <= values[1:]
    cand = np.nonzero(is_min)[0]
    cand = cand[np.argsort(values[cand], kind="stable")][:n_candidates]
    best_k, best_v = float(k[cand[0]]), float(values[cand[0]])
    for j in cand:
        lo = k[j - 1] if j > 0 else 0.5 * k[0]
        hi = k[j + 1] if j < n - 1 else 0.5 * (k[-1] + math.pi)
        kk, vv = golden_section(f, lo, hi)
        if vv < best_v:
            best_k, best_v = float(kk), float(vv)
    return best_k, best_v


def band_extrema(params: ModelParams, resolution: int = 1024) -> BandExtrema:
    """``min_k |Re eps_k|`` and ``min_k |Im eps_k|`` with their (separate) minimizing momenta.

    A finite chain is scanned over its own momenta. In the thermodynamic limit a
    uniform grid is scanned and each candidate minimum is refined by golden
    section search within its bracketing cells.
    """
    if resolution < 64:
        raise ValueError("resolution must be >= 64")
    if params.n is not None:
        k = mode_momenta(params)
        e = -solve_modes(params, k).w
        jr, ji = int(np.argmin(np.abs(e.real))), int(np.argmin(np.abs(e.imag)))
        return BandExtrema(float(abs(e[jr].real)), float(k[jr]), float(abs(e[ji].imag)), float(k[ji]))
    k = momentum_grid(resolution)
    e = -solve_modes(params, k).w

    def re_part(q):
        return abs(float(solve_modes(params, np.array([q])).w[0].real))

    def im_part(q):
        return abs(float(solve_modes(params, np.array([q])).w[0].imag))

    kr, vr = _refined_min(re_part, k, np.abs(e.real))
    ki, vi = _refined_min(im_part, k, np.abs(e.imag))
    return BandExtrema(vr, kr, vi, ki)


def full_bands(params: ModelParams, resolution: int = 512) -> BandTable:
    """Dispersion ``eps^-_k`` on the midpoint grid plus the momenta where ``Im eps`` flips sign."""
    if resolution < 2:
        raise ValueError("resolution must be >= 2")
    k = momentum_grid(resolution)
    e = -solve_modes(params, k).w
    sign = np.sign(e.imag)
    changes = []
    last_j = None
    for j in range(k.size):
        if sign[j] == 0:
            continue
        if last_j is not None and sign[j] != sign[last_j]:
            changes.append(0.5 * float(k[last_j] + k[j]))
        last_j = j
    return BandTable(k, e, tuple(changes))


def critical_mode(params: ModelParams) -> CriticalMode:
    """The mode ``k_c = arccos Re lam`` whose energy can be purely imaginary."""
    re = params.lam.real
    if abs(re) > 1:
        return CriticalMode(False, math.nan, False)
    k_c = math.acos(re)
    return CriticalMode(True, k_c, abs(params.lam.imag) > abs(params.gamma * math.sin(k_c)))


def mode_density_matrix(params: ModelParams, k: float) -> np.ndarray:
    """``|g_k><g~_k|`` in the basis ``{|0>, c_k^+ c_-k^+ |0>}``."""
    sol = solve_mode(params, k)
    if sol.degenerate:
        raise DegenerateModeError(k)
    c2 = (1 + sol.cos_theta) / 2
    s2 = (1 - sol.cos_theta) / 2
    sc = sol.sin_theta / 2
    return np.array([[c2, -1j * sc], [1j * sc, s2]], dtype=complex)


def u1_symmetry_deviation(params: ModelParams, k: float, theta_samples) -> U1Check:
    """Largest change of ``rho_k +- rho_k^+`` under ``R = diag(1, exp(-2 i theta))``."""
    rho = mode_density_matrix(params, k)
    herm, anti = rho + rho.conj().T, rho - rho.conj().T
    dev = anti_dev = 0.0
    factor = 0.0
    for t in theta_samples:
        rot = np.diag([1.0, np.exp(-2j * t)])
        dev = max(dev, float(np.max(np.abs(rot @ herm @ rot.conj().T - herm))))
        anti_dev = max(anti_dev, float(np.max(np.abs(rot @ anti @ rot.conj().T - anti))))
        factor = max(factor, abs(1 - np.exp(2j * t)))
    sin_t = solve_mode(params, k).sin_theta
    return U1Check(dev, abs(sin_t.real) * factor, anti_dev, abs(sin_t.imag) * factor)
