"""Model parameters, the momentum-space kernel and the analytic phase classifier.

The chain is

    H = -1/2 sum_j [(1+g)/2 sx_j sx_{j+1} + (1-g)/2 sy_j sy_{j+1}] + lam/2 sum_j sz_j

with J = 1, real anisotropy ``g`` and complex field ``lam``. After Jordan-Wigner
and Fourier transformation every pair (k, -k), k > 0, carries the 2x2 kernel
``(lam - cos k) sz + g sin k sy`` whose lower eigenvalue is ``-w`` with
``w**2 = (lam - cos k)**2 + (g sin k)**2``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace

import numpy as np

# |w|^2 below this marks an exceptional point; sqrt of round-off would otherwise
# leave |w| ~ 1e-8 and blow up cos/sin theta.
EP_EPS = 1e-12


@dataclass(frozen=True)
class ModelParams:
    """Anisotropy ``gamma``, complex field ``lam`` and chain size.

    ``n`` is the (even) number of sites, or ``None`` for the thermodynamic limit.
    """

    gamma: float
    lam: complex
    n: int | None = None

    def __post_init__(self):
        gamma = float(self.gamma)
        if not math.isfinite(gamma):
            raise ValueError(f"gamma must be finite, got {self.gamma!r}")
        lam = complex(self.lam)
        if not (math.isfinite(lam.real) and math.isfinite(lam.imag)):
            raise ValueError(f"lambda must be finite, got {self.lam!r}")
        object.__setattr__(self, "gamma", gamma)
        object.__setattr__(self, "lam", lam)
        if self.n is not None:
            if int(self.n) != self.n or self.n < 2 or self.n % 2:
                raise ValueError(f"chain size must be an even integer >= 2, got {self.n!r}")
            object.__setattr__(self, "n", int(self.n))

    @classmethod
    def polar(cls, gamma, lam0, phi, n=None):
        """Field given as ``lam0 * exp(i phi)``."""
        return cls(gamma, complex(lam0 * math.cos(phi), lam0 * math.sin(phi)), n)

    @property
    def thermodynamic(self) -> bool:
        return self.n is None

    def with_size(self, n):
        return replace(self, n=n)

    def with_lambda(self, lam):
        return replace(self, lam=complex(lam))


@dataclass(frozen=True)
class ModeSolution:
    """Dispersion and Bogoliubov angle of a single momentum pair."""

    k: float
    d: complex
    energy_minus: complex
    cos_theta: complex
    sin_theta: complex
    degenerate: bool = False

    @property
    def w(self) -> complex:
        return -self.energy_minus


@dataclass(frozen=True)
class ModeArrays:
    """Vectorized counterpart of :class:`ModeSolution` over an array of k."""

    k: np.ndarray
    d: np.ndarray
    w: np.ndarray
    cos_theta: np.ndarray
    sin_theta: np.ndarray
    degenerate: np.ndarray

    @property
    def energy_minus(self) -> np.ndarray:
        return -self.w


class PhaseLabel(str, enum.Enum):
    FM = "FM"
    PM = "PM"
    LL = "LL"
    BOUNDARY_FM_LL = "FM|LL"
    BOUNDARY_LL_PM = "LL|PM"
    BOUNDARY_FM_PM = "FM|PM"

    def __str__(self):
        return self.value

    @property
    def is_boundary(self) -> bool:
        return "|" in self.value


def principal_sqrt(z):
    """Complex square root with Re >= 0 and, on the imaginary axis, Im >= 0.

    numpy already returns Re >= 0 but follows the sign of a signed zero in
    ``Im z`` on the negative real axis; that case is folded onto Im >= 0.
    """
    w = np.sqrt(np.asarray(z, dtype=complex))
    flip = (w.real == 0) & (w.imag < 0)
    return np.where(flip, -w, w)


def mode_momenta(params: ModelParams) -> np.ndarray:
    """Positive antiperiodic momenta ``(2n - 1) pi / N`` for ``n = 1..N/2``."""
    if params.n is None:
        raise ValueError("mode momenta need a finite chain; use the quadrature path instead")
    n = params.n
    return (2 * np.arange(1, n // 2 + 1) - 1) * np.pi / n


def kernel(params: ModelParams, k):
    """Return ``(a, b)`` with kernel ``a sz + b sy``: a = lam - cos k, b = gamma sin k."""
    k = np.asarray(k, dtype=float)
    return params.lam - np.cos(k), params.gamma * np.sin(k)


def solve_modes(params: ModelParams, k) -> ModeArrays:
    """Dispersion and angles for every momentum in ``k``.

    Degenerate entries (exceptional points) get ``w = 0`` and NaN angles; they
    are flagged in ``degenerate`` rather than divided through.
    """
    k = np.asarray(k, dtype=float)
    a, b = kernel(params, k)
    z = a * a + b * b
    degenerate = np.abs(z) < EP_EPS
    w = np.where(degenerate, 0.0, principal_sqrt(z))
    safe = np.where(degenerate, 1.0, w)
    nan = complex(np.nan, np.nan)
    cos_t = np.where(degenerate, nan, a / safe)
    sin_t = np.where(degenerate, nan, b / safe)
    d = a + 1j * b
    return ModeArrays(k, d, w, cos_t, sin_t, degenerate)


def solve_mode(params: ModelParams, k: float) -> ModeSolution:
    if not 0.0 < k < math.pi:
        raise ValueError(f"k must lie in (0, pi), got {k!r}")
    m = solve_modes(params, np.array([k]))
    return ModeSolution(
        k=float(k),
        d=complex(m.d[0]),
        energy_minus=complex(-m.w[0]),
        cos_theta=complex(m.cos_theta[0]),
        sin_theta=complex(m.sin_theta[0]),
        degenerate=bool(m.degenerate[0]),
    )


def ep_ellipse_residual(params: ModelParams) -> float:
    """``(Re lam)^2 + (Im lam)^2 / gamma^2 - 1``: negative inside the EP ellipse.

    For ``gamma = 0`` the ellipse collapses onto the segment [-1, 1]; any point
    off the real axis is reported as +inf.
    """
    lam, g = params.lam, abs(params.gamma)
    if g == 0.0:
        return math.inf if lam.imag != 0.0 else lam.real**2 - 1.0
    return lam.real**2 + (lam.imag / g) ** 2 - 1.0


def classify_phase(params: ModelParams, tol: float = 1e-9) -> PhaseLabel:
    """Analytic phase of the point: FM inside the EP ellipse, PM for |Re lam| > 1, LL otherwise.

    Boundary labels are returned within ``tol`` of the ellipse or of |Re lam| = 1.
    At ``gamma = 0`` there is no FM region (XX limit).
    """
    if tol < 0:
        raise ValueError("tol must be non-negative")
    res = ep_ellipse_residual(params)
    edge = abs(params.lam.real) - 1.0
    if params.gamma == 0.0 and res < -tol:
        res = math.inf
    if abs(res) <= tol:
        return PhaseLabel.BOUNDARY_FM_PM if abs(edge) <= tol else PhaseLabel.BOUNDARY_FM_LL
    if res < -tol:
        return PhaseLabel.FM
    if edge > tol:
        return PhaseLabel.PM
    if edge < -tol:
        return PhaseLabel.LL
    return PhaseLabel.BOUNDARY_LL_PM


def ground_energy(params: ModelParams) -> complex:
    """Total free-fermion ground energy ``sum_{k>0} eps^-_k`` of a finite chain.

    The constant from the field term cancels the mean of each pair block, so
    this is exactly the lowest-real-part eigenvalue of the even-parity sector.
    """
    m = solve_modes(params, mode_momenta(params))
    return complex(-np.sum(m.w))
