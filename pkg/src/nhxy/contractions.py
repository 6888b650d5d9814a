"""Two-point contractions ``G_r = Tr[rho_g B_j A_{j+r}]`` of the Jordan-Wigner fermions.

``A_j = c_j^+ + c_j`` and ``B_j = c_j^+ - c_j``. In the biorthogonal ground state
only the mixed AB/BA contractions survive and

    G_r = (2/N) sum_{k>0} [Y_k sin(rk) - X_k cos(rk)]

with ``(X_k, Y_k) = (cos theta_k, sin theta_k)``; the thermodynamic limit
replaces the sum by ``(1/pi) int_0^pi dk``. The right-only convention swaps in
the Bloch components of the normalized right eigenvector.
"""

from __future__ import annotations

import enum
import functools
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad_vec
from scipy.optimize import brentq, minimize_scalar

from .errors import DegenerateModeError, QuadratureError, TableRangeError
from .model import ModeSolution, ModelParams, kernel, mode_momenta, solve_modes

DEFAULT_N_EFF = 8192
QUAD_EPSABS = 1e-10
QUAD_LIMIT = 2000
SCAN_POINTS = 1024


class Convention(str, enum.Enum):
    BIORTHOGONAL = "biorthogonal"
    RIGHT_ONLY = "right-only"

    def __str__(self):
        return self.value


class Backend(str, enum.Enum):
    FINITE_SUM = "finite-sum"
    QUADRATURE = "quadrature"

    def __str__(self):
        return self.value


def half_angles(cos_theta, sin_theta):
    """``(cos(theta/2), sin(theta/2))`` from the full-angle pair, with ``2 s c = sin theta``.

    The common sign of the pair is arbitrary and drops out of every expectation value.
    """
    cos_theta = np.asarray(cos_theta, dtype=complex)
    sin_theta = np.asarray(sin_theta, dtype=complex)
    c = np.sqrt((1 + cos_theta) / 2)
    s = np.sqrt((1 - cos_theta) / 2)
    # take the larger root directly and the smaller one from sin theta = 2 s c
    use_c = np.abs(c) >= np.abs(s)
    c_out = np.where(use_c, c, sin_theta / (2 * np.where(use_c, 1.0, s)))
    s_out = np.where(use_c, sin_theta / (2 * np.where(use_c, c, 1.0)), s)
    return c_out, s_out


def bloch_components(cos_theta, sin_theta, convention=Convention.BIORTHOGONAL):
    """Coefficients ``(X, Y)`` that multiply ``cos(rk)`` and ``sin(rk)`` in ``G_r``."""
    cos_theta = np.asarray(cos_theta, dtype=complex)
    sin_theta = np.asarray(sin_theta, dtype=complex)
    if Convention(convention) is Convention.BIORTHOGONAL:
        return cos_theta, sin_theta
    c, s = half_angles(cos_theta, sin_theta)
    cc, ss = np.abs(c) ** 2, np.abs(s) ** 2
    norm = cc + ss
    return (cc - ss) / norm + 0j, 2 * (c * s.conj()).real / norm + 0j


def mode_bloch(sol: ModeSolution, convention=Convention.BIORTHOGONAL):
    if sol.degenerate:
        raise DegenerateModeError(sol.k)
    x, y = bloch_components(sol.cos_theta, sol.sin_theta, convention)
    return complex(x), complex(y)


def mode_moments(cos_theta, sin_theta, convention=Convention.BIORTHOGONAL):
    """Per-pair moments ``(<n_k>, <c_k^+ c_-k^+>, <c_-k c_k>)`` of the mode state.

    Biorthogonal: ``|g_k><g~_k|``. Right-only: ``|g_k><g_k| / <g_k|g_k>``.
    """
    c, s = half_angles(cos_theta, sin_theta)
    if Convention(convention) is Convention.BIORTHOGONAL:
        return s * s, -1j * s * c, 1j * s * c
    norm = np.abs(c) ** 2 + np.abs(s) ** 2
    return np.abs(s) ** 2 / norm + 0j, -1j * s.conj() * c / norm, 1j * s * c.conj() / norm


def _check_degenerate(modes):
    if np.any(modes.degenerate):
        k_bad = float(modes.k[np.argmax(modes.degenerate)])
        raise DegenerateModeError(k_bad, f"mode k={k_bad!r} sits on an exceptional point; "
                                         "move the field off the EP ellipse")


def _finite_sum(params, rs, convention, n):
    p = params.with_size(n)
    k = mode_momenta(p)
    m = solve_modes(p, k)
    _check_degenerate(m)
    x, y = bloch_components(m.cos_theta, m.sin_theta, convention)
    rk = np.outer(np.asarray(rs, dtype=float), k)
    return (2.0 / n) * (np.sin(rk) @ y - np.cos(rk) @ x)


def split_points(params: ModelParams, samples: int = SCAN_POINTS):
    """Interior momenta in (0, pi) where the integrand may jump or peak.

    Scans ``z(k) = w(k)^2`` on a uniform grid for crossings of the negative real
    axis (where the principal root flips sign) and for local minima of ``|z|``
    (exceptional points and near misses); each candidate is refined.
    """
    def z_of(k):
        a, b = kernel(params, k)
        return a * a + b * b

    grid = np.linspace(0.0, np.pi, samples)
    z = z_of(grid)
    points = []
    im = z.imag
    for j in np.nonzero(np.sign(im[:-1]) * np.sign(im[1:]) < 0)[0]:
        root = brentq(lambda k: z_of(k).imag, grid[j], grid[j + 1], xtol=1e-15)
        if z_of(root).real <= 0:
            points.append(root)
    mod = np.abs(z)
    for j in range(1, samples - 1):
        if mod[j] <= mod[j - 1] and mod[j] < mod[j + 1]:
            res = minimize_scalar(lambda k: abs(z_of(k)), bounds=(grid[j - 1], grid[j + 1]),
                                  method="bounded", options={"xatol": 1e-13})
            points.append(float(res.x))
    points = sorted(p for p in points if 0.0 < p < np.pi)
    merged = []
    for p in points:
        if not merged or p - merged[-1] > 1e-12:
            merged.append(p)
    return merged


def _quadrature(params, rs, convention, epsabs=QUAD_EPSABS, limit=QUAD_LIMIT):
    rs = np.asarray(rs, dtype=float)

    def integrand(k):
        m = solve_modes(params, np.array([k]))
        if m.degenerate[0]:
            return np.zeros(2 * rs.size)
        x, y = bloch_components(m.cos_theta[0], m.sin_theta[0], convention)
        f = y * np.sin(rs * k) - x * np.cos(rs * k)
        return np.concatenate([f.real, f.imag])

    edges = [0.0, *split_points(params), np.pi]
    total = np.zeros(2 * rs.size)
    for a, b in zip(edges[:-1], edges[1:]):
        val, err, info = quad_vec(integrand, a, b, epsabs=epsabs, epsrel=0.0, limit=limit,
                                  norm="max", full_output=True)
        if info.status != 0:
            raise QuadratureError(f"quadrature over [{a:.6g}, {b:.6g}] did not converge", err)
        total += val
    half = rs.size
    return (total[:half] + 1j * total[half:]) / np.pi


def contraction_g(params: ModelParams, r: int, convention=Convention.BIORTHOGONAL,
                  backend=Backend.FINITE_SUM, n_eff: int = DEFAULT_N_EFF) -> complex:
    """Single contraction ``G_r``.

    The finite sum runs over the chain's own momenta, or over ``n_eff`` momenta
    when ``params`` is in the thermodynamic limit.
    """
    convention, backend = Convention(convention), Backend(backend)
    if backend is Backend.QUADRATURE:
        return complex(_quadrature(params, [r], convention)[0])
    n = params.n if params.n is not None else n_eff
    return complex(_finite_sum(params, [r], convention, n)[0])


@dataclass(frozen=True, eq=False)
class ContractionTable:
    """Immutable table of ``G_r`` for ``-max_r <= r <= max_r``."""

    params: ModelParams
    convention: Convention
    max_r: int
    values: np.ndarray
    backend: Backend
    n_eff: int | None = None

    def __getitem__(self, r):
        if abs(r) > self.max_r:
            raise TableRangeError(f"G_{r} outside table range [-{self.max_r}, {self.max_r}]")
        return self.values[r + self.max_r]

    def take(self, rs):
        """Vectorized lookup of ``G_r`` for an integer array ``rs``."""
        rs = np.asarray(rs)
        if rs.size and np.max(np.abs(rs)) > self.max_r:
            raise TableRangeError(f"table covers |r| <= {self.max_r}, requested up to {np.max(np.abs(rs))}")
        return self.values[rs + self.max_r]

    def require(self, lo, hi):
        if -lo > self.max_r or hi > self.max_r:
            raise TableRangeError(f"need G_r for r in [{lo}, {hi}], table covers +/-{self.max_r}")

    def as_dict(self):
        return {int(r): complex(v) for r, v in zip(range(-self.max_r, self.max_r + 1), self.values)}


@functools.lru_cache(maxsize=64)
def _cached_table(params, max_r, convention, backend, n_eff):
    rs = np.arange(-max_r, max_r + 1)
    if backend is Backend.QUADRATURE:
        values = _quadrature(params, rs, convention)
        n_used = None
    else:
        n_used = params.n if params.n is not None else n_eff
        values = _finite_sum(params, rs, convention, n_used)
    values = np.ascontiguousarray(values, dtype=complex)
    values.setflags(write=False)
    return ContractionTable(params, convention, max_r, values, backend, n_used)


def contraction_table(params: ModelParams, max_r: int, convention=Convention.BIORTHOGONAL,
                      backend=Backend.FINITE_SUM, n_eff: int = DEFAULT_N_EFF) -> ContractionTable:
    """Build (or fetch from cache) the table of ``G_r`` for ``|r| <= max_r``."""
    if max_r < 0:
        raise ValueError("max_r must be non-negative")
    backend = Backend(backend)
    if backend is Backend.QUADRATURE or params.n is not None:
        n_eff = None
    return _cached_table(params, int(max_r), Convention(convention), backend, n_eff)


@dataclass(frozen=True)
class IdentityReport:
    """Largest deviations of ``<A_j A_j'>`` from delta and of ``<B_j B_j'>`` from -delta."""

    max_aa_deviation: float
    max_bb_deviation: float
    separations: tuple
    max_ba_deviation: float = 0.0


def contraction_identities_check(params: ModelParams, convention=Convention.BIORTHOGONAL,
                                 n: int | None = None, max_sep: int = 8) -> IdentityReport:
    """Evaluate AA, BB and BA contractions from the per-pair moments in momentum space.

    All four normal/anomalous real-space averages are summed independently, so the
    BA combination also cross-checks ``G_r`` from :func:`contraction_g`.
    """
    n = n or params.n
    if n is None:
        raise ValueError("identity check needs a finite chain size")
    p = params.with_size(n)
    k = mode_momenta(p)
    m = solve_modes(p, k)
    _check_degenerate(m)
    occ, pair_create, pair_annihilate = mode_moments(m.cos_theta, m.sin_theta, convention)
    seps = np.arange(-max_sep, max_sep + 1)
    rk = np.outer(seps, k)
    cos_rk, sin_rk = np.cos(rk), np.sin(rk)
    delta = (seps == 0).astype(float)
    hop = (2.0 / n) * (cos_rk @ occ)                      # <c+_j c_{j+r}>
    hop_rev = delta - (2.0 / n) * (cos_rk @ occ)          # <c_j c+_{j+r}>
    cc_create = (2j / n) * (sin_rk @ pair_create)         # <c+_j c+_{j+r}>
    cc_annihilate = (2j / n) * (sin_rk @ pair_annihilate)  # <c_j c_{j+r}>
    aa = cc_create + hop + hop_rev + cc_annihilate
    bb = cc_create - hop - hop_rev + cc_annihilate
    ba = cc_create + hop - hop_rev - cc_annihilate
    g = _finite_sum(p, seps, convention, n)
    return IdentityReport(
        max_aa_deviation=float(np.max(np.abs(aa - delta))),
        max_bb_deviation=float(np.max(np.abs(bb + delta))),
        separations=tuple(int(s) for s in seps),
        max_ba_deviation=float(np.max(np.abs(ba - g))),
    )
