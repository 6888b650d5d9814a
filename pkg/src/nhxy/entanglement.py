"""Block entanglement entropy from the Majorana correlation matrix.

The Majoranas of site ``l`` are ``A_l`` and ``-i B_l``. Their two-point matrix
restricted to a block of ``L`` spins is ``Gamma_L`` with 2x2 blocks
``Pi_r = [[0, G_{-r}], [-G_r, 0]]`` at block offset ``r = b - a``. Its
eigenvalues come in pairs ``+-i nu_m`` and

    S_L = sum_m H2((1 + nu_m) / 2),   H2(x) = -x ln x - (1 - x) ln(1 - x).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .contractions import DEFAULT_N_EFF, Backend, ContractionTable, Convention, contraction_table
from .errors import NhxyError, PairingError

XLOGX_EPS = 1e-14
PAIRING_TOL = 1e-6
BRANCH_CUT_MARGIN = 1e-6


@dataclass(frozen=True, eq=False)
class MajoranaCorrelationMatrix:
    L: int
    entries: np.ndarray

    @property
    def antisymmetry_residual(self) -> float:
        return float(np.max(np.abs(self.entries + self.entries.T))) if self.L else 0.0


@dataclass(frozen=True, eq=False)
class EntropyResult:
    """Entropy of a block of ``L`` spins.

    ``branch_margin[m]`` is the distance of ``(1 +- nu_m)/2`` from the negative
    real axis (inf when both sit in the right half plane); ``near_branch_cut``
    flags blocks where the principal logarithm is close to jumping.
    """

    L: int
    pair_values: np.ndarray
    value: complex
    pairing_residual: float
    branch_margin: np.ndarray = field(repr=False)
    pair_entropies: np.ndarray = field(repr=False)

    @property
    def near_branch_cut(self) -> bool:
        return bool(np.any(self.branch_margin < BRANCH_CUT_MARGIN))


def xlogx(x):
    """``x ln x`` with the principal log and ``0`` inside ``|x| < 1e-14``."""
    x = np.asarray(x, dtype=complex)
    tiny = np.abs(x) < XLOGX_EPS
    return np.where(tiny, 0j, x * np.log(np.where(tiny, 1.0, x)))


def binary_entropy(x):
    """``H2(x) = -x ln x - (1 - x) ln(1 - x)`` continued to complex ``x``."""
    x = np.asarray(x, dtype=complex)
    return -xlogx(x) - xlogx(1 - x)


def build_gamma(table: ContractionTable, L: int) -> MajoranaCorrelationMatrix:
    """Assemble ``Gamma_L`` from a table covering ``|r| <= L - 1``."""
    if L < 0:
        raise ValueError("block size must be non-negative")
    if L == 0:
        return MajoranaCorrelationMatrix(0, np.zeros((0, 0), dtype=complex))
    table.require(1 - L, L - 1)
    a = np.arange(L)
    offsets = a[None, :] - a[:, None]
    g = np.zeros((2 * L, 2 * L), dtype=complex)
    g[0::2, 1::2] = table.take(-offsets)
    g[1::2, 0::2] = -table.take(offsets)
    gamma = MajoranaCorrelationMatrix(L, g)
    if gamma.antisymmetry_residual > 1e-12:
        raise NhxyError(f"Gamma_L is not antisymmetric (residual {gamma.antisymmetry_residual:.3e})")
    return gamma


def pair_eigenvalues(mu):
    """Greedily match each eigenvalue with the remaining one closest to its negative.

    Returns ``(representatives, residual)`` where one member of each pair is kept
    (the one with non-negative real part of ``-i mu``) and ``residual`` is the
    largest ``|mu_i + mu_j|`` over matched pairs.
    """
    remaining = list(np.asarray(mu, dtype=complex)[np.argsort(-np.abs(mu), kind="stable")])
    reps, residual = [], 0.0
    while remaining:
        m = remaining.pop(0)
        if not remaining:
            raise PairingError("odd number of eigenvalues left unpaired")
        j = int(np.argmin(np.abs(np.asarray(remaining) + m)))
        partner = remaining.pop(j)
        residual = max(residual, abs(m + partner))
        nu = -1j * m
        reps.append(nu if nu.real >= 0 else -nu)
    return np.array(reps, dtype=complex), residual


def _branch_margin(x):
    margins = []
    for v in (x, 1 - x):
        margins.append(np.where(v.real < 0, np.abs(v.imag), np.inf))
    return np.minimum(*margins)


def entropy(gamma: MajoranaCorrelationMatrix) -> EntropyResult:
    if gamma.L == 0:
        empty = np.zeros(0, dtype=complex)
        return EntropyResult(0, empty, 0j, 0.0, np.zeros(0), empty)
    try:
        mu = scipy.linalg.eigvals(gamma.entries)
    except np.linalg.LinAlgError as exc:
        raise NhxyError(f"eigensolver failed for Gamma_{gamma.L}: {exc}") from exc
    nu, residual = pair_eigenvalues(mu)
    if residual > PAIRING_TOL:
        raise PairingError(f"+/- pairing residual {residual:.3e} exceeds {PAIRING_TOL:g} "
                           f"for L={gamma.L}; Gamma_L is defective or mis-built")
    x = (1 + nu) / 2
    per_pair = binary_entropy(x)
    return EntropyResult(gamma.L, nu, complex(np.sum(per_pair)), float(residual),
                         _branch_margin(x), per_pair)


def entanglement_entropy(table: ContractionTable, L: int) -> EntropyResult:
    return entropy(build_gamma(table, L))


def entropy_curve(params, L_values, convention=Convention.BIORTHOGONAL,
                  backend=Backend.FINITE_SUM, n_eff: int = DEFAULT_N_EFF) -> list[EntropyResult]:
    """Entropies for ascending block sizes sharing one contraction table."""
    L_values = [int(L) for L in L_values]
    if L_values != sorted(L_values):
        raise ValueError("L_values must be sorted ascending")
    if not L_values:
        return []
    table = contraction_table(params, max(L_values[-1] - 1, 0), convention, backend, n_eff)
    return [entanglement_entropy(table, L) for L in L_values]
