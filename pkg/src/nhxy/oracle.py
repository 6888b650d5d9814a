"""Brute-force exact diagonalization of the spin chain, used to validate the free-fermion formulas.

Sites are numbered ``0..N-1`` and site 0 is the leftmost tensor factor. The
basis state with bit value 1 on a site has ``sz = -1`` there, i.e. an occupied
Jordan-Wigner fermion.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from functools import reduce

import numpy as np
import scipy.linalg
import scipy.sparse as sp
from scipy.optimize import linear_sum_assignment

from .entanglement import pair_eigenvalues, xlogx
from .errors import NearDegenerateError, NhxyError
from .model import ModelParams

log = logging.getLogger(__name__)

MAX_SITES = 12

PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def pauli_terms(params: ModelParams):
    """The Hamiltonian as ``[(coefficient, ((site, 'X'), (site', 'X'))), ...]`` with periodic wrap."""
    n, g, lam = params.n, params.gamma, params.lam
    terms = []
    for j in range(n):
        jp = (j + 1) % n
        terms.append((-(1 + g) / 4, ((j, "X"), (jp, "X"))))
        terms.append((-(1 - g) / 4, ((j, "Y"), (jp, "Y"))))
    for j in range(n):
        terms.append((lam / 2, ((j, "Z"),)))
    return terms


def site_operator(pauli: str, site: int, n: int) -> sp.csr_matrix:
    return sp.kron(sp.kron(sp.identity(2**site, format="csr"), sp.csr_matrix(PAULI[pauli])),
                   sp.identity(2 ** (n - site - 1), format="csr"), format="csr")


def string_operator(factors, n: int) -> sp.csr_matrix:
    """Product of single-site Paulis given as ``((site, 'X'), ...)``, sites in any order."""
    ops = [site_operator(p, s, n) for s, p in factors]
    return reduce(lambda a, b: a @ b, ops, sp.identity(2**n, dtype=complex, format="csr"))


def build_hamiltonian(params: ModelParams, sparse: bool = False):
    """Dense (or CSR) ``2^N x 2^N`` matrix of the periodic chain."""
    n = params.n
    if n is None:
        raise ValueError("exact diagonalization needs a finite chain")
    if n > MAX_SITES:
        raise ValueError(f"N={n} exceeds the ED limit of {MAX_SITES} sites "
                         f"(dense matrix would need 4^N * 16 B = {16 * 4**n / 2**30:.1f} GiB)")
    h = sp.csr_matrix((2**n, 2**n), dtype=complex)
    for coef, factors in pauli_terms(params):
        h = h + coef * string_operator(factors, n)
    return h if sparse else h.toarray()


def parity_sector(n: int, even: bool = True) -> np.ndarray:
    """Basis indices with ``prod_j sz_j = +1`` (even number of flipped spins) or -1."""
    idx = np.arange(2**n)
    pop = np.array([bin(i).count("1") for i in idx])
    return idx[(pop % 2 == 0) == even]


@dataclass(frozen=True, eq=False)
class EdGroundState:
    """Biorthogonal ground state of the even sector embedded in the full space.

    ``left`` is the ket ``|g~>``; the density matrix is ``|right><left|`` with
    ``<left|right> = norm = 1``.
    """

    n: int
    sector: str
    energy: complex
    right: np.ndarray = field(repr=False)
    left: np.ndarray = field(repr=False)
    norm: complex
    gap_re: float
    residual: float
    raw_overlap: float
    odd_sector_min: complex | None = None

    @property
    def bra(self) -> np.ndarray:
        return self.left.conj()

    def expect(self, op) -> complex:
        return complex(self.bra @ (op @ self.right))


def ed_ground_state(h, parity: str = "even", gap_tol: float = 1e-10,
                    allow_degenerate: bool = False, with_odd: bool = False) -> EdGroundState:
    """Lowest-real-part eigenpair (ties broken by imaginary part) inside a parity sector."""
    if parity not in ("even", "odd"):
        raise ValueError("parity must be 'even' or 'odd'")
    dim = h.shape[0]
    n = dim.bit_length() - 1
    if 2**n != dim:
        raise ValueError("Hamiltonian dimension is not a power of two")
    idx = parity_sector(n, parity == "even")
    hs = h[idx][:, idx]
    hs = hs.toarray() if sp.issparse(hs) else np.asarray(hs)
    e, vl, vr = scipy.linalg.eig(hs, left=True, right=True)
    order = np.lexsort((e.imag, e.real))
    e0 = e[order[0]]
    gap = float(e[order[1]].real - e0.real) if e.size > 1 else np.inf
    if gap < gap_tol and not allow_degenerate:
        raise NearDegenerateError(f"lowest real parts {e0:.12g} and {e[order[1]]:.12g} are within "
                                  f"{gap_tol:g}; move the test point off the degeneracy")
    r = vr[:, order[0]]
    r = r / np.linalg.norm(r)
    lb = vl[:, order[0]].conj()
    lb = lb / np.linalg.norm(lb)
    overlap = lb @ r
    if abs(overlap) < 1e-10:
        raise NhxyError(f"left/right overlap {abs(overlap):.2e} vanishes (defective ground state)")
    lb = lb / overlap
    hnorm = float(np.linalg.norm(hs, 2)) or 1.0
    residual = max(np.linalg.norm(hs @ r - e0 * r), np.linalg.norm(lb @ hs - e0 * lb) / np.linalg.norm(lb))
    right = np.zeros(dim, dtype=complex)
    left = np.zeros(dim, dtype=complex)
    right[idx] = r
    left[idx] = lb.conj()
    odd_min = None
    if with_odd:
        other = parity_sector(n, parity != "even")
        ho = h[other][:, other]
        eo = scipy.linalg.eigvals(ho.toarray() if sp.issparse(ho) else ho)
        odd_min = complex(eo[np.lexsort((eo.imag, eo.real))[0]])
        log.debug("cross-sector gap Re(E_other - E_%s) = %.3e", parity, odd_min.real - e0.real)
    return EdGroundState(n, parity, complex(e0), right, left, complex(lb @ r), gap,
                         float(residual / hnorm), float(abs(overlap)), odd_min)


def majorana(m: int, n: int) -> sp.csr_matrix:
    """``c_{2l} = (prod_{j<l} sz_j) sx_l`` and ``c_{2l+1} = (prod_{j<l} sz_j) sy_l``."""
    site, kind = divmod(m, 2)
    factors = [(j, "Z") for j in range(site)] + [(site, "Y" if kind else "X")]
    return string_operator(factors, n)


def jw_a(site: int, n: int) -> sp.csr_matrix:
    """``A_j = c_j^+ + c_j``."""
    return majorana(2 * site, n)


def jw_b(site: int, n: int) -> sp.csr_matrix:
    """``B_j = c_j^+ - c_j = -i c_{2j+1}``."""
    return -1j * majorana(2 * site + 1, n)


def ed_contraction(state: EdGroundState, r: int) -> complex:
    """``<B_j A_{j+r}>`` measured with explicit Jordan-Wigner strings (no wrap-around)."""
    n = state.n
    j = max(0, -r)
    if not 0 <= j + r < n:
        raise ValueError(f"|r|={abs(r)} too large for N={n}")
    return state.expect(jw_b(j, n) @ jw_a(j + r, n))


def wick_identities(state: EdGroundState, max_sep: int | None = None):
    """Largest deviations of ``<A_j A_j'>`` from delta and ``<B_j B_j'>`` from -delta."""
    n = state.n
    sites = range(n) if max_sep is None else range(min(n, max_sep + 1))
    aa_dev = bb_dev = 0.0
    a_ops = {j: jw_a(j, n) for j in sites}
    b_ops = {j: jw_b(j, n) for j in sites}
    for j, jp in itertools.product(sites, sites):
        delta = 1.0 if j == jp else 0.0
        aa_dev = max(aa_dev, abs(state.expect(a_ops[j] @ a_ops[jp]) - delta))
        bb_dev = max(bb_dev, abs(state.expect(b_ops[j] @ b_ops[jp]) + delta))
    return aa_dev, bb_dev


def reduced_density_matrix(state: EdGroundState, L: int) -> np.ndarray:
    """``Tr_{sites >= L} |right><left|`` for the leftmost ``L`` sites."""
    n = state.n
    rm = state.right.reshape(2**L, 2 ** (n - L))
    lm = state.bra.reshape(2**L, 2 ** (n - L))
    return rm @ lm.T


@dataclass(frozen=True, eq=False)
class BlockEntropy:
    """Entropy of the leftmost ``L`` sites from the exact reduced density matrix.

    ``principal`` is ``-sum_i w_i Log w_i`` with the principal log of each
    eigenvalue. ``value`` takes ``log w_i`` on the branch that respects the
    tensor-product structure: the spectrum is matched to products of
    ``(1 +- nu_m)/2`` (``nu`` from Majorana two-point functions measured on the
    same state) and ``log w_i`` is the sum of the factors' principal logs.
    ``spectral_residual`` is the worst mismatch of that matching.
    """

    L: int
    value: complex
    principal: complex
    trace: complex
    spectrum: np.ndarray = field(repr=False)
    nu: np.ndarray = field(repr=False)
    spectral_residual: float


def measured_gamma(state: EdGroundState, L: int) -> np.ndarray:
    """``Gamma_mn = -i (<c_m c_n> - delta_mn)`` over the Majoranas of the first ``L`` sites."""
    n = state.n
    ops = [majorana(m, n) for m in range(2 * L)]
    kets = [op @ state.right for op in ops]
    bras = [state.bra @ op for op in ops]
    g = np.empty((2 * L, 2 * L), dtype=complex)
    for a, b in itertools.product(range(2 * L), range(2 * L)):
        g[a, b] = -1j * (bras[a] @ kets[b] - (1.0 if a == b else 0.0))
    return g


def block_entropy(state: EdGroundState, L: int) -> BlockEntropy:
    rho = reduced_density_matrix(state, L)
    w = scipy.linalg.eigvals(rho)
    principal = complex(-np.sum(xlogx(w)))
    nu, _ = pair_eigenvalues(scipy.linalg.eigvals(measured_gamma(state, L)))
    signs = np.array(list(itertools.product((1, -1), repeat=L)))
    factors = (1 + signs * nu[None, :]) / 2
    products = np.prod(factors, axis=1)
    cost = np.abs(w[:, None] - products[None, :])
    rows, cols = linear_sum_assignment(cost)
    residual = float(cost[rows, cols].max())
    with np.errstate(divide="ignore", invalid="ignore"):
        logs = np.sum(np.log(factors.astype(complex)), axis=1)
    tiny = np.abs(w[rows]) < 1e-14
    value = complex(-np.sum(np.where(tiny, 0j, w[rows] * logs[cols])))
    return BlockEntropy(L, value, principal, complex(np.trace(rho)), w, nu, residual)


@dataclass(frozen=True, eq=False)
class EdObservables:
    cx: dict
    entropy: dict
    sz: complex


def ed_observables(state: EdGroundState, r_max: int, L_max: int) -> EdObservables:
    """``C^x_{1,1+r}`` for ``r <= r_max``, block entropies for ``L <= L_max`` and ``<sz_1>``."""
    n = state.n
    if r_max > n // 2 - 1 and r_max > 0:
        raise ValueError(f"r_max={r_max} exceeds N/2 - 1 = {n // 2 - 1}")
    if L_max > n // 2:
        raise ValueError(f"L_max={L_max} exceeds N/2 = {n // 2}")
    sx0 = site_operator("X", 0, n)
    cx = {r: state.expect(sx0 @ site_operator("X", r, n)) for r in range(1, r_max + 1)}
    ent = {L: block_entropy(state, L) for L in range(1, L_max + 1)}
    return EdObservables(cx, ent, state.expect(site_operator("Z", 0, n)))
