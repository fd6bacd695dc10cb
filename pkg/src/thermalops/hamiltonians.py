"""Spectral bookkeeping for diagonal Hamiltonians.

Energies are compared with an absolute tolerance everywhere; exact
arithmetic is out of reach for floating-point input, so every function that
decides equality of energies takes a ``tol`` argument.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .errors import ThermalOpsError

ENERGY_TOL = 1e-9


@dataclass(frozen=True)
class DiagonalHamiltonian:
    """Diagonal Hamiltonian stored as distinct ascending levels with multiplicities.

    The expanded diagonal (see :meth:`diagonal`) lists each level as often as
    its multiplicity, in ascending order. That expanded order is the basis
    every matrix acting on this space refers to.
    """

    levels: tuple
    mult: tuple

    def __post_init__(self):
        levels = tuple(float(x) for x in self.levels)
        mult = tuple(int(k) for k in self.mult)
        if len(levels) != len(mult) or not levels:
            raise ThermalOpsError("levels and multiplicities must be non-empty and of equal length")
        if any(k < 1 for k in mult):
            raise ThermalOpsError("multiplicities must be positive")
        if any(not math.isfinite(x) for x in levels):
            raise ThermalOpsError("energies must be finite")
        if any(b <= a for a, b in zip(levels, levels[1:])):
            raise ThermalOpsError("levels must be strictly increasing")
        object.__setattr__(self, "levels", levels)
        object.__setattr__(self, "mult", mult)

    @classmethod
    def from_energies(cls, energies, tol: float = ENERGY_TOL) -> "DiagonalHamiltonian":
        """Group a list of (unsorted, possibly repeated) energies into levels."""
        E = np.sort(np.asarray(energies, dtype=float).ravel())
        if E.size == 0:
            raise ThermalOpsError("need at least one energy")
        levels, mult = [E[0]], [1]
        for e in E[1:]:
            if e - levels[-1] <= tol:
                mult[-1] += 1
            else:
                levels.append(e)
                mult.append(1)
        return cls(tuple(levels), tuple(mult))

    @classmethod
    def spin(cls, gap: float, multiplicities, offset: float = 0.0) -> "DiagonalHamiltonian":
        """``(+)_j (offset + j*gap) 1_{mult_j}``; zero multiplicities leave gaps."""
        pairs = [(offset + j * gap, k) for j, k in enumerate(multiplicities) if k > 0]
        return cls(tuple(p[0] for p in pairs), tuple(p[1] for p in pairs))

    @property
    def dim(self) -> int:
        return sum(self.mult)

    def diagonal(self) -> np.ndarray:
        return np.repeat(np.array(self.levels), self.mult)

    def matrix(self) -> np.ndarray:
        return np.diag(self.diagonal()).astype(complex)

    def shifted(self, mu: float) -> "DiagonalHamiltonian":
        return DiagonalHamiltonian(tuple(x + mu for x in self.levels), self.mult)

    def scaled(self, lam: float) -> "DiagonalHamiltonian":
        if lam <= 0:
            raise ThermalOpsError("scale factor must be positive")
        return DiagonalHamiltonian(tuple(lam * x for x in self.levels), self.mult)

    def norm(self) -> float:
        return max(abs(self.levels[0]), abs(self.levels[-1]))

    def to_json(self) -> dict:
        return {"levels": list(self.levels), "mult": list(self.mult)}

    @classmethod
    def from_json(cls, obj) -> "DiagonalHamiltonian":
        return cls(tuple(obj["levels"]), tuple(obj["mult"]))


def check_beta(beta: float) -> float:
    beta = float(beta)
    if not math.isfinite(beta) or beta < 0:
        raise ThermalOpsError(f"inverse temperature must be finite and >= 0, got {beta}")
    return beta


def boltzmann_weights(H: DiagonalHamiltonian, beta: float) -> np.ndarray:
    """Unnormalised weights ``exp(-beta (E - E_min))`` on the expanded diagonal."""
    beta = check_beta(beta)
    E = H.diagonal()
    return np.exp(-beta * (E - E[0]))


def gibbs_weights(H: DiagonalHamiltonian, beta: float) -> np.ndarray:
    w = boltzmann_weights(H, beta)
    return w / w.sum()


def gibbs_state(H: DiagonalHamiltonian, beta: float) -> np.ndarray:
    """``exp(-beta H) / tr exp(-beta H)``; ``beta = 0`` gives the maximally mixed state."""
    return np.diag(gibbs_weights(H, beta)).astype(complex)


@dataclass(frozen=True)
class BohrSpectrum:
    values: tuple        # distinct signed differences, ascending
    multiplicities: tuple
    degenerate: bool

    @property
    def abs_values(self) -> tuple:
        return tuple(v for v in self.values if v >= 0)


def _group(sorted_values, tol):
    groups, counts = [], []
    for v in sorted_values:
        if groups and v - groups[-1] <= tol:
            counts[-1] += 1
        else:
            groups.append(float(v))
            counts.append(1)
    return groups, counts


def bohr_spectrum(H: DiagonalHamiltonian, tol: float = ENERGY_TOL) -> BohrSpectrum:
    """Spectrum of ``ad_H``: all differences ``E_i - E_j`` over the expanded diagonal.

    ``degenerate`` is set when fewer than ``n^2 - n + 1`` distinct values occur.
    """
    E = H.diagonal()
    n = E.size
    diffs = np.sort((E[:, None] - E[None, :]).ravel())
    groups, counts = _group(diffs, tol)
    # snap the group representing zero to exactly 0 so abs/signed views agree
    groups = [0.0 if abs(g) <= tol else g for g in groups]
    return BohrSpectrum(tuple(groups), tuple(counts), len(groups) < n * n - n + 1)


def transition_set(H: DiagonalHamiltonian) -> np.ndarray:
    """Distinct nonnegative differences between levels of ``H``."""
    L = np.array(H.levels)
    return np.unique(np.abs(L[:, None] - L[None, :]).ravel())


def in_spectrum(value: float, spectrum, tol: float) -> bool:
    spectrum = np.asarray(spectrum)
    return bool(spectrum.size) and bool(np.min(np.abs(spectrum - value)) <= tol)


@dataclass(frozen=True)
class ResonanceGraph:
    vertices: tuple      # distinct bath levels
    edges: tuple         # pairs of vertex indices (i < j)
    components: tuple    # tuples of vertex indices

    @property
    def is_resonant(self) -> bool:
        return len(self.components) == 1


def resonance_graph(H_B: DiagonalHamiltonian, H_S: DiagonalHamiltonian,
                    tol: float = ENERGY_TOL) -> ResonanceGraph:
    """Graph on the bath levels joining pairs whose gap is a system transition."""
    trans = transition_set(H_S)
    L = np.array(H_B.levels)
    k = L.size
    gaps = np.abs(L[:, None] - L[None, :])
    adj = np.zeros((k, k), dtype=bool)
    for t in trans:
        adj |= np.abs(gaps - t) <= tol
    np.fill_diagonal(adj, False)
    edges = tuple((int(i), int(j)) for i, j in zip(*np.nonzero(np.triu(adj))))
    ncomp, labels = connected_components(csr_matrix(adj), directed=False)
    comps = tuple(tuple(int(v) for v in np.flatnonzero(labels == c)) for c in range(ncomp))
    comps = tuple(sorted(comps))
    return ResonanceGraph(tuple(H_B.levels), edges, comps)


def _real_gcd(a: float, b: float, tol: float) -> float:
    a, b = abs(a), abs(b)
    while b > tol:
        a, b = b, math.fmod(a, b)
        # fmod remainders within tol of the divisor are rounding noise
        if a - b <= tol:
            b = 0.0
    return a


def rational_bohr_constant(H: DiagonalHamiltonian, tol: float = ENERGY_TOL,
                           max_ratio: float = 1e6) -> float | None:
    """Largest ``r > 0`` with every level difference an integer multiple of ``r``.

    Runs a Euclidean GCD on the positive differences with a tolerance cutoff.
    Returns ``None`` if no common constant exists, which is detected by the
    candidate collapsing to the noise floor (ratio of largest difference to
    ``r`` above ``max_ratio``) or by a failed divisibility check.
    """
    L = np.array(H.levels)
    if L.size < 2:
        return None
    diffs = L[1:] - L[0]
    g = float(diffs[0])
    for d in diffs[1:]:
        g = _real_gcd(g, float(d), tol)
        if g <= tol:
            return None
    if diffs[-1] / g > max_ratio:
        return None
    # refine: the GCD of exact multiples is diffs / k with k integral
    k = np.rint(diffs / g)
    if np.max(np.abs(diffs - k * g)) > tol * max(1.0, float(np.max(k))):
        return None
    g = float(np.sum(diffs * k) / np.sum(k * k))
    return g


def is_spin_form(H: DiagonalHamiltonian, gap: float, tol: float = ENERGY_TOL) -> bool:
    """Whether ``sigma(H)`` lies on the grid ``E_1 + j * gap``."""
    if gap <= 0:
        raise ThermalOpsError("gap must be positive")
    x = (np.array(H.levels) - H.levels[0]) / gap
    return bool(np.all(np.abs(x - np.rint(x)) * gap <= tol))


def mixing_allowed(H_S: DiagonalHamiltonian, H_B: DiagonalHamiltonian, ij, kl,
                   tol: float = ENERGY_TOL) -> bool:
    """Necessary condition for a thermal operation to move weight between rho_ij and rho_kl.

    Indices are 0-based positions on the expanded diagonal of ``H_S``. True iff
    ``E_i - E_k == E_j - E_l`` and that difference is a gap of ``H_B``.
    """
    E = H_S.diagonal()
    n = E.size
    i, j = ij
    k, l = kl
    if not all(0 <= x < n for x in (i, j, k, l)):
        raise IndexError(f"indices {ij}, {kl} out of range for dimension {n}")
    d1 = E[i] - E[k]
    d2 = E[j] - E[l]
    if abs(d1 - d2) > tol:
        return False
    return in_spectrum(abs(d1), transition_set(H_B), tol)
