"""Qubit thermal and enhanced thermal operations.

For a qubit with ``H_S = diag(0, gap)`` every enhanced thermal operation has
a Choi matrix of the form

    [[1 - lam q, 0, 0, c], [0, lam q, 0, 0], [0, 0, lam, 0], [conj(c), 0, 0, 1 - lam]]

with ``q = exp(-beta gap)``, ``lam in [0, 1]`` and ``|c| <= sqrt((1 - lam)(1 - lam q))``.
The pair ``(lam, c)`` is what :func:`psi` reads off a channel, and composition
of channels becomes the product :func:`circ` on those pairs.

Temperatures enter only through ``q``; ``q = 1`` is infinite temperature.
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .channels import QuantumChannel, apply
from .errors import DimensionCapExceeded, DimensionMismatch, InfeasibleParameters, ThermalOpsError
from .hamiltonians import DiagonalHamiltonian
from .thermal import SpinBlockSpec, ThermalOpSpec, assemble_spin_blocks, qubit_hamiltonian, realize

MEMBERSHIP_TOL = 1e-9
DEFAULT_DIM_CAP = 4096


def check_q(q: float) -> float:
    q = float(q)
    if not (0.0 < q <= 1.0) or not math.isfinite(q):
        raise ThermalOpsError(f"q must lie in (0, 1], got {q}")
    return q


def beta_from_q(q: float, gap: float = 1.0) -> float:
    return -math.log(check_q(q)) / gap


def q_from_beta(beta: float, gap: float = 1.0) -> float:
    return math.exp(-beta * gap)


def enTO_bound(lam: float, q: float) -> float:
    """Largest admissible ``|c|`` at a given ``lam``: ``sqrt((1 - lam)(1 - lam q))``."""
    return math.sqrt(max(0.0, (1.0 - lam) * (1.0 - lam * q)))


@dataclass(frozen=True)
class SemigroupElement:
    lam: float
    c: complex

    def __post_init__(self):
        lam, c = float(self.lam), complex(self.c)
        if not (math.isfinite(lam) and cmath.isfinite(c)):
            raise ThermalOpsError("semigroup element must be finite")
        object.__setattr__(self, "lam", lam)
        object.__setattr__(self, "c", c)

    @property
    def r(self) -> float:
        return abs(self.c)

    @property
    def phi(self) -> float:
        return cmath.phase(self.c)

    def distance(self, other: "SemigroupElement") -> float:
        return math.hypot(self.lam - other.lam, abs(self.c - other.c))

    def to_json(self) -> dict:
        return {"lambda": self.lam, "c": [self.c.real, self.c.imag]}


@dataclass(frozen=True)
class QubitParams:
    lam: float
    r: float
    phi: float = 0.0
    q: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "q", check_q(self.q))
        if not (0.0 <= self.lam <= 1.0):
            raise ThermalOpsError(f"lambda must lie in [0, 1], got {self.lam}")
        if self.r < 0 or not math.isfinite(self.r):
            raise ThermalOpsError(f"r must be finite and >= 0, got {self.r}")

    @property
    def bound(self) -> float:
        return enTO_bound(self.lam, self.q)

    @property
    def c(self) -> complex:
        return self.r * cmath.exp(1j * self.phi)

    def feasible(self, tol: float = MEMBERSHIP_TOL) -> bool:
        return self.r <= self.bound + tol

    def element(self) -> SemigroupElement:
        return SemigroupElement(self.lam, self.c)


def psi(S: QuantumChannel) -> SemigroupElement:
    """``(<g1|S(|g2><g2|)|g1>, <g1|S(|g1><g2|)|g2>)`` in the energy eigenbasis."""
    if S.dim != 2:
        raise DimensionMismatch(f"psi needs a qubit channel, got dim {S.dim}")
    C = S.choi
    return SemigroupElement(C[2, 2].real, C[0, 3])


def canonical_choi(lam: float, c: complex, q: float) -> np.ndarray:
    C = np.zeros((4, 4), dtype=complex)
    C[0, 0] = 1.0 - lam * q
    C[1, 1] = lam * q
    C[2, 2] = lam
    C[3, 3] = 1.0 - lam
    C[0, 3] = c
    C[3, 0] = np.conj(c)
    return C


def psi_inv(p: QubitParams, tol: float = MEMBERSHIP_TOL) -> QuantumChannel:
    """The enhanced thermal operation with coordinates ``(lam, r e^{i phi})``."""
    if not p.feasible(tol):
        raise InfeasibleParameters(
            f"r = {p.r} exceeds the bound sqrt((1-lam)(1-lam q)) = {p.bound} at lam = {p.lam}"
        )
    return QuantumChannel(2, canonical_choi(p.lam, p.c, p.q))


def circ(e1: SemigroupElement, e2: SemigroupElement, q: float) -> SemigroupElement:
    """Product of coordinates matching composition of the corresponding channels."""
    a = 1.0 + q
    return SemigroupElement(e1.lam + e2.lam - e1.lam * e2.lam * a, e1.c * e2.c)


def inverse_element(e: SemigroupElement, q: float,
                    tol: float = 1e-12) -> SemigroupElement | None:
    """Inverse under :func:`circ`, or ``None`` when ``lam = 1/(1+q)`` or ``c = 0``."""
    a = 1.0 + q
    denom = e.lam * a - 1.0
    if abs(denom) <= tol or abs(e.c) <= tol:
        return None
    return SemigroupElement(e.lam / denom, 1.0 / e.c)


class Membership(str, enum.Enum):
    INTERIOR_TO = "InteriorTO"
    DEPHASING_TO = "DephasingTO"
    ENTO_BOUNDARY_NOT_TO = "EnTOBoundaryNotTO"
    OUTSIDE_ENTO = "OutsideEnTO"


def membership(p: QubitParams, tol: float = MEMBERSHIP_TOL) -> Membership:
    B = p.bound
    if p.r > B + tol:
        return Membership.OUTSIDE_ENTO
    if p.lam <= tol:
        return Membership.DEPHASING_TO
    if abs(p.r - B) <= tol:
        return Membership.ENTO_BOUNDARY_NOT_TO
    return Membership.INTERIOR_TO


def qubit_spec_from_blocks(blocks: SpinBlockSpec, q: float) -> ThermalOpSpec:
    return assemble_spin_blocks(blocks, beta_from_q(q, blocks.gap))


# -- finite temperature: approximating the boundary -----------------------------

def parse_rational(mu) -> Fraction:
    if isinstance(mu, tuple):
        return Fraction(int(mu[0]), int(mu[1]))
    if isinstance(mu, float):
        return Fraction(mu).limit_denominator(10**6)
    return Fraction(mu)


def finite_limit(lam: float, mu: float, q: float) -> SemigroupElement:
    """``m -> infinity`` limit of the coordinates of the finite-temperature family."""
    D = mu - lam - mu * q * (1.0 - lam)
    s = math.sqrt(mu * (1.0 - lam) * (mu - lam))
    lam_lim = lam * mu * (mu - 1.0) * q / D
    c_lim = s * q + (1.0 - mu * q) * (1.0 + s * lam * q / D)
    return SemigroupElement(lam_lim, c_lim)


def _cs_block(a: np.ndarray, d: np.ndarray) -> np.ndarray:
    """Unitary ``[[diag(a), B], [-B^T, diag(d)]]`` with ``a = d (+) 1``."""
    na, nd = a.size, d.size
    if not np.allclose(a[:nd], d, rtol=0, atol=1e-15) or not np.all(a[nd:] == 1.0):
        raise ThermalOpsError("cosine-sine completion needs A = D (+) 1")
    s = np.sqrt(np.clip(1.0 - d * d, 0.0, None))
    B = np.zeros((na, nd))
    B[np.arange(nd), np.arange(nd)] = s
    return np.block([[np.diag(a), B], [-B.T, np.diag(d)]])


@dataclass(frozen=True, eq=False)
class FiniteExtremeResult:
    spec: ThermalOpSpec
    blocks: SpinBlockSpec
    psi: SemigroupElement
    limit: SemigroupElement
    alphas: tuple


def extreme_approx_finite(lam: float, mu, m: int, q: float, gap: float = 1.0,
                          dim_cap: int = DEFAULT_DIM_CAP) -> FiniteExtremeResult:
    """Finite-bath thermal operations approaching ``(lam, sqrt((1-lam)(1-lam q)))``.

    The bath has ``alpha_0 mu^j`` levels at ``j * gap`` with ``mu = p/s`` rational
    in ``(1, 1/q)`` and ``alpha_0 = s^(m-1)``. As ``m -> infinity`` the
    coordinates tend to :func:`finite_limit`, which in turn tends to the
    boundary point as ``mu -> 1/q``.
    """
    q = check_q(q)
    if q >= 1.0:
        raise ThermalOpsError("finite-temperature family needs q < 1")
    if not (0.0 <= lam <= 1.0):
        raise ThermalOpsError(f"lambda must lie in [0, 1], got {lam}")
    if m < 2:
        raise ThermalOpsError("need m >= 2")
    mu = parse_rational(mu)
    if not (1 < mu and mu * q < 1):
        raise ThermalOpsError(f"mu = {mu} must lie in (1, 1/q) = (1, {1 / q})")
    alpha0 = mu.denominator ** (m - 1)
    alphas = tuple(int(alpha0 * mu**j) for j in range(m))
    total = 2 * sum(alphas)
    if total > dim_cap:
        raise DimensionCapExceeded(total, dim_cap)

    mu_f = float(mu)
    gamma = math.sqrt((1.0 - lam) / (1.0 - lam / mu_f))
    # diagonals of D_j and A_j
    d = [None, np.ones(alphas[0])]
    a = [None]
    for j in range(1, m):
        if j >= 2:
            d.append(gamma * a[j - 1])
        a.append(np.concatenate([d[j], np.ones(alphas[j] - alphas[j - 1])]))
    blocks = SpinBlockSpec(
        gap,
        alphas,
        np.eye(alphas[0]),
        tuple(_cs_block(a[j], d[j]) for j in range(1, m)),
        np.eye(alphas[-1]),
    )
    spec = qubit_spec_from_blocks(blocks, q)
    return FiniteExtremeResult(spec, blocks, psi(realize(spec)), finite_limit(lam, mu_f, q), alphas)


# -- infinite temperature -------------------------------------------------------

def infinite_closed_form(lam: float, phi: float, m: int) -> SemigroupElement:
    s = math.sqrt(1.0 - lam)
    e = cmath.exp(1j * phi)
    return SemigroupElement(lam * (m - 1) / m, (1.0 - lam) * e + s * (1.0 + e * (1.0 - 2.0 * s)) / m)


def extreme_approx_infinite(lam: float, phi: float, m: int,
                            gap: float = 1.0) -> tuple[ThermalOpSpec, SemigroupElement]:
    """Infinite-temperature family approaching ``(lam, (1 - lam) e^{i phi})`` as ``m`` grows.

    Returns the ``ThermalOpSpec`` and the exact coordinates of its realised channel.
    """
    if m < 2:
        raise ThermalOpsError("need m >= 2")
    if not (0.0 <= lam <= 1.0):
        raise ThermalOpsError(f"lambda must lie in [0, 1], got {lam}")
    s, t = math.sqrt(1.0 - lam), math.sqrt(lam)
    e = cmath.exp(-1j * phi)
    Uj = np.array([[s, t], [-t * e, s * e]])
    blocks = SpinBlockSpec(gap, (1,) * m, np.eye(1), (Uj,) * (m - 1), np.eye(1))
    return qubit_spec_from_blocks(blocks, 1.0), infinite_closed_form(lam, phi, m)


# -- interior of the thermal-operation set ---------------------------------------

def interior_closed_form(lam: float, phi: float, m: int, q: float) -> SemigroupElement:
    q = check_q(q)
    if q == 1.0:
        return infinite_closed_form(lam, phi, m)
    g2 = (1.0 - lam) / (1.0 - lam * q)
    g = math.sqrt(g2)
    Zm = 1.0 - q**m
    lam_m = (1.0 - q ** (m - 1)) / Zm - g2 * (1.0 - q) / (1.0 - g2 * q) * (1.0 - (g2 * q) ** (m - 1)) / Zm
    c = cmath.exp(1j * phi) * (1.0 - q) / Zm * (
        g * (1.0 - (g2 * q) ** (m - 1)) / (1.0 - g2 * q) + (g * q) ** (m - 1)
    )
    return SemigroupElement(lam_m, c)


def interior_family(lam: float, phi: float, m: int, q: float,
                    gap: float = 1.0) -> tuple[ThermalOpSpec, SemigroupElement]:
    """Spin-bath thermal operations tracing a strictly convex curve from ``(0, e^{i phi})``.

    ``q = 1`` dispatches to :func:`extreme_approx_infinite`.
    """
    q = check_q(q)
    if q == 1.0:
        return extreme_approx_infinite(lam, phi, m, gap)
    if m < 2:
        raise ThermalOpsError("need m >= 2")
    if not (0.0 <= lam <= 1.0):
        raise ThermalOpsError(f"lambda must lie in [0, 1], got {lam}")
    g = math.sqrt((1.0 - lam) / (1.0 - lam * q))
    e = cmath.exp(-1j * phi)
    mids = []
    for j in range(1, m):
        a = g**j
        b = math.sqrt(max(0.0, 1.0 - g ** (2 * j)))
        mids.append(np.array([[a, 1j * b], [1j * e * b, e * a]]))
    blocks = SpinBlockSpec(gap, (1,) * m, np.eye(1), tuple(mids), np.array([[e]]))
    return qubit_spec_from_blocks(blocks, q), interior_closed_form(lam, phi, m, q)


# -- dephasing ------------------------------------------------------------------

def annulus_radius(m: int, q: float) -> float:
    """``r_m = 2(1 - q)/(1 - q^m) - 1``: the smallest ``|c|`` of phase-only unitaries."""
    q = check_q(q)
    if q == 1.0:
        return 2.0 / m - 1.0
    return 2.0 * (1.0 - q) / (1.0 - q**m) - 1.0


def dephasing_from_phases(phases, q: float,
                          gap: float = 1.0) -> tuple[ThermalOpSpec, complex, float]:
    """Dephasing through a diagonal unitary ``1_m (+) diag(e^{i phi_j})`` on a spin bath.

    Returns the ``ThermalOpSpec``, the coordinate ``c = sum_j q^j e^{-i phi_j} / sum_j q^j`` of
    the realised channel, and the annulus radius ``r_m``.
    """
    phases = np.asarray(phases, dtype=float).ravel()
    m = phases.size
    if m < 1:
        raise ThermalOpsError("need at least one phase")
    q = check_q(q)
    U = np.diag(np.concatenate([np.ones(m), np.exp(1j * phases)]))
    H_B = DiagonalHamiltonian.spin(gap, [1] * m)
    spec = ThermalOpSpec(qubit_hamiltonian(gap), H_B, U, beta_from_q(q, gap))
    w = q ** np.arange(m)
    c = complex(np.dot(w, np.exp(-1j * phases)) / w.sum())
    return spec, c, annulus_radius(m, q)


def dephasing_spec(gamma: complex, q: float = 1.0, gap: float = 1.0) -> ThermalOpSpec:
    """Dephasing ``rho_12 -> conj(gamma) rho_12`` on a trivial two-level bath.

    The unitary is ``1_2 (+) V`` with ``tr V = 2 gamma``.
    """
    gamma = complex(gamma)
    if abs(gamma) > 1.0 + 1e-12:
        raise InfeasibleParameters(f"|gamma| = {abs(gamma)} exceeds 1")
    psi_ = cmath.phase(gamma)
    t = math.acos(min(1.0, abs(gamma)))
    V = np.diag([cmath.exp(1j * (psi_ + t)), cmath.exp(1j * (psi_ - t))])
    U = np.block([[np.eye(2), np.zeros((2, 2))], [np.zeros((2, 2)), V]])
    H_B = DiagonalHamiltonian((0.0,), (2,))
    return ThermalOpSpec(qubit_hamiltonian(gap), H_B, U, beta_from_q(q, gap))


def full_dephasing_nd(n: int, H_S: DiagonalHamiltonian | None = None,
                      beta: float = 1.0) -> ThermalOpSpec:
    """Full dephasing on ``n`` levels via a trivial ``n``-level bath and Fourier phases."""
    if n < 2:
        raise ThermalOpsError("need n >= 2")
    H_S = H_S or DiagonalHamiltonian(tuple(float(j) for j in range(n)), (1,) * n)
    if H_S.dim != n:
        raise DimensionMismatch(f"system Hamiltonian has dim {H_S.dim}, expected {n}")
    j, k = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    U = np.diag(np.exp(2j * np.pi * j * k / n).ravel())
    return ThermalOpSpec(H_S, DiagonalHamiltonian((0.0,), (n,)), U, beta)


# -- thermal cones --------------------------------------------------------------

def bloch_to_state(v) -> np.ndarray:
    x, y, z = (float(t) for t in v)
    return 0.5 * np.array([[1 + z, x - 1j * y], [x + 1j * y, 1 - z]])


def state_to_bloch(rho) -> np.ndarray:
    rho = np.asarray(rho)
    return np.array([2 * rho[0, 1].real, -2 * rho[0, 1].imag, (rho[0, 0] - rho[1, 1]).real])


def act_on_bloch(lam, c, v, q: float) -> np.ndarray:
    """Vectorised action of coordinates ``(lam, c)`` on a Bloch vector ``v``.

    ``rho_11 -> (1 - lam q) rho_11 + lam rho_22`` and ``rho_12 -> c rho_12``.
    """
    x, y, z = v
    lam = np.asarray(lam, dtype=float)
    c = np.asarray(c, dtype=complex)
    z_new = lam * (1.0 - q) + z * (1.0 - lam * (1.0 + q))
    w = c * (x - 1j * y)
    return np.stack(np.broadcast_arrays(w.real, -w.imag, z_new), axis=-1)


@dataclass(frozen=True, eq=False)
class ThermalCone:
    q: float
    bloch: tuple
    points: np.ndarray       # (N, 3) reachable Bloch vectors
    boundary: np.ndarray     # (K, 3) images at r = B(lam), phi = 0
    gibbs: np.ndarray

    def contains(self, v, tol: float = 1e-9) -> bool:
        d = np.linalg.norm(self.points - np.asarray(v, dtype=float)[None, :], axis=1)
        return bool(np.min(d) <= tol)


def thermal_cone(bloch, q: float, grid=(40, 40, 60)) -> ThermalCone:
    """Sample the states reachable from ``bloch`` over a ``(lam, r/B(lam), phi)`` grid.

    The grid always contains ``lam = 1/(1+q)`` together with ``r = 0`` (whose
    image is the Gibbs state) and ``lam = 0, r = 1, phi = 0`` (the identity).
    """
    v = np.asarray(bloch, dtype=float)
    if v.shape != (3,) or not np.all(np.isfinite(v)) or np.linalg.norm(v) > 1.0 + 1e-12:
        raise ThermalOpsError(f"invalid Bloch vector {bloch!r}")
    q = check_q(q)
    n_lam, n_r, n_phi = (int(g) for g in grid)
    if min(n_lam, n_r, n_phi) < 2:
        raise ThermalOpsError("each grid axis needs at least 2 points")
    lams = np.union1d(np.linspace(0.0, 1.0, n_lam), [1.0 / (1.0 + q)])
    ts = np.linspace(0.0, 1.0, n_r)
    phis = np.linspace(-np.pi, np.pi, n_phi, endpoint=False)
    B = np.sqrt(np.clip((1.0 - lams) * (1.0 - lams * q), 0.0, None))
    L, T, P = np.meshgrid(lams, ts, phis, indexing="ij")
    C = (B[:, None, None] * T) * np.exp(1j * P)
    pts = act_on_bloch(L.ravel(), C.ravel(), v, q)
    boundary = act_on_bloch(lams, B.astype(complex), v, q)
    gibbs = np.array([0.0, 0.0, (1.0 - q) / (1.0 + q)])
    return ThermalCone(q, tuple(v.tolist()), pts, boundary, gibbs)


def apply_params(p: QubitParams, v) -> np.ndarray:
    """Bloch vector of ``psi_inv(p)`` applied to the state with Bloch vector ``v``."""
    return state_to_bloch(apply(psi_inv(p), bloch_to_state(v)))
