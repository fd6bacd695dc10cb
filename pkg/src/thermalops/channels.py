"""Quantum channels stored as Choi matrices.

The Choi matrix of ``S`` on ``C^{n x n}`` is ``sum_ij |e_i><e_j| (x) S(|e_i><e_j|)``.
Its entry at row ``i*n + k`` and column ``j*n + l`` is ``<e_k|S(|e_i><e_j|)|e_l>``.
For qubits this puts ``<e_1|S(|e_1><e_2|)|e_2>`` at position (0, 3).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import DimensionMismatch, InvalidChannelError, ThermalOpsError
from .hamiltonians import DiagonalHamiltonian, gibbs_state
from .linalg import DEFAULT_TOL


@dataclass(frozen=True, eq=False)
class QuantumChannel:
    dim: int
    choi: np.ndarray

    def __post_init__(self):
        C = linalg.as_matrix(self.choi)
        n = int(self.dim)
        if C.shape != (n * n, n * n):
            raise DimensionMismatch(f"Choi matrix of shape {C.shape} does not match dim {n}")
        C.setflags(write=False)
        object.__setattr__(self, "choi", C)
        object.__setattr__(self, "dim", n)

    @property
    def tensor(self) -> np.ndarray:
        """Choi entries indexed as ``[i, k, j, l]``."""
        n = self.dim
        return self.choi.reshape(n, n, n, n)

    def __call__(self, rho) -> np.ndarray:
        return apply(self, rho)

    def superoperator(self) -> np.ndarray:
        """Matrix ``L`` with ``vec(S(rho)) = L vec(rho)`` for row-major ``vec``."""
        n = self.dim
        return self.tensor.transpose(1, 3, 0, 2).reshape(n * n, n * n)

    @classmethod
    def from_superoperator(cls, L) -> "QuantumChannel":
        L = np.asarray(L, dtype=complex)
        n = int(round(np.sqrt(L.shape[0])))
        if L.shape != (n * n, n * n):
            raise DimensionMismatch(f"superoperator of shape {L.shape} is not n^2 x n^2")
        choi = L.reshape(n, n, n, n).transpose(2, 0, 3, 1).reshape(n * n, n * n)
        return cls(n, choi)

    @classmethod
    def from_map(cls, f, n: int) -> "QuantumChannel":
        """Choi matrix of an arbitrary linear map given as a Python callable."""
        C = np.zeros((n, n, n, n), dtype=complex)
        for i in range(n):
            for j in range(n):
                C[i, :, j, :] = f(linalg.basis_projector(n, i, j))
        return cls(n, C.reshape(n * n, n * n))

    def to_json(self) -> dict:
        from .io import matrix_to_json

        return {"dim": self.dim, "choi": matrix_to_json(self.choi)}

    @classmethod
    def from_json(cls, obj) -> "QuantumChannel":
        from .io import matrix_from_json

        return cls(int(obj["dim"]), matrix_from_json(obj["choi"]))


def identity_channel(n: int) -> QuantumChannel:
    omega = np.eye(n).reshape(n * n)
    return QuantumChannel(n, np.outer(omega, omega))


def full_dephasing_channel(n: int) -> QuantumChannel:
    C = np.zeros((n * n, n * n))
    for i in range(n):
        C[i * n + i, i * n + i] = 1.0
    return QuantumChannel(n, C)


def unitary_channel(U) -> QuantumChannel:
    U = linalg.as_matrix(U)
    n = U.shape[0]
    v = U.T.reshape(n * n)  # sum_i e_i (x) U e_i
    return QuantumChannel(n, np.outer(v, np.conj(v)))


def apply(S: QuantumChannel, rho) -> np.ndarray:
    rho = np.asarray(rho)
    if rho.shape != (S.dim, S.dim):
        raise DimensionMismatch(f"input of shape {rho.shape} for a channel on dim {S.dim}")
    return np.einsum("ij,ikjl->kl", rho, S.tensor)


def compose(S1: QuantumChannel, S2: QuantumChannel) -> QuantumChannel:
    """``S1 o S2`` (apply ``S2`` first)."""
    if S1.dim != S2.dim:
        raise DimensionMismatch("channels act on different dimensions")
    return QuantumChannel.from_superoperator(S1.superoperator() @ S2.superoperator())


def convex_combine(channels, weights, tol: float = 1e-12) -> QuantumChannel:
    channels = list(channels)
    w = np.asarray(weights, dtype=float)
    if not channels or len(channels) != w.size:
        raise ThermalOpsError("need one weight per channel")
    if np.any(w < 0) or abs(w.sum() - 1.0) > tol:
        raise ThermalOpsError(f"weights must be nonnegative and sum to 1, got {w.tolist()}")
    n = channels[0].dim
    if any(S.dim != n for S in channels):
        raise DimensionMismatch("channels act on different dimensions")
    return QuantumChannel(n, sum(wi * S.choi for wi, S in zip(w, channels)))


@dataclass(frozen=True)
class CPTPReport:
    hermiticity: float
    min_eigenvalue: float
    tp_residual: float
    tol: float

    @property
    def cp(self) -> bool:
        return self.hermiticity <= self.tol and self.min_eigenvalue >= -self.tol

    @property
    def tp(self) -> bool:
        return self.tp_residual <= self.tol

    @property
    def passed(self) -> bool:
        return self.cp and self.tp


def check_cptp(S: QuantumChannel, tol: float = DEFAULT_TOL) -> CPTPReport:
    C = S.choi
    n = S.dim
    herm = linalg.hermiticity_residual(C)
    min_eig = float(np.linalg.eigvalsh(0.5 * (C + linalg.dagger(C)))[0])
    # trace preservation: tr S(|e_i><e_j|) = delta_ij
    tp = np.einsum("ikjk->ij", S.tensor)
    tp_res = float(np.max(np.abs(tp - np.eye(n))))
    return CPTPReport(herm, min_eig, tp_res, tol)


def require_cptp(S: QuantumChannel, tol: float = DEFAULT_TOL) -> QuantumChannel:
    rep = check_cptp(S, tol)
    if not rep.passed:
        raise InvalidChannelError(f"channel is not CPTP: {rep}")
    return S


def commutator(A, B) -> np.ndarray:
    return A @ B - B @ A


def stationarity_covariance(S: QuantumChannel, H: DiagonalHamiltonian,
                            beta: float) -> tuple[float, float]:
    """Residuals of the Gibbs fixed-point and ``[S, ad_H] = 0`` conditions.

    Returns ``(||S(g) - g||_1, max_X ||S([H, X]) - [H, S(X)]||_1)`` where the
    maximum runs over all matrix units ``X``.
    """
    if H.dim != S.dim:
        raise DimensionMismatch("Hamiltonian and channel dimensions differ")
    g = gibbs_state(H, beta)
    fix = linalg.trace_norm(apply(S, g) - g)
    Hm = H.matrix()
    n = S.dim
    cov = 0.0
    for i in range(n):
        for j in range(n):
            X = linalg.basis_projector(n, i, j)
            d = apply(S, commutator(Hm, X)) - commutator(Hm, apply(S, X))
            cov = max(cov, linalg.trace_norm(d))
    return fix, cov


def choi_distance(S1: QuantumChannel, S2: QuantumChannel) -> float:
    """Trace norm of the Choi difference divided by ``n``.

    A computable stand-in for the induced trace-norm distance, not equal to it.
    """
    if S1.dim != S2.dim:
        raise DimensionMismatch("channels act on different dimensions")
    return linalg.trace_norm(S1.choi - S2.choi) / S1.dim


def induced_norm_lower_bound(S1: QuantumChannel, S2: QuantumChannel, probes,
                             tol: float = DEFAULT_TOL) -> float:
    """``max_X ||S1(X) - S2(X)||_1`` over probes of unit trace norm.

    Any such value bounds ``||S1 - S2||_{1->1}`` from below.
    """
    if S1.dim != S2.dim:
        raise DimensionMismatch("channels act on different dimensions")
    best = 0.0
    for X in probes:
        X = np.asarray(X, dtype=complex)
        nx = linalg.trace_norm(X)
        if abs(nx - 1.0) > tol:
            raise ThermalOpsError(f"probe has trace norm {nx}, expected 1")
        best = max(best, linalg.trace_norm(apply(S1, X) - apply(S2, X)))
    return best
