"""Dense complex matrix kernel.

All matrices are plain ``numpy`` arrays of dtype ``complex128`` (or real
arrays that are promoted on demand). Bipartite spaces are ordered
``A (x) B`` with the usual Kronecker convention, i.e. the basis vector
``e_i (x) e_j`` sits at index ``i * dimB + j``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, NotHermitianError

DEFAULT_TOL = 1e-9


def as_matrix(M) -> np.ndarray:
    M = np.asarray(M, dtype=complex)
    if M.ndim != 2:
        raise DimensionMismatch(f"expected a 2-d array, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ValueError("matrix has non-finite entries")
    return M


def _require_square(M: np.ndarray) -> int:
    if M.shape[0] != M.shape[1]:
        raise DimensionMismatch(f"matrix must be square, got {M.shape}")
    return M.shape[0]


def dagger(M: np.ndarray) -> np.ndarray:
    return np.conj(M).T


def kron(A, B) -> np.ndarray:
    return np.kron(np.asarray(A), np.asarray(B))


def kron_all(*factors) -> np.ndarray:
    out = np.ones((1, 1))
    for f in factors:
        out = np.kron(out, np.asarray(f))
    return out


def basis_projector(n: int, i: int, j: int | None = None) -> np.ndarray:
    """Matrix unit ``|e_i><e_j|`` (``j`` defaults to ``i``)."""
    E = np.zeros((n, n), dtype=complex)
    E[i, i if j is None else j] = 1.0
    return E


def partial_trace(M, dimA: int, dimB: int, side: str = "B") -> np.ndarray:
    """Trace out one factor of a bipartite operator on ``C^dimA (x) C^dimB``.

    ``side="B"`` returns ``tr_B(M)`` (a ``dimA x dimA`` matrix), ``side="A"``
    returns ``tr_A(M)``.
    """
    if dimA < 1 or dimB < 1:
        raise DimensionMismatch("factor dimensions must be positive")
    M = np.asarray(M)
    if M.shape != (dimA * dimB, dimA * dimB):
        raise DimensionMismatch(
            f"operator of shape {M.shape} does not live on {dimA}x{dimB}"
        )
    T = M.reshape(dimA, dimB, dimA, dimB)
    if side == "B":
        return np.einsum("ibjb->ij", T)
    if side == "A":
        return np.einsum("aiaj->ij", T)
    raise ValueError(f"side must be 'A' or 'B', got {side!r}")


def flip_operator(m1: int, m2: int) -> np.ndarray:
    """The flip ``F: C^m1 (x) C^m2 -> C^m2 (x) C^m1`` with ``F(x (x) y) = y (x) x``."""
    if m1 < 1 or m2 < 1:
        raise DimensionMismatch("flip dimensions must be positive")
    F = np.zeros((m1 * m2, m1 * m2))
    i, j = np.meshgrid(np.arange(m1), np.arange(m2), indexing="ij")
    F[(j * m1 + i).ravel(), (i * m2 + j).ravel()] = 1.0
    return F


def hermiticity_residual(M: np.ndarray) -> float:
    return float(np.max(np.abs(M - dagger(M)), initial=0.0))


def herm_eig(H, tol: float = DEFAULT_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition ``H = V diag(w) V*`` with ``w`` ascending."""
    H = as_matrix(H)
    _require_square(H)
    res = hermiticity_residual(H)
    if res > tol * max(1.0, float(np.max(np.abs(H), initial=0.0))):
        raise NotHermitianError(f"matrix is not Hermitian (residual {res:.3e})")
    w, V = np.linalg.eigh(0.5 * (H + dagger(H)))
    return w, V


def unitary_from_generator(H, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Return ``exp(iH)`` for Hermitian ``H``."""
    w, V = herm_eig(H, tol)
    return (V * np.exp(1j * w)) @ dagger(V)


def singular_values(M) -> np.ndarray:
    return np.linalg.svd(np.asarray(M, dtype=complex), compute_uv=False)


def trace_norm(M) -> float:
    """Schatten 1-norm: the sum of singular values."""
    return float(np.sum(singular_values(M)))


def operator_norm(M) -> float:
    """Largest singular value."""
    M = np.asarray(M)
    if M.size == 0:
        return 0.0
    return float(singular_values(M)[0])


@dataclass(frozen=True)
class ValidationReport:
    kind: str
    residuals: dict
    tol: float
    passed: bool


def validate(M, kind: str, tol: float = DEFAULT_TOL) -> ValidationReport:
    """Check a square matrix for one of ``hermitian``, ``unitary``, ``psd``, ``density``.

    The report carries the numeric residuals so callers can see how far from
    the predicate a failing matrix is.
    """
    M = as_matrix(M)
    n = _require_square(M)
    herm = hermiticity_residual(M)
    if kind == "hermitian":
        res = {"hermiticity": herm}
        ok = herm <= tol
    elif kind == "unitary":
        unit = float(np.max(np.abs(M @ dagger(M) - np.eye(n)), initial=0.0))
        res = {"unitarity": unit}
        ok = unit <= tol
    elif kind in ("psd", "density"):
        min_eig = float(np.linalg.eigvalsh(0.5 * (M + dagger(M)))[0]) if n else 0.0
        res = {"hermiticity": herm, "min_eigenvalue": min_eig}
        ok = herm <= tol and min_eig >= -tol
        if kind == "density":
            tr_res = abs(complex(np.trace(M)) - 1.0)
            res["trace"] = tr_res
            ok = ok and tr_res <= tol
    else:
        raise ValueError(f"unknown validation kind {kind!r}")
    return ValidationReport(kind=kind, residuals=res, tol=tol, passed=bool(ok))


def is_unitary(U, tol: float = DEFAULT_TOL) -> bool:
    return validate(U, "unitary", tol).passed


def random_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary via QR of a complex Ginibre matrix."""
    Z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    Q, R = np.linalg.qr(Z)
    d = np.diagonal(R)
    return Q * (d / np.abs(d))


def random_hermitian(n: int, rng: np.random.Generator) -> np.ndarray:
    Z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return 0.5 * (Z + dagger(Z))


def random_density(n: int, rng: np.random.Generator) -> np.ndarray:
    Z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    rho = Z @ dagger(Z)
    return rho / np.trace(rho)
