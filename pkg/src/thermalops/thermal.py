"""Thermal operations: realisation, energy conservation and bath constructions.

A thermal operation is specified by a system Hamiltonian ``H_S`` (dim ``n``),
a bath Hamiltonian ``H_B`` (dim ``m``), an ``nm x nm`` unitary ``U`` acting on
``system (x) bath`` and an inverse temperature ``beta``. It realises the channel

    rho -> tr_B( U (rho (x) g_B) U* ),   g_B = exp(-beta H_B) / Z_B.

Bath matrices always refer to the expanded, ascending diagonal of ``H_B``.
Constructions that produce an unsorted bath (tensor sums) reorder it with a
permutation ``P`` and conjugate ``U`` by ``1 (x) P``, which leaves the channel
unchanged.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .channels import QuantumChannel, identity_channel
from .errors import (
    DimensionMismatch,
    EnergyConservationError,
    NotHermitianError,
    ThermalOpsError,
)
from .hamiltonians import (
    ENERGY_TOL,
    DiagonalHamiltonian,
    boltzmann_weights,
    check_beta,
    rational_bohr_constant,
    resonance_graph,
)

ENERGY_CONSERVATION_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class ThermalOpSpec:
    H_S: DiagonalHamiltonian
    H_B: DiagonalHamiltonian
    U: np.ndarray
    beta: float

    def __post_init__(self):
        U = linalg.as_matrix(self.U)
        N = self.H_S.dim * self.H_B.dim
        if U.shape != (N, N):
            raise DimensionMismatch(
                f"unitary of shape {U.shape} does not act on {self.H_S.dim}x{self.H_B.dim}"
            )
        U.setflags(write=False)
        object.__setattr__(self, "U", U)
        object.__setattr__(self, "beta", check_beta(self.beta))

    @property
    def n(self) -> int:
        return self.H_S.dim

    @property
    def m(self) -> int:
        return self.H_B.dim

    def free_energies(self) -> np.ndarray:
        """Diagonal of ``H_S (x) 1 + 1 (x) H_B``."""
        return (self.H_S.diagonal()[:, None] + self.H_B.diagonal()[None, :]).ravel()

    def to_json(self) -> dict:
        from .io import matrix_to_json

        return {
            "H_S": self.H_S.to_json(),
            "H_B": self.H_B.to_json(),
            "beta": self.beta,
            "U": matrix_to_json(self.U),
        }

    @classmethod
    def from_json(cls, obj) -> "ThermalOpSpec":
        from .io import matrix_from_json

        return cls(
            DiagonalHamiltonian.from_json(obj["H_S"]),
            DiagonalHamiltonian.from_json(obj["H_B"]),
            matrix_from_json(obj["U"]),
            float(obj["beta"]),
        )


def total_free_hamiltonian(H_S: DiagonalHamiltonian, H_B: DiagonalHamiltonian) -> np.ndarray:
    return (H_S.diagonal()[:, None] + H_B.diagonal()[None, :]).ravel()


def energy_residual(U, H_S: DiagonalHamiltonian, H_B: DiagonalHamiltonian,
                    epsilon: float = 0.0, tol: float = 1e-12) -> tuple[float, bool]:
    """Exact residual ``||U H0 U* - H0||_inf`` and the epsilon-relaxed verdict.

    ``H0 = H_S (x) 1 + 1 (x) H_B``. The relaxed condition accepts
    ``residual <= 2 eps ||U - 1||_inf (||H_S||_inf + ||H_B||_inf)``;
    ``tol`` absorbs rounding in that comparison.
    """
    U = linalg.as_matrix(U)
    h = total_free_hamiltonian(H_S, H_B)
    if U.shape != (h.size, h.size):
        raise DimensionMismatch(f"unitary of shape {U.shape} for total dimension {h.size}")
    H0 = np.diag(h)
    res = linalg.operator_norm(U @ H0 @ linalg.dagger(U) - H0)
    bound = 2 * epsilon * linalg.operator_norm(U - np.eye(h.size)) * (H_S.norm() + H_B.norm())
    return res, bool(res <= bound + tol)


def _conservation_defect(U: np.ndarray, h: np.ndarray) -> float:
    # ||U H0 U* - H0|| = ||U H0 - H0 U||; Frobenius bounds the operator norm from above
    C = U * (h[None, :] - h[:, None])
    return float(np.linalg.norm(C))


def check_spec(spec: ThermalOpSpec, tol: float = ENERGY_CONSERVATION_TOL,
               unitary_tol: float = linalg.DEFAULT_TOL) -> None:
    """Raise unless ``spec.U`` is unitary and energy conserving."""
    rep = linalg.validate(spec.U, "unitary", unitary_tol)
    if not rep.passed:
        raise ThermalOpsError(f"coupling matrix is not unitary: {rep.residuals}")
    h = spec.free_energies()
    defect = _conservation_defect(spec.U, h)
    if defect > tol:
        exact = linalg.operator_norm(spec.U * (h[None, :] - h[:, None]))
        if exact > tol:
            raise EnergyConservationError(
                f"energy-conservation residual {exact:.3e} exceeds {tol:.1e}"
            )


def realize(spec: ThermalOpSpec, tol: float = ENERGY_CONSERVATION_TOL,
            check: bool = True) -> QuantumChannel:
    """Choi matrix of ``rho -> tr_B(U (rho (x) g_B) U*)``.

    The channel is assembled from the Kraus operators
    ``K_ab = sqrt(p_b) (1 (x) <a|) U (1 (x) |b>)``.
    """
    if check:
        check_spec(spec, tol)
    n, m = spec.n, spec.m
    p = boltzmann_weights(spec.H_B, spec.beta)
    p = p / p.sum()
    U4 = spec.U.reshape(n, m, n, m)
    W = (U4 * np.sqrt(p)[None, None, None, :]).transpose(2, 0, 1, 3).reshape(n * n, m * m)
    return QuantumChannel(n, W @ linalg.dagger(W))


def realize_map(spec: ThermalOpSpec):
    """Direct (unchecked) action ``rho -> tr_B(U (rho (x) g_B) U*)`` as a callable."""
    from .hamiltonians import gibbs_state

    g = gibbs_state(spec.H_B, spec.beta)
    U = spec.U

    def S(rho):
        big = U @ np.kron(rho, g) @ linalg.dagger(U)
        return linalg.partial_trace(big, spec.n, spec.m, side="B")

    return S


def identity_spec(H_S: DiagonalHamiltonian, beta: float,
                  H_B: DiagonalHamiltonian | None = None) -> ThermalOpSpec:
    H_B = H_B or DiagonalHamiltonian((0.0,), (1,))
    return ThermalOpSpec(H_S, H_B, np.eye(H_S.dim * H_B.dim), beta)


def sort_bath(H_S: DiagonalHamiltonian, bath_diag, U, beta: float,
              tol: float = ENERGY_TOL) -> ThermalOpSpec:
    """Spec for an unsorted bath diagonal, reordered into ascending form."""
    bath_diag = np.asarray(bath_diag, dtype=float)
    n, m = H_S.dim, bath_diag.size
    perm = np.argsort(bath_diag, kind="stable")
    U4 = np.asarray(U).reshape(n, m, n, m)[:, perm][:, :, :, perm]
    H_B = DiagonalHamiltonian.from_energies(bath_diag[perm], tol)
    return ThermalOpSpec(H_S, H_B, U4.reshape(n * m, n * m), beta)


def _same_system(s1: ThermalOpSpec, s2: ThermalOpSpec, tol: float) -> None:
    a, b = s1.H_S.diagonal(), s2.H_S.diagonal()
    if a.size != b.size or np.max(np.abs(a - b)) > tol:
        raise ThermalOpsError("specs have different system Hamiltonians")
    if abs(s1.beta - s2.beta) > tol:
        raise ThermalOpsError("specs have different temperatures")


def compose_specs(s1: ThermalOpSpec, s2: ThermalOpSpec,
                  tol: float = ENERGY_TOL) -> ThermalOpSpec:
    """Single thermal operation realising ``realize(s1) o realize(s2)``.

    Uses the bath ``H_B1 (x) 1 + 1 (x) H_B2`` and the unitary
    ``(U1 (x) 1)(1 (x) F*)(U2 (x) 1)(1 (x) F)`` with the flip ``F`` of the two baths.
    """
    _same_system(s1, s2, tol)
    n, m1, m2 = s1.n, s1.m, s2.m
    F = linalg.flip_operator(m1, m2)
    In = np.eye(n)
    U = (
        np.kron(s1.U, np.eye(m2))
        @ np.kron(In, F.T)
        @ np.kron(s2.U, np.eye(m1))
        @ np.kron(In, F)
    )
    bath = (s1.H_B.diagonal()[:, None] + s2.H_B.diagonal()[None, :]).ravel()
    return sort_bath(s1.H_S, bath, U, s1.beta, tol)


def convex_combine_specs(s1: ThermalOpSpec, s2: ThermalOpSpec, k: int, d: int,
                         tol: float = ENERGY_TOL) -> ThermalOpSpec:
    """Thermal operation realising ``(k/d) realize(s1) + (1 - k/d) realize(s2)``.

    A ``d``-level register with trivial Hamiltonian selects between the two
    unitaries through a rank-``k`` projector onto its first ``k`` basis states.
    """
    if not (0 < k < d):
        raise ThermalOpsError(f"need 0 < k < d, got k={k}, d={d}")
    _same_system(s1, s2, tol)
    n, m1, m2 = s1.n, s1.m, s2.m
    Pi = np.diag([1.0] * k + [0.0] * (d - k))
    F = linalg.flip_operator(m1, m2)
    In, Id = np.eye(n), np.eye(d)
    first = linalg.kron_all(s1.U, np.eye(m2), Pi)
    second = (
        linalg.kron_all(In, F.T, Id)
        @ linalg.kron_all(s2.U, np.eye(m1), Id - Pi)
        @ linalg.kron_all(In, F, Id)
    )
    bath = (
        s1.H_B.diagonal()[:, None, None]
        + s2.H_B.diagonal()[None, :, None]
        + np.zeros(d)[None, None, :]
    ).ravel()
    return sort_bath(s1.H_S, bath, first + second, s1.beta, tol)


def decompose_nonresonant(spec: ThermalOpSpec, tol: float = ENERGY_TOL,
                          block_tol: float = ENERGY_CONSERVATION_TOL) -> list:
    """Split a thermal operation along the connected components of its resonance graph.

    Returns ``[(weight, spec_c), ...]`` with weights ``Z_c / Z`` (bath partition
    functions) such that ``sum weight * realize(spec_c) == realize(spec)``.
    Every component bath is resonant with respect to ``H_S``.
    """
    graph = resonance_graph(spec.H_B, spec.H_S, tol)
    if graph.is_resonant:
        return [(1.0, spec)]
    n, m = spec.n, spec.m
    level_of = np.repeat(np.arange(len(spec.H_B.levels)), spec.H_B.mult)
    w = boltzmann_weights(spec.H_B, spec.beta)
    Z = w.sum()
    out = []
    for comp in graph.components:
        in_comp = np.isin(level_of, comp)
        I = np.flatnonzero(in_comp)
        Ip = (np.arange(n)[:, None] * m + I[None, :]).ravel()
        rest = np.setdiff1d(np.arange(n * m), Ip)
        leak = np.max(np.abs(spec.U[np.ix_(Ip, rest)]), initial=0.0)
        if leak > block_tol:
            raise EnergyConservationError(
                f"unitary couples resonance components (leak {leak:.3e})"
            )
        H_c = DiagonalHamiltonian(
            tuple(spec.H_B.levels[v] for v in comp), tuple(spec.H_B.mult[v] for v in comp)
        )
        U_c = spec.U[np.ix_(Ip, Ip)]
        out.append((float(w[I].sum() / Z), ThermalOpSpec(spec.H_S, H_c, U_c, spec.beta)))
    return out


# -- embedding baths with gaps into full spin baths ---------------------------

def _grid_indices(H_B: DiagonalHamiltonian, gap: float, tol: float) -> np.ndarray:
    x = (np.array(H_B.levels) - H_B.levels[0]) / gap
    j = np.rint(x)
    if np.any(np.abs(x - j) * gap > tol):
        raise ThermalOpsError("bath levels are not on the grid E_min + j * gap")
    return j.astype(int)


@dataclass(frozen=True, eq=False)
class SpinEmbedding:
    spec: ThermalOpSpec
    generator: np.ndarray = field(repr=False)
    alpha: int
    missing_levels: tuple


def _embed_blocks(X4: np.ndarray, alpha: int, n_missing: int, fill: float) -> np.ndarray:
    """``(+)_alpha X_ij (+) fill * delta_ij 1`` for every system block ``X_ij``."""
    n, M = X4.shape[0], X4.shape[1]
    Mp = alpha * M + n_missing
    out = np.zeros((n, Mp, n, Mp), dtype=complex)
    for c in range(alpha):
        s = slice(c * M, (c + 1) * M)
        out[:, s, :, s] = X4
    if n_missing and fill:
        t = np.arange(alpha * M, Mp)
        for i in range(n):
            out[i, t, i, t] = fill
    return out


def spin_embed(H_S: DiagonalHamiltonian, H_B: DiagonalHamiltonian, H_tot, alpha: int,
               beta: float, gap: float | None = None, tol: float = ENERGY_TOL,
               comm_tol: float = ENERGY_CONSERVATION_TOL) -> SpinEmbedding:
    """Replace a spin bath with missing levels by ``alpha`` copies plus one of each gap level.

    ``H_tot`` is the Hermitian generator on ``system (x) bath`` commuting with
    ``H_S (x) 1 + 1 (x) H_B``. The returned spec uses the sorted bath
    ``tau((+)_alpha H_B (+) diag(missing)) tau^-1`` and the unitary
    ``exp(i H'_tot)``, where ``H'_tot`` repeats each system block of ``H_tot``
    ``alpha`` times and pads the missing levels with zeros.
    """
    if alpha < 1:
        raise ThermalOpsError("alpha must be a positive integer")
    H_tot = linalg.as_matrix(H_tot)
    n, M = H_S.dim, H_B.dim
    if H_tot.shape != (n * M, n * M):
        raise DimensionMismatch(f"generator of shape {H_tot.shape} for {n}x{M}")
    if linalg.hermiticity_residual(H_tot) > comm_tol:
        raise NotHermitianError("generator is not Hermitian")
    h = total_free_hamiltonian(H_S, H_B)
    comm = float(np.max(np.abs(H_tot * (h[None, :] - h[:, None])), initial=0.0))
    if comm > comm_tol:
        raise EnergyConservationError(f"generator does not commute with H0 (residual {comm:.3e})")
    if gap is None:
        gap = rational_bohr_constant(H_S, tol)
        if gap is None:
            raise ThermalOpsError("system is not of spin form; pass gap explicitly")
    j = _grid_indices(H_B, gap, tol)
    missing = sorted(set(range(int(j[-1]) + 1)) - set(int(x) for x in j))
    missing_levels = tuple(H_B.levels[0] + k * gap for k in missing)

    new_diag = np.concatenate([np.tile(H_B.diagonal(), alpha), np.array(missing_levels)])
    perm = np.argsort(new_diag, kind="stable")
    Mp = new_diag.size

    def permuted(X4):
        return X4[:, perm][:, :, :, perm].reshape(n * Mp, n * Mp)

    gen = permuted(_embed_blocks(H_tot.reshape(n, M, n, M), alpha, len(missing), 0.0))
    U_small = linalg.unitary_from_generator(H_tot, tol=comm_tol)
    # exp of a block-repeated generator is the block-repeated exponential
    U = permuted(_embed_blocks(U_small.reshape(n, M, n, M), alpha, len(missing), 1.0))
    H_Bp = DiagonalHamiltonian.from_energies(new_diag[perm], tol)
    spec = ThermalOpSpec(H_S, H_Bp, U, beta)
    return SpinEmbedding(spec, gen, alpha, missing_levels)


def spin_embed_closed_form(original: ThermalOpSpec, missing_levels, alpha: int) -> QuantumChannel:
    """``(alpha Z_B S + Z_J id) / (alpha Z_B + Z_J)`` for the embedded bath.

    ``Z_B`` is the partition function of the original bath and ``Z_J`` that of
    the padded levels, both relative to the ground level of the original bath.
    """
    S = realize(original)
    e0 = original.H_B.levels[0]
    Z_B = float(boltzmann_weights(original.H_B, original.beta).sum())
    Z_J = float(sum(np.exp(-original.beta * (e - e0)) for e in missing_levels))
    C = (alpha * Z_B * S.choi + Z_J * identity_channel(original.n).choi) / (alpha * Z_B + Z_J)
    return QuantumChannel(original.n, C)


# -- qubit spin-block thermal operations ---------------------------------------

@dataclass(frozen=True, eq=False)
class SpinBlockSpec:
    """Block data of an energy-conserving unitary for a qubit and a spin bath.

    ``alphas[j]`` is the multiplicity of bath level ``j * gap``
    (``j = 0..m-1``). ``blocks[j-1]`` is the unitary ``U_j`` of size
    ``alphas[j] + alphas[j-1]`` mixing ``|e_1, j>`` with ``|e_2, j-1>``; its
    top-left ``alphas[j]`` square is ``A_j``, bottom-right is ``D_j``.
    """

    gap: float
    alphas: tuple
    U0: np.ndarray
    blocks: tuple
    Um: np.ndarray

    def __post_init__(self):
        a = tuple(int(x) for x in self.alphas)
        if not a or any(x < 1 for x in a):
            raise ThermalOpsError("multiplicities must be positive")
        if self.gap <= 0:
            raise ThermalOpsError("gap must be positive")
        U0 = linalg.as_matrix(self.U0)
        Um = linalg.as_matrix(self.Um)
        blocks = tuple(linalg.as_matrix(B) for B in self.blocks)
        if U0.shape != (a[0], a[0]) or Um.shape != (a[-1], a[-1]):
            raise DimensionMismatch("U0 / Um sizes do not match the end multiplicities")
        if len(blocks) != len(a) - 1:
            raise DimensionMismatch(f"need {len(a) - 1} middle blocks, got {len(blocks)}")
        for j, B in enumerate(blocks, start=1):
            s = a[j] + a[j - 1]
            if B.shape != (s, s):
                raise DimensionMismatch(f"block U_{j} has shape {B.shape}, expected {(s, s)}")
        object.__setattr__(self, "alphas", a)
        object.__setattr__(self, "U0", U0)
        object.__setattr__(self, "Um", Um)
        object.__setattr__(self, "blocks", blocks)

    @property
    def m(self) -> int:
        return len(self.alphas)

    def A(self, j: int) -> np.ndarray:
        return self.blocks[j - 1][: self.alphas[j], : self.alphas[j]]

    def B(self, j: int) -> np.ndarray:
        return self.blocks[j - 1][: self.alphas[j], self.alphas[j]:]

    def D(self, j: int) -> np.ndarray:
        return self.blocks[j - 1][self.alphas[j]:, self.alphas[j]:]


def qubit_hamiltonian(gap: float = 1.0) -> DiagonalHamiltonian:
    return DiagonalHamiltonian((0.0, float(gap)), (1, 1))


def assemble_spin_blocks(blocks: SpinBlockSpec, beta: float) -> ThermalOpSpec:
    a = blocks.alphas
    N = sum(a)
    off = np.concatenate([[0], np.cumsum(a)])
    U = np.zeros((2 * N, 2 * N), dtype=complex)
    U[: a[0], : a[0]] = blocks.U0
    for j in range(1, blocks.m):
        e1 = np.arange(off[j], off[j + 1])              # |e_1> (x) level j
        e2 = N + np.arange(off[j - 1], off[j])          # |e_2> (x) level j-1
        idx = np.concatenate([e1, e2])
        U[np.ix_(idx, idx)] = blocks.blocks[j - 1]
    last = N + np.arange(off[-2], off[-1])
    U[np.ix_(last, last)] = blocks.Um
    H_B = DiagonalHamiltonian.spin(blocks.gap, a)
    return ThermalOpSpec(qubit_hamiltonian(blocks.gap), H_B, U, beta)


def spin_block_choi(blocks: SpinBlockSpec, beta: float,
                    unitary_tol: float = linalg.DEFAULT_TOL):
    """Closed-form ``(lambda, c)`` of the spin-block thermal operation plus its spec.

    ``lambda = sum_j tr(B_{j+1} B_{j+1}*) q^j / Z`` and
    ``c = sum_j tr(X_j Y_j*) q^j / Z`` with ``X = (U0, A_1..A_{m-1})``,
    ``Y = (D_1..D_{m-1}, Um)``, ``q = exp(-beta gap)``, ``Z = sum_j alpha_j q^j``.
    """
    for name, M in [("U0", blocks.U0), ("Um", blocks.Um)] + [
        (f"U_{j}", B) for j, B in enumerate(blocks.blocks, start=1)
    ]:
        if not linalg.is_unitary(M, unitary_tol):
            raise ThermalOpsError(f"block {name} is not unitary")
    beta = check_beta(beta)
    q = np.exp(-beta * blocks.gap)
    m = blocks.m
    qj = q ** np.arange(m)
    Z = float(np.dot(blocks.alphas, qj))
    lam = sum(np.vdot(blocks.B(j + 1), blocks.B(j + 1)).real * qj[j] for j in range(m - 1)) / Z
    X = [blocks.U0] + [blocks.A(j) for j in range(1, m)]
    Y = [blocks.D(j) for j in range(1, m)] + [blocks.Um]
    c = sum(np.trace(Xj @ linalg.dagger(Yj)) * qj[j] for j, (Xj, Yj) in enumerate(zip(X, Y))) / Z
    return float(lam), complex(c), assemble_spin_blocks(blocks, beta)


# -- random energy-conserving instances ----------------------------------------

def _energy_blocks(h: np.ndarray, tol: float) -> list:
    order = np.argsort(h, kind="stable")
    blocks, start = [], 0
    for k in range(1, h.size + 1):
        if k == h.size or h[order[k]] - h[order[k - 1]] > tol:
            blocks.append(np.sort(order[start:k]))
            start = k
    return blocks


def random_conserving_generator(H_S: DiagonalHamiltonian, H_B: DiagonalHamiltonian,
                                rng: np.random.Generator, tol: float = ENERGY_TOL) -> np.ndarray:
    """Random Hermitian matrix that is block diagonal in the total energy."""
    h = total_free_hamiltonian(H_S, H_B)
    H = np.zeros((h.size, h.size), dtype=complex)
    for idx in _energy_blocks(h, tol):
        H[np.ix_(idx, idx)] = linalg.random_hermitian(idx.size, rng)
    return H


def random_conserving_unitary(H_S: DiagonalHamiltonian, H_B: DiagonalHamiltonian,
                              rng: np.random.Generator, tol: float = ENERGY_TOL) -> np.ndarray:
    """Haar-random unitary on every eigenspace of ``H_S (x) 1 + 1 (x) H_B``."""
    h = total_free_hamiltonian(H_S, H_B)
    U = np.zeros((h.size, h.size), dtype=complex)
    for idx in _energy_blocks(h, tol):
        U[np.ix_(idx, idx)] = linalg.random_unitary(idx.size, rng)
    return U


def random_spec(H_S: DiagonalHamiltonian, H_B: DiagonalHamiltonian, beta: float,
                rng: np.random.Generator) -> ThermalOpSpec:
    return ThermalOpSpec(H_S, H_B, random_conserving_unitary(H_S, H_B, rng), beta)
