"""Numerical probes: discontinuity bounds, Gibbs-state distances, set distances, convergence."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .channels import QuantumChannel, apply, choi_distance
from .errors import ThermalOpsError
from .hamiltonians import DiagonalHamiltonian, check_beta
from .qubit import (
    beta_from_q,
    check_q,
    extreme_approx_finite,
    extreme_approx_infinite,
    psi,
    SemigroupElement,
)
from .thermal import ThermalOpSpec, random_conserving_generator, realize, spin_embed


def _jsonable(v):
    if isinstance(v, (complex, np.complexfloating)):
        return [float(v.real), float(v.imag)]
    if isinstance(v, (np.floating, np.integer, np.bool_)):
        return v.item()
    if isinstance(v, np.ndarray):
        return [_jsonable(x) for x in v.tolist()]
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    return v


@dataclass
class ExperimentReport:
    name: str
    parameters: dict
    values: dict
    verdict: bool
    header: tuple = ()
    rows: list = field(default_factory=list)

    def to_json(self) -> dict:
        out = {
            "name": self.name,
            "parameters": _jsonable(self.parameters),
            "values": _jsonable(self.values),
            "pass": bool(self.verdict),
        }
        if self.header:
            out["table"] = {"header": list(self.header), "rows": _jsonable(self.rows)}
        return out


# -- degenerate system Hamiltonians --------------------------------------------

def _mixing_unitary() -> np.ndarray:
    return np.array(
        [[1, 0, 1, 0], [0, 1, 0, -1], [1, 0, -1, 0], [0, 1, 0, 1]], dtype=complex
    ) / np.sqrt(2)


def discontinuity_qubit_spec() -> ThermalOpSpec:
    """Trivial qubit Hamiltonian and trivial two-level bath with a Hadamard-like coupling."""
    H0 = DiagonalHamiltonian((0.0,), (2,))
    return ThermalOpSpec(H0, H0, _mixing_unitary(), 1.0)


def discontinuity_qubit(q: float) -> ExperimentReport:
    """Lower bound on how far degenerate-qubit thermal operations sit from non-degenerate ones.

    The channel below maps ``|e1><e1|`` to ``[[1, 1], [1, 1]] / 2`` while every
    thermal operation for ``diag(0, eps)`` maps it to ``diag(1 - lam q, lam q)``.
    Their difference is ``[[l, 1/2], [1/2, -l]]`` with ``l = lam q - 1/2`` and has
    trace norm ``sqrt(4 l^2 + 1) >= 1``.
    """
    q = check_q(q)
    S = realize(discontinuity_qubit_spec())
    out = apply(S, linalg.basis_projector(2, 0))
    # minimiser over real l is l = 0; evaluate the norm on the realised output there
    bound = linalg.trace_norm(out - 0.5 * np.eye(2))
    lam_lo, lam_hi = -0.5, q - 0.5
    l_star = min(max(0.0, lam_lo), lam_hi)
    constrained = math.sqrt(4 * l_star**2 + 1)
    return ExperimentReport(
        "discontinuity-qubit",
        {"q": q},
        {
            "bound": bound,
            "argmin_lambda_prime": 0.0,
            "constrained_bound": constrained,
            "constrained_argmin_lambda": (l_star + 0.5) / q,
            "image_of_e1e1": out,
        },
        bound >= 1.0 - 1e-12,
    )


# rows of the qutrit permutation: row i has its single 1 in column QUTRIT_COLS[i]
QUTRIT_COLS = (0, 3, 4, 1, 6, 7, 2, 5, 8)


def qutrit_permutation() -> np.ndarray:
    U = np.zeros((9, 9))
    U[np.arange(9), QUTRIT_COLS] = 1.0
    return U


def discontinuity_qutrit_spec(q: float) -> ThermalOpSpec:
    H = DiagonalHamiltonian((0.0, 1.0, 2.0), (1, 1, 1))
    return ThermalOpSpec(H, H, qutrit_permutation(), beta_from_q(q))


def qutrit_expected_channel(q: float) -> QuantumChannel:
    """The qutrit action written out entry by entry."""
    Z = 1.0 + q + q * q

    def f(A):
        out = np.zeros((3, 3), dtype=complex)
        out[0, 0] = A[0, 0] + A[1, 1] * (1 + q)
        out[0, 1] = A[1, 2] * (1 + q)
        out[1, 0] = A[2, 1] * (1 + q)
        out[1, 1] = A[0, 0] * q + A[2, 2] * (1 + q)
        out[2, 2] = (A[0, 0] + A[1, 1] + A[2, 2]) * q * q
        return out / Z

    return QuantumChannel.from_map(f, 3)


def discontinuity_qutrit(q: float) -> ExperimentReport:
    """Lower bound for ``diag(0, 1, 2)``, whose Bohr spectrum is degenerate.

    The realised channel sends ``|e2><e3|`` to ``a |e1><e2|`` with
    ``a = (1 + q)/(1 + q + q^2)``. After lifting the degeneracy a thermal
    operation can only map it to ``gamma |e2><e3|`` with ``|gamma| <= 1``, and
    ``||a |e1><e2| - gamma |e2><e3|||_1 = a + |gamma| >= a``.
    """
    q = check_q(q)
    S = realize(discontinuity_qutrit_spec(q))
    out = apply(S, linalg.basis_projector(3, 1, 2))
    numeric = linalg.trace_norm(out)          # gamma = 0 minimises a + |gamma|
    closed = 1.0 - q * q / (1.0 + q + q * q)
    action_err = float(np.max(np.abs(S.choi - qutrit_expected_channel(q).choi)))
    return ExperimentReport(
        "discontinuity-qutrit",
        {"q": q},
        {
            "bound": closed,
            "bound_numeric": numeric,
            "coefficient": (1.0 + q) / (1.0 + q + q * q),
            "action_max_error": action_err,
        },
        closed >= 2.0 / 3.0 - 1e-12 and abs(numeric - closed) <= 1e-12,
    )


# -- distances between Gibbs states --------------------------------------------

def gibbs_distance(levels, mult, beta1: float, beta2: float) -> float:
    """``||g_beta1 - g_beta2||_1`` for a diagonal Hamiltonian given by levels and multiplicities.

    Works on the distinct levels only, so multiplicities may be astronomically large.
    """
    L = np.asarray(levels, dtype=float)
    M = np.asarray(mult, dtype=float)
    beta1, beta2 = check_beta(beta1), check_beta(beta2)
    if beta1 == beta2:
        return 0.0

    def probs(b):
        logw = np.log(M) - b * (L - L.min())
        w = np.exp(logw - logw.max())
        return w / w.sum()

    # each level block contributes mult * |p - p'| with p per basis vector
    return float(np.sum(np.abs(probs(beta1) - probs(beta2))))


def probe_multiplicity(E: float, beta: float, beta_prime: float) -> float:
    return math.floor(math.exp(E * (beta + beta_prime) / 2.0))


def cmap_gap_bound(E: float, beta: float, beta_prime: float) -> float:
    b, bp = max(beta, beta_prime), min(beta, beta_prime)
    x = math.exp(E * (b - bp) / 2.0)
    return 2.0 * (1.0 / (1.0 + x - math.exp(-E * bp)) + 1.0 / (x + 1.0))


def cmap_probe(beta: float, beta_prime: float, E_grid,
               max_multiplicity: float = 1e15) -> ExperimentReport:
    """Gibbs states at two temperatures on ``0 (+) E * 1_N`` with ``N = floor(e^{E(beta+beta')/2})``.

    The gap ``2 - ||g_beta - g_beta'||_1`` shrinks to zero as ``E`` grows, so
    the two Gibbs states become perfectly distinguishable. ``N`` is capped at
    ``max_multiplicity``; the cap keeps ``N`` an exactly representable float.
    """
    beta, beta_prime = float(beta), float(beta_prime)
    if beta <= 0 or beta_prime <= 0:
        raise ThermalOpsError("both inverse temperatures must be positive")
    if beta == beta_prime:
        raise ThermalOpsError("the probe needs two different temperatures")
    rows = []
    for E in E_grid:
        E = float(E)
        N = probe_multiplicity(E, beta, beta_prime)
        capped = N > max_multiplicity
        N = min(N, max_multiplicity)
        if N < 1:
            raise ThermalOpsError(f"empty excited block at E = {E}")
        d = gibbs_distance([0.0, E], [1, N], beta, beta_prime)
        gap = 2.0 - d
        rows.append((E, float(N), capped, d, gap, cmap_gap_bound(E, beta, beta_prime)))
    gaps = [r[4] for r in rows]
    decreasing = all(b < a for a, b in zip(gaps, gaps[1:]))
    positive = all(g > 0 for g in gaps)
    bound_ok = all(r[4] <= r[5] + 1e-12 for r in rows)
    return ExperimentReport(
        "cmap",
        {"beta": beta, "beta_prime": beta_prime, "E_grid": [r[0] for r in rows],
         "max_multiplicity": max_multiplicity},
        {"gaps": gaps, "final_gap": gaps[-1] if gaps else None,
         "strictly_decreasing": decreasing, "upper_bound_holds": bound_ok,
         "any_capped": any(r[2] for r in rows)},
        decreasing and positive and bound_ok,
        ("E", "multiplicity", "capped", "distance", "gap", "gap_upper_bound"),
        rows,
    )


# -- set distances and classical thermo-majorization ---------------------------

def hausdorff_surrogate(setA, setB) -> float:
    """Hausdorff distance between finite channel sets measured with :func:`choi_distance`.

    This is a surrogate: the Choi trace distance is not the induced trace norm.
    """
    A, B = list(setA), list(setB)
    if not A or not B:
        raise ThermalOpsError("both channel sets must be non-empty")
    D = np.array([[choi_distance(a, b) for b in B] for a in A])
    return float(max(D.min(axis=1).max(), D.min(axis=0).max()))


def _check_distribution(p, name):
    p = np.asarray(p, dtype=float).ravel()
    if p.size == 0 or np.any(p < 0) or abs(p.sum() - 1.0) > 1e-9:
        raise ThermalOpsError(f"{name} must be a probability vector")
    return p


def thermo_majorization_check(x, y, d, tol: float = 1e-12) -> bool:
    """Whether ``y`` can be mapped to ``x`` by a matrix fixing the Gibbs weights ``d``.

    Checks ``||x - (y_i/d_i) d||_1 <= ||y - (y_i/d_i) d||_1`` for every ``i``.
    """
    x = _check_distribution(x, "x")
    y = _check_distribution(y, "y")
    d = np.asarray(d, dtype=float).ravel()
    if d.size != x.size or y.size != x.size:
        raise ThermalOpsError("x, y and d must have the same length")
    if np.any(d <= 0):
        raise ThermalOpsError("Gibbs weights must be positive")
    for i in range(x.size):
        ref = (y[i] / d[i]) * d
        if np.abs(x - ref).sum() > np.abs(y - ref).sum() + tol:
            return False
    return True


# -- convergence studies --------------------------------------------------------

def convergence_study(kind: str, params: dict, schedule) -> ExperimentReport:
    """Approximation error along a schedule for one of three limiting constructions.

    ``infT_extreme``: ``params = {lam, phi}``, schedule of ``m``; target ``(lam, (1-lam) e^{i phi})``.
    ``finiteT_extreme``: ``params = {lam, mu, q}``, schedule of ``m``; target the ``m -> infinity`` formula.
    ``spin_embed``: ``params = {q, seed}``, schedule of ``alpha``; qubit with bath ``diag(0, 2)``,
    error is the Choi distance to the channel of the original bath.
    """
    schedule = [int(s) for s in schedule]
    rows = []
    if kind == "infT_extreme":
        lam, phi = float(params["lam"]), float(params.get("phi", 0.0))
        target = SemigroupElement(lam, (1 - lam) * complex(math.cos(phi), math.sin(phi)))
        for m in schedule:
            spec, _ = extreme_approx_infinite(lam, phi, m)
            e = psi(realize(spec))
            rows.append((m, e.distance(target), e.distance(target) * m))
        header = ("m", "error", "m_times_error")
    elif kind == "finiteT_extreme":
        lam, q = float(params["lam"]), float(params["q"])
        mu = params["mu"]
        for m in schedule:
            res = extreme_approx_finite(lam, mu, m, q, dim_cap=int(params.get("dim_cap", 4096)))
            rows.append((m, res.psi.distance(res.limit), res.spec.n * res.spec.m))
        header = ("m", "error", "total_dim")
    elif kind == "spin_embed":
        q = float(params.get("q", 0.5))
        rng = np.random.default_rng(int(params.get("seed", 0)))
        H_S = DiagonalHamiltonian((0.0, 1.0), (1, 1))
        H_B = DiagonalHamiltonian((0.0, 2.0), (1, 1))
        beta = beta_from_q(q)
        H_tot = random_conserving_generator(H_S, H_B, rng)
        original = realize(ThermalOpSpec(H_S, H_B, linalg.unitary_from_generator(H_tot), beta))
        for a in schedule:
            emb = spin_embed(H_S, H_B, H_tot, a, beta)
            rows.append((a, choi_distance(realize(emb.spec), original), emb.spec.m))
        header = ("alpha", "error", "bath_dim")
    else:
        raise ThermalOpsError(f"unknown convergence study {kind!r}")
    errs = [r[1] for r in rows]
    monotone = all(b <= a + 1e-12 for a, b in zip(errs, errs[1:]))
    return ExperimentReport(
        f"converge-{kind}",
        {"kind": kind, "params": dict(params), "schedule": schedule},
        {"errors": errs, "monotone": monotone},
        monotone,
        header,
        rows,
    )
