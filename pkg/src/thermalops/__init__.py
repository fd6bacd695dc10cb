"""Thermal operations on finite-dimensional quantum systems.

Submodules: ``linalg`` (matrix kernel), ``hamiltonians`` (spectra, Gibbs
states, resonance), ``channels`` (Choi-matrix channels), ``thermal``
(bath constructions), ``qubit`` (two-level theory), ``experiments``
(numerical probes) and ``cli``.
"""

from .channels import QuantumChannel, check_cptp, choi_distance, compose, convex_combine
from .errors import (
    DimensionCapExceeded,
    DimensionMismatch,
    EnergyConservationError,
    InfeasibleParameters,
    InvalidChannelError,
    NotHermitianError,
    ThermalOpsError,
)
from .hamiltonians import DiagonalHamiltonian, bohr_spectrum, gibbs_state, resonance_graph
from .qubit import Membership, QubitParams, SemigroupElement, circ, membership, psi, psi_inv
from .thermal import ThermalOpSpec, compose_specs, convex_combine_specs, realize

__version__ = "0.1.0"
