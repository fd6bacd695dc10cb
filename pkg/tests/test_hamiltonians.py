import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from thermalops import hamiltonians as hm
from thermalops.errors import ThermalOpsError

DH = hm.DiagonalHamiltonian


def test_from_energies_groups_and_sorts():
    H = DH.from_energies([2.0, 0.0, 2.0 + 1e-12, 1.0])
    assert H.levels == (0.0, 1.0, 2.0)
    assert H.mult == (1, 1, 2)
    assert H.dim == 4


def test_invalid_hamiltonians():
    with pytest.raises(ThermalOpsError):
        DH((1.0, 0.0), (1, 1))
    with pytest.raises(ThermalOpsError):
        DH((0.0,), (0,))
    with pytest.raises(ThermalOpsError):
        DH((math.inf,), (1,))


def test_spin_hamiltonian_skips_zero_multiplicities():
    H = DH.spin(1.5, [2, 0, 1])
    assert H.levels == (0.0, 3.0)
    assert H.mult == (2, 1)


def test_json_round_trip():
    H = DH((0.0, 0.1, 7.25), (1, 3, 2))
    assert DH.from_json(H.to_json()) == H


def test_bohr_spectrum_examples():
    b = hm.bohr_spectrum(DH((0, 2, 5), (1, 1, 1)))
    assert b.abs_values == (0.0, 2.0, 3.0, 5.0)
    assert not b.degenerate
    assert hm.bohr_spectrum(DH((0, 1, 2), (1, 1, 1))).degenerate
    assert hm.bohr_spectrum(DH((3.0,), (2,))).degenerate
    assert not hm.bohr_spectrum(DH((0, 1), (1, 1))).degenerate


@given(st.lists(st.floats(-10, 10), min_size=1, max_size=5))
def test_bohr_spectrum_symmetric(energies):
    b = hm.bohr_spectrum(DH.from_energies(energies, 1e-6), 1e-6)
    vals = np.array(b.values)
    assert np.allclose(np.sort(-vals), vals, atol=1e-6)
    assert sum(b.multiplicities) == len(energies) ** 2


def test_resonance_graph_examples():
    HS = DH((0, 2, 5), (1, 1, 1))
    assert hm.resonance_graph(DH((0, 1, 3, 8), (1,) * 4), HS).is_resonant
    g = hm.resonance_graph(DH((0, 2, 6, 8), (1,) * 4), HS)
    assert not g.is_resonant
    assert [[g.vertices[v] for v in c] for c in g.components] == [[0.0, 2.0], [6.0, 8.0]]
    assert hm.resonance_graph(DH((4.0,), (3,)), HS).is_resonant


def test_gibbs_state_examples():
    H = DH((0, 1), (1, 1))
    beta = -math.log(0.2)
    assert np.allclose(hm.gibbs_state(H, beta), np.diag([5 / 6, 1 / 6]), atol=1e-15)
    assert np.allclose(hm.gibbs_state(H, 0.0), np.eye(2) / 2)
    assert np.allclose(hm.gibbs_state(DH((2.0,), (3,)), 5.0), np.eye(3) / 3)
    with pytest.raises(ThermalOpsError):
        hm.gibbs_state(H, -1.0)


@given(st.lists(st.floats(-5, 5), min_size=1, max_size=6), st.floats(0, 3),
       st.floats(-4, 4), st.floats(0.25, 4))
def test_gibbs_state_shift_and_scale(energies, beta, mu, lam):
    H = DH.from_energies(energies, 1e-6)
    g = hm.gibbs_state(H, beta)
    assert np.isclose(np.trace(g).real, 1.0, atol=1e-12)
    assert np.all(np.diag(g).real > 0)
    # shifts are absorbed exactly by the ground-level offset
    assert np.allclose(hm.gibbs_state(H.shifted(mu), beta), g, atol=1e-12)
    assert np.allclose(hm.gibbs_state(H.scaled(lam), beta / lam), g, atol=1e-12)


def test_rational_bohr_constant_examples():
    assert hm.rational_bohr_constant(DH((0, 2, 5), (1, 1, 1))) == pytest.approx(1.0, abs=1e-12)
    assert hm.rational_bohr_constant(DH((0, 1, math.sqrt(2)), (1, 1, 1))) is None
    assert hm.rational_bohr_constant(DH((0, 0.5, 1.5), (1, 1, 1))) == pytest.approx(0.5, abs=1e-12)
    assert hm.rational_bohr_constant(DH((0.0,), (4,))) is None


@given(st.lists(st.integers(1, 40), min_size=1, max_size=5, unique=True), st.floats(0.01, 10))
def test_rational_bohr_constant_recovers_gcd(ks, r):
    H = DH.from_energies([0.0] + [k * r for k in ks])
    g = hm.rational_bohr_constant(H)
    assert g is not None
    assert g == pytest.approx(math.gcd(*ks) * r, rel=1e-9)


def test_spin_form():
    assert hm.is_spin_form(DH((0, 2, 3), (1, 1, 1)), 1.0)
    assert not hm.is_spin_form(DH((0, 2, 3), (1, 1, 1)), 2.0)


def test_mixing_allowed_examples():
    HS = DH((0, 1, 2), (1, 1, 1))
    HB = DH((0, 1), (1, 1))
    assert hm.mixing_allowed(HS, HB, (0, 1), (1, 2))
    assert not hm.mixing_allowed(HS, HB, (0, 1), (0, 2))
    assert hm.mixing_allowed(HS, HB, (0, 2), (0, 2))
    with pytest.raises(IndexError):
        hm.mixing_allowed(HS, HB, (0, 3), (0, 0))
