import cmath
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

import oracles
from thermalops import channels as ch
from thermalops import linalg
from thermalops import qubit as qb
from thermalops.errors import DimensionCapExceeded, DimensionMismatch, InfeasibleParameters, ThermalOpsError
from thermalops.hamiltonians import DiagonalHamiltonian
from thermalops.thermal import realize

QS = st.floats(0.01, 1.0)
LAMS = st.floats(0.0, 1.0)
PHIS = st.floats(-math.pi, math.pi)


@st.composite
def params(draw, q=None):
    q = draw(QS) if q is None else q
    lam = draw(LAMS)
    t = draw(st.floats(0.0, 1.0))
    return qb.QubitParams(lam, t * qb.enTO_bound(lam, q), draw(PHIS), q)


def coords(spec):
    return qb.psi(realize(spec))


# -- coordinates ------------------------------------------------------------------

def test_psi_examples():
    e = qb.psi(ch.identity_channel(2))
    assert (e.lam, e.c) == (0.0, 1.0)
    e = qb.psi(ch.full_dephasing_channel(2))
    assert (e.lam, e.c) == (0.0, 0.0)
    S = ch.QuantumChannel(2, qb.canonical_choi(0.3, 0.5 * cmath.exp(1j * math.pi / 4), 0.4))
    e = qb.psi(S)
    assert e.lam == 0.3 and e.c == 0.5 * cmath.exp(1j * math.pi / 4)
    with pytest.raises(DimensionMismatch):
        qb.psi(ch.identity_channel(3))


@given(params())
def test_psi_inverts_psi_inv(p):
    S = qb.psi_inv(p)
    assert ch.check_cptp(S, 1e-9).passed
    e = qb.psi(S)
    assert e.lam == p.lam and e.c == p.c
    fix, cov = ch.stationarity_covariance(S, DiagonalHamiltonian((0.0, 1.0), (1, 1)),
                                          qb.beta_from_q(p.q))
    assert fix <= 1e-9 and cov <= 1e-9


def test_psi_inv_examples():
    assert np.array_equal(qb.psi_inv(qb.QubitParams(0.0, 1.0, 0.0, 0.3)).choi,
                          ch.identity_channel(2).choi)
    q = 0.3
    S = qb.psi_inv(qb.QubitParams(1.0, 0.0, 0.0, q))
    A = np.array([[0.6, 0.1], [0.1, 0.4]])
    assert np.allclose(S(A), np.diag([(1 - q) * 0.6 + 0.4, q * 0.6]))
    S = qb.psi_inv(qb.QubitParams(0.5, math.sqrt(0.45), 0.0, 0.2))
    assert abs(np.linalg.eigvalsh(S.choi)[0]) <= 1e-12
    with pytest.raises(InfeasibleParameters):
        qb.psi_inv(qb.QubitParams(0.5, 0.7, 0.0, 0.2))
    with pytest.raises(ThermalOpsError):
        qb.QubitParams(1.2, 0.0, 0.0, 0.2)
    with pytest.raises(ThermalOpsError):
        qb.QubitParams(0.2, 0.0, 0.0, 0.0)


# -- semigroup --------------------------------------------------------------------

def test_circ_examples():
    e = qb.SemigroupElement(0.5, 0.5)
    out = qb.circ(e, e, 0.2)
    assert out.lam == pytest.approx(0.7, abs=1e-15) and out.c == 0.25
    one = qb.SemigroupElement(0.0, 1.0)
    x = qb.SemigroupElement(0.37, 0.2 - 0.1j)
    assert qb.circ(one, x, 0.6) == x


def test_inverse_examples():
    inv = qb.inverse_element(qb.SemigroupElement(0.5, 0.5), 0.2)
    assert inv.lam == pytest.approx(-1.25, abs=1e-15) and inv.c == 2.0
    back = qb.circ(qb.SemigroupElement(0.5, 0.5), inv, 0.2)
    assert abs(back.lam) <= 1e-12 and abs(back.c - 1) <= 1e-12
    assert qb.inverse_element(qb.SemigroupElement(0.0, 1.0), 0.3) == qb.SemigroupElement(0.0, 1.0)
    assert qb.inverse_element(qb.SemigroupElement(1 / 1.2, 0.5), 0.2) is None
    assert qb.inverse_element(qb.SemigroupElement(0.2, 0.0), 0.2) is None


elements = st.builds(lambda l, re, im: qb.SemigroupElement(l, complex(re, im)),
                     st.floats(-2, 2), st.floats(-2, 2), st.floats(-2, 2))


@given(elements, elements, elements, QS)
def test_circ_commutative_and_associative(a, b, c, q):
    assert qb.circ(a, b, q).distance(qb.circ(b, a, q)) <= 1e-12
    assert qb.circ(qb.circ(a, b, q), c, q).distance(qb.circ(a, qb.circ(b, c, q), q)) <= 1e-12


@given(st.floats(-3, 3), st.floats(-3, 3), QS)
def test_circ_is_multiplicative_after_affine_change(x, y, q):
    a = 1 + q
    z = qb.circ(qb.SemigroupElement(x, 1), qb.SemigroupElement(y, 1), q).lam
    assert (1 - a * x) * (1 - a * y) == pytest.approx(1 - a * z, abs=1e-12)


@given(st.data(), QS)
def test_psi_is_a_homomorphism(data, q):
    p1, p2 = data.draw(params(q)), data.draw(params(q))
    S = ch.compose(qb.psi_inv(p1), qb.psi_inv(p2))
    assert qb.psi(S).distance(qb.circ(p1.element(), p2.element(), q)) <= 1e-9
    # cross-check against the explicit action on matrix units
    lam, c = oracles.compose_qubit_choi(p1.lam, p1.c, p2.lam, p2.c, q)
    assert abs(qb.psi(S).lam - lam) <= 1e-12 and abs(qb.psi(S).c - c) <= 1e-12


# -- membership ------------------------------------------------------------------------

def test_membership_examples():
    M = qb.Membership
    assert qb.membership(qb.QubitParams(0.0, 1.0, 1.3, 0.2)) is M.DEPHASING_TO
    assert qb.membership(qb.QubitParams(0.5, math.sqrt(0.45), 0.0, 0.2)) is M.ENTO_BOUNDARY_NOT_TO
    assert qb.membership(qb.QubitParams(0.5, 0.9 * math.sqrt(0.45), 0.0, 0.2)) is M.INTERIOR_TO
    assert qb.membership(qb.QubitParams(0.5, 0.7, 0.0, 0.2)) is M.OUTSIDE_ENTO
    assert qb.membership(qb.QubitParams(1.0, 0.0, 0.0, 0.2)) is M.ENTO_BOUNDARY_NOT_TO


@given(params())
def test_interior_points_are_thermal_channels(p):
    if qb.membership(p) is qb.Membership.INTERIOR_TO:
        fix, cov = ch.stationarity_covariance(qb.psi_inv(p), DiagonalHamiltonian((0.0, 1.0), (1, 1)),
                                              qb.beta_from_q(p.q))
        assert fix <= 1e-9 and cov <= 1e-9


# -- explicit families ---------------------------------------------------------------------

def test_infinite_family_example_frozen():
    spec, cf = qb.extreme_approx_infinite(0.5, 0.0, 4)
    e = coords(spec)
    # loop-oracle value of the realised channel
    assert e.lam == pytest.approx(0.3750000000000001, abs=1e-12)
    assert e.c == pytest.approx(0.6035533905932738, abs=1e-12)
    assert cf.lam == 0.375
    assert cf.c == pytest.approx(0.5 + math.sqrt(0.5) * (2 - 2 * math.sqrt(0.5)) / 4, abs=1e-15)


@given(LAMS, PHIS, st.integers(2, 12))
def test_infinite_family_closed_form(lam, phi, m):
    spec, cf = qb.extreme_approx_infinite(lam, phi, m)
    assert coords(spec).distance(cf) <= 1e-10
    assert spec.beta == 0.0


@given(LAMS, PHIS, st.integers(2, 12))
def test_infinite_family_is_inside_unit_temperature_disk(lam, phi, m):
    _, cf = qb.extreme_approx_infinite(lam, phi, m)
    assert cf.r <= qb.enTO_bound(cf.lam, 1.0) + 1e-12


def test_interior_family_frozen_value():
    spec, cf = qb.interior_family(0.5, 0.3, 6, 0.2)
    lam, c = 0.4997204496526818, 0.6409456288220047 + 0.1982677170234806j
    assert abs(cf.lam - lam) <= 1e-12 and abs(cf.c - c) <= 1e-12
    assert coords(spec).distance(cf) <= 1e-10


@given(LAMS, PHIS, st.integers(2, 10), st.floats(0.05, 0.95))
def test_interior_family_closed_form(lam, phi, m, q):
    spec, cf = qb.interior_family(lam, phi, m, q)
    e = coords(spec)
    assert e.distance(cf) <= 1e-10
    assert e.r <= qb.enTO_bound(e.lam, q) + 1e-9


@pytest.mark.parametrize("q", [0.2, 0.5, 0.9])
@pytest.mark.parametrize("m", [2, 3, 7])
def test_interior_family_end_points(q, m):
    _, cf = qb.interior_family(1.0, 0.4, m, q)
    assert cf.lam == pytest.approx((1 - q ** (m - 1)) / (1 - q**m), abs=1e-14) and cf.c == 0
    _, cf = qb.interior_family(0.0, 0.4, m, q)
    assert cf.distance(qb.SemigroupElement(0.0, cmath.exp(0.4j))) <= 1e-14


def test_interior_family_dispatches_at_infinite_temperature():
    spec, cf = qb.interior_family(0.3, 0.1, 4, 1.0)
    assert cf == qb.infinite_closed_form(0.3, 0.1, 4)


def test_finite_family_frozen_value():
    res = qb.extreme_approx_finite(0.5, 2, 3, 0.2)
    assert res.alphas == (1, 2, 4)
    assert res.psi.lam == pytest.approx(0.0854700854700855, abs=1e-12)
    assert res.psi.c == pytest.approx(0.9435374095162234, abs=1e-12)


def test_finite_family_lambda_zero_is_identity():
    res = qb.extreme_approx_finite(0.0, (3, 2), 3, 0.5)
    assert res.alphas == (4, 6, 9)
    assert res.psi.distance(qb.SemigroupElement(0.0, 1.0)) <= 1e-12


def test_finite_family_rational_multiplicities():
    res = qb.extreme_approx_finite(0.4, "3/2", 4, 0.5)
    assert res.alphas == (8, 12, 18, 27)
    assert res.psi.r <= qb.enTO_bound(res.psi.lam, 0.5) + 1e-9


def test_finite_limit_approaches_boundary():
    lim = qb.finite_limit(0.5, 4.9, 0.2)
    assert abs(lim.lam - 0.5) < 0.05 and abs(lim.c - math.sqrt(0.45)) < 0.05
    lim = qb.finite_limit(0.5, 4.9999, 0.2)
    assert lim.distance(qb.SemigroupElement(0.5, math.sqrt(0.45))) < 1e-3


def test_finite_family_errors():
    with pytest.raises(ThermalOpsError):
        qb.extreme_approx_finite(0.5, 6, 3, 0.2)
    with pytest.raises(ThermalOpsError):
        qb.extreme_approx_finite(0.5, 1, 3, 0.2)
    with pytest.raises(ThermalOpsError):
        qb.extreme_approx_finite(0.5, 2, 3, 1.0)
    with pytest.raises(ThermalOpsError):
        qb.extreme_approx_finite(0.5, 2, 1, 0.2)
    with pytest.raises(DimensionCapExceeded) as err:
        qb.extreme_approx_finite(0.5, 2, 12, 0.2)
    assert err.value.requested == 2 * (2**12 - 1)


# -- dephasing ----------------------------------------------------------------------

def test_dephasing_from_phases_examples():
    spec, c, r = qb.dephasing_from_phases([0.0, 0.0, 0.0], 0.4)
    assert c == 1.0
    spec, c, r = qb.dephasing_from_phases([0.0, math.pi], 0.2)
    assert c == pytest.approx(2 / 3, abs=1e-15) and r == pytest.approx(2 / 3, abs=1e-15)
    assert coords(spec).distance(qb.SemigroupElement(0.0, c)) <= 1e-12


@given(st.lists(PHIS, min_size=1, max_size=8), QS)
def test_phase_dephasing_stays_in_annulus(phases, q):
    spec, c, r = qb.dephasing_from_phases(phases, q)
    e = coords(spec)
    assert e.lam == pytest.approx(0.0, abs=1e-15)
    assert abs(e.c - c) <= 1e-12
    assert max(r, 0.0) - 1e-12 <= abs(c) <= 1 + 1e-12


@pytest.mark.parametrize("q", [0.1, 0.3, 0.5, 0.8, 1.0])
@pytest.mark.parametrize("m", [1, 2, 5])
def test_alternating_phases_reach_inner_radius(q, m):
    phases = [0.0] + [math.pi] * (m - 1)
    _, c, r = qb.dephasing_from_phases(phases, q)
    assert c.real == pytest.approx(r, abs=1e-12)


def test_annulus_limit():
    for q in (0.2, 0.5, 0.7):
        assert qb.annulus_radius(200, q) == pytest.approx(1 - 2 * q, abs=1e-12)
    assert qb.annulus_radius(4, 1.0) == -0.5


@pytest.mark.parametrize("gamma", [1.0, 0.0, 0.5j, -0.3 + 0.4j])
def test_dephasing_spec(gamma):
    e = coords(qb.dephasing_spec(gamma, q=0.3))
    assert e.lam == 0.0
    assert abs(e.c - np.conj(gamma)) <= 1e-12
    with pytest.raises(InfeasibleParameters):
        qb.dephasing_spec(1.5)


@pytest.mark.parametrize("n", [2, 3, 5])
def test_full_dephasing_nd(n, rng):
    S = realize(qb.full_dephasing_nd(n))
    assert np.max(np.abs(S.choi - ch.full_dephasing_channel(n).choi)) <= 1e-10
    d = rng.random(n)
    assert np.max(np.abs(S(np.diag(d)) - np.diag(d))) <= 1e-12
    if n == 3:
        assert np.max(np.abs(S(linalg.basis_projector(3, 0, 1)))) <= 1e-12


def test_full_dephasing_any_system_energies():
    S = realize(qb.full_dephasing_nd(3, DiagonalHamiltonian((0.0, 0.3, 5.0), (1, 1, 1)), 2.0))
    assert np.max(np.abs(S.choi - ch.full_dephasing_channel(3).choi)) <= 1e-10


# -- thermal cones --------------------------------------------------------------------

def test_cone_of_gibbs_state_collapses():
    q = 0.45
    g = [0.0, 0.0, (1 - q) / (1 + q)]
    cone = qb.thermal_cone(g, q, (6, 5, 8))
    assert np.max(np.abs(cone.points - np.array(g))) <= 1e-15


def test_cone_contains_gibbs_and_input():
    q = 0.45
    v = 0.9 * np.array([0.5, 0.4, math.sqrt(0.59)])
    cone = qb.thermal_cone(v, q, (10, 10, 12))
    assert cone.contains(cone.gibbs) and cone.contains(v)
    assert cone.gibbs[2] == pytest.approx(0.3793103448275862, abs=1e-15)
    assert np.max(np.linalg.norm(cone.points, axis=1)) <= 1 + 1e-9


@given(params(), st.floats(-1, 1), st.floats(-1, 1), st.floats(-1, 1))
def test_bloch_action_matches_channel_application(p, x, y, z):
    v = np.array([x, y, z])
    if np.linalg.norm(v) > 1:
        v = v / np.linalg.norm(v)
    fast = qb.act_on_bloch(p.lam, p.c, v, p.q)
    assert np.allclose(fast, qb.apply_params(p, v), atol=1e-12)
    assert np.linalg.norm(fast) <= 1 + 1e-9


def test_cone_boundary_z_end_points():
    q, z = 0.3, 0.2
    cone = qb.thermal_cone([0.1, 0.0, z], q, (5, 3, 4))
    assert cone.boundary[0, 2] == pytest.approx(z, abs=1e-15)
    assert cone.boundary[-1, 2] == pytest.approx((1 - q) + z * (1 - (1 + q)), abs=1e-15)


def test_cone_rejects_bad_input():
    with pytest.raises(ThermalOpsError):
        qb.thermal_cone([1.0, 1.0, 0.0], 0.5)
    with pytest.raises(ThermalOpsError):
        qb.thermal_cone([0.1, 0.0, 0.0], 0.5, (1, 4, 4))
