import json
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from thermalops import channels as ch
from thermalops import experiments as ex
from thermalops import linalg
from thermalops.errors import ThermalOpsError
from thermalops.thermal import realize

QS = st.floats(0.01, 1.0)


def prob_vectors(n):
    return st.lists(st.floats(0.01, 1.0), min_size=n, max_size=n).map(
        lambda v: np.array(v) / sum(v))


# -- degenerate qubit --------------------------------------------------------------

@pytest.mark.parametrize("q", [0.05, 0.3, 0.7, 1.0])
def test_discontinuity_qubit(q):
    rep = ex.discontinuity_qubit(q)
    assert rep.verdict
    assert rep.values["bound"] == pytest.approx(1.0, abs=1e-12)
    assert np.max(np.abs(rep.values["image_of_e1e1"] - 0.5)) <= 1e-15
    assert rep.values["constrained_bound"] >= 1.0
    json.dumps(rep.to_json())


def test_discontinuity_qubit_channel_is_thermal_for_trivial_hamiltonian():
    S = realize(ex.discontinuity_qubit_spec())
    assert ch.check_cptp(S, 1e-12).passed
    assert np.allclose(S(np.eye(2) / 2), np.eye(2) / 2)


# -- degenerate qutrit -----------------------------------------------------------

@pytest.mark.parametrize("q", [0.1, 0.5, 0.9, 1.0])
def test_discontinuity_qutrit(q):
    rep = ex.discontinuity_qutrit(q)
    assert rep.verdict
    assert rep.values["action_max_error"] <= 1e-12
    assert rep.values["bound"] == pytest.approx((1 + q) / (1 + q + q * q), abs=1e-14)


def test_qutrit_permutation_is_a_permutation():
    U = ex.qutrit_permutation()
    assert np.array_equal(U @ U.T, np.eye(9))
    assert sorted(ex.QUTRIT_COLS) == list(range(9))


@given(QS, QS)
def test_qutrit_bound_decreases_in_q(q1, q2):
    b1 = ex.discontinuity_qutrit(q1).values["bound"]
    b2 = ex.discontinuity_qutrit(q2).values["bound"]
    assert min(b1, b2) >= 2 / 3 - 1e-12
    if q1 < q2:
        assert b1 >= b2 - 1e-12


# -- Gibbs states at two temperatures ---------------------------------------------

def test_gibbs_distance_small_case_matches_dense():
    levels, mult = [0.0, 1.5], [1, 3]
    H = np.diag([0.0, 1.5, 1.5, 1.5])

    def g(b):
        w = np.exp(-b * np.diag(H))
        return np.diag(w / w.sum())

    dense = linalg.trace_norm(g(0.4) - g(1.3))
    assert ex.gibbs_distance(levels, mult, 0.4, 1.3) == pytest.approx(dense, abs=1e-14)
    assert ex.gibbs_distance(levels, mult, 0.4, 0.4) == 0.0


def test_cmap_probe_gaps():
    rep = ex.cmap_probe(1.0, 0.5, [2, 4, 8, 16, 32])
    v = rep.values
    assert rep.verdict and v["strictly_decreasing"] and v["upper_bound_holds"]
    assert v["final_gap"] < 0.01
    assert not v["any_capped"]
    assert rep.rows[-1][1] == math.floor(math.exp(24.0))


def test_cmap_probe_cap_is_reported():
    rep = ex.cmap_probe(1.0, 0.5, [8, 16], max_multiplicity=1e3)
    assert rep.values["any_capped"]
    assert rep.rows[-1][1] == 1e3


def test_cmap_probe_rejects_bad_temperatures():
    with pytest.raises(ThermalOpsError):
        ex.cmap_probe(1.0, 1.0, [2])
    with pytest.raises(ThermalOpsError):
        ex.cmap_probe(-1.0, 1.0, [2])


# -- set distances ------------------------------------------------------------------

def test_hausdorff_examples():
    I, D = ch.identity_channel(2), ch.full_dephasing_channel(2)
    assert ex.hausdorff_surrogate([I], [I]) == 0.0
    d = ex.hausdorff_surrogate([I], [D])
    assert d == pytest.approx(ch.choi_distance(I, D), abs=1e-15) and d > 0
    assert ex.hausdorff_surrogate([I, D], [I]) == pytest.approx(d, abs=1e-15)
    with pytest.raises(ThermalOpsError):
        ex.hausdorff_surrogate([], [I])


def test_hausdorff_is_symmetric_and_monotone_under_union():
    I, D = ch.identity_channel(2), ch.full_dephasing_channel(2)
    R = ch.QuantumChannel.from_map(lambda A: np.trace(A) * np.diag([0.8, 0.2]), 2)
    a = ex.hausdorff_surrogate([I], [D, R])
    assert a == pytest.approx(ex.hausdorff_surrogate([D, R], [I]), abs=1e-15)
    assert ex.hausdorff_surrogate([I, D, R], [D, R]) <= ex.hausdorff_surrogate([I, D, R], [D]) + 1e-15


# -- classical thermo-majorization ----------------------------------------------

def test_thermo_majorization_examples():
    d = np.array([0.6, 0.3, 0.1])
    assert ex.thermo_majorization_check(d, [1.0, 0.0, 0.0], d)
    assert not ex.thermo_majorization_check([1.0, 0.0, 0.0], d, d)
    uniform = np.ones(3) / 3
    assert ex.thermo_majorization_check(uniform, [0.0, 0.0, 1.0], uniform)
    with pytest.raises(ThermalOpsError):
        ex.thermo_majorization_check([0.5, 0.6], [0.5, 0.5], [0.5, 0.5])
    with pytest.raises(ThermalOpsError):
        ex.thermo_majorization_check([0.5, 0.5], [0.5, 0.5], [0.5, 0.0])


@given(prob_vectors(4), prob_vectors(4))
def test_thermo_majorization_reflexive_and_gibbs_fixed(y, d):
    assert ex.thermo_majorization_check(y, y, d)
    assert ex.thermo_majorization_check(d, y, d)


# -- convergence studies -----------------------------------------------------------

def test_convergence_infinite_temperature():
    rep = ex.convergence_study("infT_extreme", {"lam": 0.5, "phi": 0.0}, [2, 4, 8, 16])
    assert rep.verdict
    scaled = [r[2] for r in rep.rows]
    assert max(scaled) - min(scaled) <= 1e-9


def test_convergence_finite_temperature():
    rep = ex.convergence_study("finiteT_extreme", {"lam": 0.5, "mu": 2, "q": 0.2}, [3, 4, 5, 6])
    assert rep.verdict
    assert rep.values["errors"][-1] < rep.values["errors"][0] / 5


def test_convergence_spin_embedding():
    rep = ex.convergence_study("spin_embed", {"q": 0.5, "seed": 3}, [5, 10, 20, 40])
    assert rep.verdict
    assert rep.values["errors"][-1] < rep.values["errors"][0]


def test_convergence_unknown_kind():
    with pytest.raises(ThermalOpsError):
        ex.convergence_study("nope", {}, [1])


def test_report_json_round_trip():
    rep = ex.cmap_probe(1.0, 0.5, [2, 4])
    out = json.loads(json.dumps(rep.to_json()))
    assert out["pass"] is True
    assert out["table"]["header"][0] == "E"
    assert len(out["table"]["rows"]) == 2
