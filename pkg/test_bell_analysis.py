"""
Tests for hyper-Bell analysis, hyper-teleportation and swapping
"""
import numpy as np
import pytest
from hypothesis import example, given, settings
from hypothesis import strategies as st

from hyperent.exceptions import ParameterError, StateError
from hyperent.models import BellLabel, HyperBellLabel, PartialHyperParams
from hyperent.protocols import hbsa, make_hyper_bell, swap, teleport
from hyperent.protocols.states import classify_hyper_bell, make_hyper_ghz
from hyperent.state import PureState, fidelity, photon, register

PHI_PHI = HyperBellLabel(pol=BellLabel.PHI_PLUS, spat=BellLabel.PHI_PLUS)


@pytest.mark.parametrize("label", HyperBellLabel.all(), ids=str)
def test_hbsa_identifies_all_sixteen_states(label):
    found, report = hbsa(make_hyper_bell(label))
    assert found == label
    assert report.success
    assert len(report.branches) == 1
    assert report.branches[0].probability == pytest.approx(1.0)
    assert report.details["label"] == str(label)


def test_hbsa_on_product_state_is_ambiguous():
    layout = register(photon("A") + photon("B"))
    found, report = hbsa(PureState.basis_state(layout, ["H", "a1", "H", "b1"]))
    assert found is None
    assert not report.success
    assert sum(report.details["labels"].values()) == pytest.approx(1.0)
    assert len(report.details["labels"]) == 4


def test_classify_hyper_bell():
    label = HyperBellLabel(pol=BellLabel.PSI_MINUS, spat=BellLabel.PHI_MINUS)
    assert classify_hyper_bell(make_hyper_bell(label)) == label
    layout = register(photon("A") + photon("B"))
    assert classify_hyper_bell(PureState.basis_state(layout, ["H", "a1", "V", "b2"])) is None


angle = st.floats(min_value=0.0, max_value=2 * np.pi, allow_nan=False)


@settings(max_examples=100)
@given(angle, angle)
@example(0.0, np.pi / 2)
@example(np.arccos(0.6), np.arccos(0.8))
def test_teleport_every_branch_has_fidelity_one(theta, phi):
    params = PartialHyperParams(alpha=np.cos(theta), beta=np.sin(theta), gamma=np.cos(phi), delta=np.sin(phi))
    report = teleport(params)
    assert report.success
    assert len(report.branches) == 16
    assert all(b.probability == pytest.approx(1 / 16) for b in report.branches)
    assert report.details["fidelity"] == pytest.approx(1.0)
    assert report.details["min_branch_fidelity"] == pytest.approx(1.0)


def test_teleport_with_degraded_channel_reports_it():
    params = PartialHyperParams(alpha=0.6, beta=0.8, gamma=0.8, delta=0.6)
    layout = register(photon("B") + photon("C"))
    channel = PureState.basis_state(layout, ["H", "b1", "H", "c1"])
    report = teleport(params, channel)
    assert not report.success
    assert report.details["degraded"]
    assert report.details["min_branch_fidelity"] < 1.0


def test_teleport_rejects_channel_on_wrong_carriers():
    params = PartialHyperParams(alpha=0.6, beta=0.8, gamma=0.8, delta=0.6)
    with pytest.raises(StateError):
        teleport(params, make_hyper_bell(PHI_PHI, ("C", "D")))


def test_swap_entangles_outer_photons():
    report = swap()
    assert report.success
    assert len(report.branches) == 16
    assert report.details["fidelity"] == pytest.approx(1.0)
    assert set(report.corrections) >= {"sigmaZ_pol(A)", "sigmaX_spatial(A)"}


def test_hyper_ghz_state():
    two = make_hyper_ghz(["A", "B"])
    assert fidelity(two, make_hyper_bell(HyperBellLabel(pol=BellLabel.PHI_PLUS, spat=BellLabel.PHI_PLUS))) == pytest.approx(1.0)

    three = make_hyper_ghz(["A", "B", "C"])
    assert three.amplitudes.size == 64
    assert np.count_nonzero(np.abs(three.amplitudes) > 1e-12) == 4

    with pytest.raises(ParameterError):
        make_hyper_ghz(["A"])
