"""
Tests for the cross-Kerr parity-check devices
"""
import pytest

from hyperent.models import BellLabel, HyperBellLabel
from hyperent.optics import ProbeOutcome, xkerr_parity_pol, xkerr_parity_spatial, xkerr_spatial_analyzer
from hyperent.optics.kerr import ProbeClass, is_even
from hyperent.protocols.states import make_hyper_bell
from hyperent.state import PureState, photon, register


@pytest.mark.parametrize("label", HyperBellLabel.all(), ids=str)
def test_parity_devices_read_bell_parity(label):
    state = make_hyper_bell(label)
    (pol,) = xkerr_parity_pol(state, "A", "B")
    (spat,) = xkerr_parity_spatial(state, "A", "B")
    assert pol.probability == pytest.approx(1.0)
    assert is_even(pol, "P-QND(A,B)") == (label.pol in (BellLabel.PHI_PLUS, BellLabel.PHI_MINUS))
    assert is_even(spat, "S-QND(A,B)") == (label.spat in (BellLabel.PHI_PLUS, BellLabel.PHI_MINUS))


def test_parity_check_leaves_state_in_place():
    state = make_hyper_bell(HyperBellLabel(pol=BellLabel.PSI_MINUS, spat=BellLabel.PHI_PLUS))
    (branch,) = xkerr_parity_pol(state, "A", "B")
    assert branch.outcome == ("P-QND(A,B)=unshifted",)
    assert branch.state.layout == state.layout


@pytest.mark.parametrize("levels, phase_class", [
    (("a1", "b1"), ProbeClass.THETA_13),
    (("a2", "b2"), ProbeClass.THETA_24),
    (("a1", "b2"), ProbeClass.THETA_14),
    (("a2", "b1"), ProbeClass.THETA_23),
])
def test_spatial_analyzer_resolves_basis_states(levels, phase_class):
    layout = register(photon("A") + photon("B"))
    state = PureState.basis_state(layout, ["H", levels[0], "V", levels[1]])
    (branch,) = xkerr_spatial_analyzer(state, "A", "B")
    assert ProbeOutcome.parse(branch.outcome[0]) == ProbeOutcome(device="S-QND2(A,B)", phase_class=phase_class)
    assert branch.probability == pytest.approx(1.0)


def test_analyzer_on_superposition_sums_to_one():
    layout = register(photon("A") + photon("B"))
    state = PureState.from_amplitudes(layout, range(1, 17), normalize=True)
    branches = xkerr_spatial_analyzer(state, "A", "B")
    assert len(branches) == 4
    assert sum(b.probability for b in branches) == pytest.approx(1.0)
