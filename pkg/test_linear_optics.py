"""
Tests for linear-optical elements, parity filters and detector banks
"""
import numpy as np
import pytest

from hyperent.exceptions import StateError
from hyperent.models import BellLabel, DofKind, HyperBellLabel
from hyperent.optics import (
    ElementKind,
    apply_local,
    bs_hom_parity,
    detect,
    element,
    hadamard_pol,
    pbs_parity_check,
    pockels,
    ubs_split,
    unbalanced_interferometer,
)
from hyperent.protocols.states import make_hyper_bell
from hyperent.state import PureState, equal_up_to_phase, photon, register

PHI_PHI = HyperBellLabel(pol=BellLabel.PHI_PLUS, spat=BellLabel.PHI_PLUS)


@pytest.mark.parametrize("kind", [k for k in ElementKind if k not in (ElementKind.UBS, ElementKind.R_THETA)])
def test_fixed_elements_are_unitary(kind):
    matrix = element(kind).matrix
    assert np.allclose(matrix.conj().T @ matrix, np.eye(matrix.shape[1]))


def test_parameterized_elements():
    rotation = element(ElementKind.R_THETA, np.pi / 3).matrix
    assert np.allclose(rotation, [[0.5, -np.sqrt(3) / 2], [np.sqrt(3) / 2, 0.5]])
    assert element(ElementKind.UBS, 0.6).matrix.shape == (3, 2)
    with pytest.raises(StateError):
        element(ElementKind.UBS, 1.5)
    with pytest.raises(StateError):
        element(ElementKind.R_THETA)


def test_hadamard_is_an_involution():
    state = PureState.basis_state(register(photon("A")), ["V", "a2"])
    assert equal_up_to_phase(hadamard_pol(hadamard_pol(state, "A"), "A"), state)


def test_missing_subsystem_is_rejected():
    state = PureState.basis_state(register(photon("A", DofKind.TIMEBIN)), ["H", "S"])
    with pytest.raises(StateError):
        apply_local(state, "A", element(ElementKind.SIGMA_X_SPATIAL))
    with pytest.raises(StateError):
        apply_local(state, "B", element(ElementKind.SIGMA_X_POL))


def test_ubs_splits_second_port():
    state = PureState.basis_state(register(photon("A")), ["H", "a2"])
    split = ubs_split(state, "A", 0.6)
    spatial = ("A", DofKind.SPATIAL)
    assert split.layout.label(*spatial).levels == ("a1", "a2", "a3")
    assert split.amplitude({("A", DofKind.POLARIZATION): "H", spatial: "a2"}) == pytest.approx(0.6)
    assert split.amplitude({("A", DofKind.POLARIZATION): "H", spatial: "a3"}) == pytest.approx(0.8)
    with pytest.raises(StateError):
        ubs_split(split, "A", 0.5)


def test_pockels_flips_polarization_in_one_bin():
    layout = register(photon("A", DofKind.TIMEBIN))
    early = PureState.basis_state(layout, ["H", "S"])
    late = PureState.basis_state(layout, ["H", "L"])
    assert equal_up_to_phase(pockels(early, "A", "S"), PureState.basis_state(layout, ["V", "S"]))
    assert equal_up_to_phase(pockels(late, "A", "S"), late)
    with pytest.raises(StateError):
        pockels(early, "A", "M")


def _click_distribution(branches):
    table = {}
    for branch in branches:
        table[branch.key] = table.get(branch.key, 0.0) + branch.probability
    return table


def test_unbalanced_interferometer_arrival_classes():
    state = PureState.basis_state(register(photon("A", DofKind.TIMEBIN)), ["H", "S"])
    spread = unbalanced_interferometer(state, "A")
    assert _click_distribution(detect(spread, "A", (DofKind.POLARIZATION, DofKind.ARRIVAL))) == pytest.approx(
        {"A:H,early": 0.5, "A:H,middle": 0.5}
    )
    with pytest.raises(StateError):
        unbalanced_interferometer(spread, "A")


def test_resolved_middle_ports_split_the_middle_class():
    state = PureState.basis_state(register(photon("A", DofKind.TIMEBIN)), ["H", "S"])
    spread = unbalanced_interferometer(state, "A")
    branches = detect(spread, "A", (DofKind.POLARIZATION, DofKind.ARRIVAL), resolve_ports=True)
    assert _click_distribution(branches) == pytest.approx(
        {"A:H,early": 0.5, "A:H,middle+": 0.25, "A:H,middle-": 0.25}
    )


def test_pbs_parity_check():
    phi = make_hyper_bell(PHI_PHI)
    psi = make_hyper_bell(HyperBellLabel(pol=BellLabel.PSI_MINUS, spat=BellLabel.PHI_PLUS))
    assert [b.outcome for b in pbs_parity_check(phi, "A", "B")] == [("PBS(A,B)=even",)]
    assert [b.outcome for b in pbs_parity_check(psi, "A", "B")] == [("PBS(A,B)=odd",)]


def test_hom_parity_lists_kept_outcome_first():
    layout = register(photon("A") + photon("B"))
    state = PureState.from_amplitudes(layout, np.ones(16), normalize=True)
    branches = bs_hom_parity(state, "A", "B")
    assert [b.outcome[0] for b in branches] == ["HOM(A,B)=odd", "HOM(A,B)=even"]
    assert sum(b.probability for b in branches) == pytest.approx(1.0)


def test_detection_consumes_the_photon():
    layout = register(photon("A") + photon("B"))
    branches = detect(PureState.basis_state(layout, ["V", "a2", "H", "b1"]), "A")
    assert len(branches) == 1
    assert branches[0].outcome == ("A:V,a2",)
    assert branches[0].state.layout.carriers() == ["B"]
