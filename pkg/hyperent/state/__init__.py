from hyperent.state.branch import Branch, coarse_grain, correct, evolve, expand, keep, root, total_probability
from hyperent.state.ensemble import Ensemble, from_weighted, mix
from hyperent.state.measure import measure_discard, measure_kraus, measure_levels, measure_projective
from hyperent.state.metrics import fidelity
from hyperent.state.pure import (
    PureState,
    apply_isometry,
    apply_unitary,
    equal_up_to_phase,
    fingerprint,
    product,
    reduced_density_matrix,
    relabel,
)
from hyperent.state.register import SubsystemKey, SubsystemLabel, SystemLayout, photon, register, spin

__all__ = [
    "Branch", "Ensemble", "PureState", "SubsystemKey", "SubsystemLabel", "SystemLayout",
    "apply_isometry", "apply_unitary", "coarse_grain", "correct", "equal_up_to_phase", "evolve", "expand",
    "fidelity", "fingerprint", "from_weighted", "keep", "measure_discard", "measure_kraus",
    "measure_levels", "measure_projective", "mix", "photon", "product", "reduced_density_matrix",
    "register", "relabel", "root", "spin", "total_probability",
]
