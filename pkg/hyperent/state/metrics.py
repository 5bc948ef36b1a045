from typing import Optional, Sequence, Union

import numpy as np

from hyperent.exceptions import StateError
from hyperent.state.ensemble import Ensemble
from hyperent.state.pure import PureState, marginal_matrix
from hyperent.state.register import SubsystemKey


def fidelity(
    state: Union[PureState, Ensemble],
    target: PureState,
    subsystems: Optional[Sequence[SubsystemKey]] = None,
) -> float:
    """<target| rho_reduced |target> on the named subsystems.

    subsystems maps positionally onto the target's labels; by default the target's
    own labels are looked up in the state.
    """
    keys = list(subsystems) if subsystems is not None else [l.key for l in target.layout.labels]
    if len(keys) != len(target.layout.labels):
        raise StateError(f"Target has {len(target.layout.labels)} subsystems, {len(keys)} were named")
    members = state.members if isinstance(state, Ensemble) else ((1.0, state),)
    total = 0.0
    for weight, member in members:
        dims = tuple(member.layout.dims[a] for a in member.layout.axes(keys))
        if dims != target.layout.dims:
            raise StateError(f"Subsystem dimensions {dims} do not match target {target.layout.dims}")
        overlap = target.amplitudes.conj() @ marginal_matrix(member, keys)
        total += weight * float(np.vdot(overlap, overlap).real)
    return total
