import logging
from typing import Callable, Dict, List, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict

from hyperent.config import settings
from hyperent.exceptions import StateError
from hyperent.state.pure import PureState, fingerprint, product
from hyperent.state.register import SystemLayout

logger = logging.getLogger(__name__)


class Ensemble(BaseModel):
    """Weighted list of pure states; weights sum to 1"""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    members: Tuple[Tuple[float, PureState], ...]

    def __init__(self, **data):
        super().__init__(**data)
        if not self.members:
            raise StateError("An ensemble needs at least one member")
        layout = self.members[0][1].layout
        for weight, state in self.members:
            if weight < 0:
                raise StateError(f"Negative ensemble weight {weight}")
            if state.layout != layout:
                raise StateError("Ensemble members must share one layout")
        total = sum(w for w, _ in self.members)
        if abs(total - 1.0) > settings.normalization_tolerance:
            raise StateError(f"Ensemble weights sum to {total}, not 1")

    @property
    def layout(self) -> SystemLayout:
        return self.members[0][1].layout

    @property
    def weights(self) -> List[float]:
        return [w for w, _ in self.members]

    def density_matrix(self) -> np.ndarray:
        return sum(w * np.outer(s.amplitudes, s.amplitudes.conj()) for w, s in self.members)

    def map(self, operation: Callable[[PureState], PureState]) -> "Ensemble":
        return Ensemble(members=tuple((w, operation(s)) for w, s in self.members))

    def merged(self) -> "Ensemble":
        """Combine members that are equal up to global phase"""
        buckets: Dict[Tuple, List] = {}
        for weight, state in self.members:
            key = fingerprint(state)
            if key in buckets:
                buckets[key][0] += weight
            else:
                buckets[key] = [weight, state]
        return Ensemble(members=tuple((w, s) for w, s in buckets.values()))

    def product(self, other: "Ensemble") -> "Ensemble":
        return Ensemble(members=tuple(
            (w1 * w2, product(s1, s2)) for w1, s1 in self.members for w2, s2 in other.members
        ))


def mix(members: Sequence[Tuple[float, PureState]]) -> Ensemble:
    """Ensemble from (weight, state) pairs; weights within 1e-9 of summing to 1 are renormalized"""
    members = list(members)
    if not members:
        raise StateError("mix() needs at least one member")
    for weight, _ in members:
        if weight < 0:
            raise StateError(f"Negative ensemble weight {weight}")
    total = sum(w for w, _ in members)
    if abs(total - 1.0) > settings.probability_tolerance:
        raise StateError(f"Ensemble weights sum to {total:g}, not 1")
    return Ensemble(members=tuple((w / total, s) for w, s in members))


def from_weighted(members: Sequence[Tuple[float, PureState]]) -> Ensemble:
    """Ensemble from unnormalized nonnegative weights, e.g. branch probabilities"""
    total = sum(w for w, _ in members)
    if total <= 0:
        raise StateError("Cannot build an ensemble from zero total weight")
    return Ensemble(members=tuple((w / total, s) for w, s in members))
