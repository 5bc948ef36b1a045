import logging
import math
from typing import Dict, Iterable, List, Sequence, Tuple

from pydantic import BaseModel, ConfigDict, model_validator

from hyperent.config import settings
from hyperent.exceptions import StateError, StateSpaceOverflow
from hyperent.models import BasisTag, DofKind

logger = logging.getLogger(__name__)

SubsystemKey = Tuple[str, DofKind]

_BASIS_LEVELS: Dict[BasisTag, Tuple[str, ...]] = {
    BasisTag.LINEAR: ("H", "V"),
    BasisTag.CIRCULAR: ("R", "L"),
    BasisTag.BIN: ("S", "L"),
    BasisTag.ARRIVAL: ("SS", "SL", "LS", "LL"),
    BasisTag.SPIN: ("up", "down"),
}

_KIND_BASES: Dict[DofKind, Tuple[BasisTag, ...]] = {
    DofKind.POLARIZATION: (BasisTag.LINEAR, BasisTag.CIRCULAR),
    DofKind.SPATIAL: (BasisTag.PATH,),
    DofKind.TIMEBIN: (BasisTag.BIN,),
    DofKind.ARRIVAL: (BasisTag.ARRIVAL,),
    DofKind.SPIN: (BasisTag.SPIN,),
}


class SubsystemLabel(BaseModel):
    """One degree of freedom of one carrier"""
    model_config = ConfigDict(frozen=True)

    carrier: str
    kind: DofKind
    dimension: int
    basis: BasisTag

    @model_validator(mode="after")
    def check_dimension(self) -> "SubsystemLabel":
        if self.basis not in _KIND_BASES[self.kind]:
            raise ValueError(f"Basis {self.basis.value} does not fit a {self.kind.value} subsystem")
        if self.basis == BasisTag.PATH:
            allowed = (2, 3)
        else:
            allowed = (len(_BASIS_LEVELS[self.basis]),)
        if self.dimension not in allowed:
            raise ValueError(
                f"{self.basis.value} basis needs dimension in {allowed}, got {self.dimension}"
            )
        return self

    @property
    def key(self) -> SubsystemKey:
        return (self.carrier, self.kind)

    @property
    def levels(self) -> Tuple[str, ...]:
        if self.basis == BasisTag.PATH:
            prefix = self.carrier.lower()
            return tuple(f"{prefix}{i + 1}" for i in range(self.dimension))
        return _BASIS_LEVELS[self.basis]

    def level_index(self, level: str) -> int:
        try:
            return self.levels.index(level)
        except ValueError:
            raise StateError(f"Level {level!r} is not one of {self.levels} for {self}") from None

    def __str__(self) -> str:
        return f"{self.carrier}.{self.kind.value}"


class SystemLayout(BaseModel):
    """Ordered subsystems; the first one is the slowest-varying index"""
    model_config = ConfigDict(frozen=True)

    labels: Tuple[SubsystemLabel, ...]

    def __init__(self, **data):
        super().__init__(**data)
        self._check_labels()

    def _check_labels(self) -> None:
        seen = set()
        for label in self.labels:
            if label.key in seen:
                raise StateError(f"Duplicate subsystem {label}")
            seen.add(label.key)
        size = math.prod(label.dimension for label in self.labels)
        if size > settings.max_state_dimension:
            raise StateSpaceOverflow(size, settings.max_state_dimension)

    @property
    def dims(self) -> Tuple[int, ...]:
        return tuple(label.dimension for label in self.labels)

    @property
    def size(self) -> int:
        return math.prod(self.dims)

    def has(self, carrier: str, kind: DofKind) -> bool:
        return any(label.key == (carrier, kind) for label in self.labels)

    def axis(self, carrier: str, kind: DofKind) -> int:
        for i, label in enumerate(self.labels):
            if label.key == (carrier, kind):
                return i
        raise StateError(f"Layout has no {kind.value} subsystem for carrier {carrier}")

    def label(self, carrier: str, kind: DofKind) -> SubsystemLabel:
        return self.labels[self.axis(carrier, kind)]

    def axes(self, keys: Iterable[SubsystemKey]) -> List[int]:
        return [self.axis(carrier, kind) for carrier, kind in keys]

    def carriers(self) -> List[str]:
        ordered: List[str] = []
        for label in self.labels:
            if label.carrier not in ordered:
                ordered.append(label.carrier)
        return ordered

    def replace(self, axis: int, label: SubsystemLabel) -> "SystemLayout":
        labels = list(self.labels)
        labels[axis] = label
        return SystemLayout(labels=tuple(labels))

    def without(self, axes: Sequence[int]) -> "SystemLayout":
        drop = set(axes)
        return SystemLayout(labels=tuple(l for i, l in enumerate(self.labels) if i not in drop))

    def extend(self, other: "SystemLayout") -> "SystemLayout":
        return SystemLayout(labels=self.labels + other.labels)


def register(labels: Sequence[SubsystemLabel]) -> SystemLayout:
    """Build the layout that fixes the basis ordering for these labels"""
    if not labels:
        raise StateError("A layout needs at least one subsystem")
    layout = SystemLayout(labels=tuple(labels))
    logger.debug(f"Registered layout {[str(l) for l in layout.labels]} with {layout.size} basis states")
    return layout


def photon(
    carrier: str,
    second: DofKind = DofKind.SPATIAL,
    polarization_basis: BasisTag = BasisTag.LINEAR,
) -> List[SubsystemLabel]:
    """Polarization plus one more photonic DOF, in that order"""
    labels = [SubsystemLabel(carrier=carrier, kind=DofKind.POLARIZATION, dimension=2,
                             basis=polarization_basis)]
    if second == DofKind.SPATIAL:
        labels.append(SubsystemLabel(carrier=carrier, kind=DofKind.SPATIAL, dimension=2,
                                     basis=BasisTag.PATH))
    elif second == DofKind.TIMEBIN:
        labels.append(SubsystemLabel(carrier=carrier, kind=DofKind.TIMEBIN, dimension=2,
                                     basis=BasisTag.BIN))
    else:
        raise StateError(f"Photons carry a spatial or time-bin second DOF, not {second.value}")
    return labels


def spin(carrier: str) -> SubsystemLabel:
    return SubsystemLabel(carrier=carrier, kind=DofKind.SPIN, dimension=2, basis=BasisTag.SPIN)
