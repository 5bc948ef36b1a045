import logging
from typing import Callable, Dict, List, Sequence, Tuple

from pydantic import BaseModel, ConfigDict

from hyperent.config import settings
from hyperent.state.pure import PureState, fingerprint

logger = logging.getLogger(__name__)

Correction = Tuple[str, Callable[[PureState], PureState]]


class Branch(BaseModel):
    """One measurement path: outcome record, probability and post-measurement state"""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    outcome: Tuple[str, ...]
    probability: float
    state: PureState
    corrections: Tuple[str, ...] = ()
    accepted: bool = True
    # index of the ensemble member this branch descends from; not part of the record
    member: int = 0

    @property
    def key(self) -> str:
        return " | ".join(self.outcome)

    def token(self, prefix: str) -> str:
        """Value of the last outcome token starting with prefix"""
        for token in reversed(self.outcome):
            if token.startswith(prefix):
                return token[len(prefix):]
        raise KeyError(f"No outcome token starting with {prefix!r} in {self.outcome}")


def root(state: PureState, probability: float = 1.0, member: int = 0) -> Branch:
    return Branch(outcome=(), probability=probability, state=state, member=member)


def expand(branches: Sequence[Branch], step: Callable[[PureState], Sequence[Branch]]) -> List[Branch]:
    """Replace every accepted branch by its children under a measurement step"""
    children: List[Branch] = []
    for parent in branches:
        if not parent.accepted:
            children.append(parent)
            continue
        for child in step(parent.state):
            probability = parent.probability * child.probability
            if probability < settings.zero_branch_threshold:
                continue
            children.append(
                Branch(
                    outcome=parent.outcome + child.outcome,
                    probability=probability,
                    state=child.state,
                    corrections=parent.corrections + child.corrections,
                    member=parent.member,
                )
            )
    logger.debug(f"Expanded {len(branches)} branches into {len(children)}")
    return children


def evolve(branches: Sequence[Branch], operation: Callable[[PureState], PureState]) -> List[Branch]:
    """Apply a deterministic operation to every accepted branch"""
    return [
        b.model_copy(update={"state": operation(b.state)}) if b.accepted else b
        for b in branches
    ]


def correct(branches: Sequence[Branch], rule: Callable[[Branch], Sequence[Correction]]) -> List[Branch]:
    """Feed-forward: apply the corrections the rule selects from each outcome record"""
    corrected = []
    for branch in branches:
        if not branch.accepted:
            corrected.append(branch)
            continue
        state = branch.state
        names = []
        for name, operation in rule(branch):
            state = operation(state)
            names.append(name)
        corrected.append(
            branch.model_copy(update={"state": state, "corrections": branch.corrections + tuple(names)})
        )
    return corrected


def keep(branches: Sequence[Branch], predicate: Callable[[Branch], bool]) -> List[Branch]:
    """Mark branches failing the predicate as discarded; discarded ones stay in the trace"""
    return [b if not b.accepted or predicate(b) else b.model_copy(update={"accepted": False})
            for b in branches]


def total_probability(branches: Sequence[Branch], accepted_only: bool = False) -> float:
    return float(sum(b.probability for b in branches if b.accepted or not accepted_only))


def coarse_grain(branches: Sequence[Branch], label: Callable[[Branch], str]) -> List[Branch]:
    """Merge branches sharing a coarse outcome label and the same post-state up to phase"""
    buckets: Dict[Tuple, Branch] = {}
    for branch in branches:
        name = label(branch)
        key = (name, branch.accepted, fingerprint(branch.state))
        if key in buckets:
            merged = buckets[key]
            buckets[key] = merged.model_copy(update={"probability": merged.probability + branch.probability})
        else:
            buckets[key] = branch.model_copy(update={"outcome": (name,)})
    return list(buckets.values())
