"""Exact branch enumeration, seeded sampling and closed-form comparison"""
import logging
import math
from typing import Any, Callable, Dict, List, Optional, Sequence, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from hyperent.config import settings
from hyperent.exceptions import ParameterError, StateError
from hyperent.protocols.base_protocol import ProtocolReport, get_protocol
from hyperent.state import Branch

logger = logging.getLogger(__name__)


class Invocation(BaseModel):
    """A protocol name with raw parameters, as the CLI receives them"""
    model_config = ConfigDict(frozen=True)

    name: str
    parameters: Dict[str, Any] = Field(default_factory=dict)


def invocation(name: str, **parameters: Any) -> Invocation:
    return Invocation(name=name, parameters=parameters)


class Enumeration(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    report: ProtocolReport
    leaves: List[Branch]

    @property
    def distribution(self) -> Dict[str, float]:
        """Outcome record -> probability; discarded leaves are prefixed with 'discard:'"""
        table: Dict[str, float] = {}
        for leaf in self.leaves:
            name = leaf_token(leaf)
            table[name] = table.get(name, 0.0) + leaf.probability
        return table

    @property
    def success_probability(self) -> float:
        return self.report.success_probability


def leaf_token(leaf: Branch) -> str:
    return leaf.key if leaf.accepted else f"discard:{leaf.key}"


def _report_of(target: Union[Invocation, ProtocolReport]) -> ProtocolReport:
    if isinstance(target, ProtocolReport):
        return target
    protocol = get_protocol(target.name)
    if protocol.produces != "report":
        raise ParameterError(f"{target.name} produces a table; there is no branch tree to enumerate")
    return protocol.run(target.parameters)


def enumerate_branches(target: Union[Invocation, ProtocolReport]) -> Enumeration:
    """Every measurement leaf of one protocol run with its exact probability"""
    report = _report_of(target)
    if not report.branches:
        raise ParameterError(f"{report.protocol} reports no branch trace")
    total = sum(leaf.probability for leaf in report.branches)
    if abs(total - 1.0) > settings.probability_tolerance:
        raise StateError(f"{report.protocol}: leaves sum to {total:.12f}, not 1")
    logger.debug(f"Enumerated {len(report.branches)} leaves of {report.protocol}")
    return Enumeration(report=report, leaves=list(report.branches))


enumerate = enumerate_branches


def binomial_bound(probability: float, trials: int, sigmas: float = 4.0) -> float:
    return sigmas * math.sqrt(probability * (1.0 - probability) / trials)


class SampleResult(BaseModel):
    protocol: str
    seed: int
    trials: int
    counts: Dict[str, int]
    probabilities: Dict[str, float]

    @property
    def frequencies(self) -> Dict[str, float]:
        return {token: count / self.trials for token, count in self.counts.items()}

    def deviations(self, sigmas: float = 4.0) -> Dict[str, Dict[str, float]]:
        """Per outcome: exact probability, observed frequency and the allowed deviation"""
        frequencies = self.frequencies
        return {
            token: {
                "probability": p,
                "frequency": frequencies.get(token, 0.0),
                "bound": binomial_bound(p, self.trials, sigmas),
            }
            for token, p in self.probabilities.items()
        }

    def agrees(self, sigmas: float = 4.0) -> bool:
        return all(
            abs(entry["frequency"] - entry["probability"]) <= entry["bound"] + settings.probability_tolerance
            for entry in self.deviations(sigmas).values()
        )


def sample(target: Union[Invocation, ProtocolReport, Enumeration], trials: int, seed: int = 0) -> SampleResult:
    """Draw outcome records with the exact leaf probabilities; deterministic in (seed, trials)"""
    if trials < 1:
        raise ParameterError(f"trials must be >= 1, got {trials}")
    enumeration = target if isinstance(target, Enumeration) else enumerate_branches(target)
    distribution = enumeration.distribution
    tokens = sorted(distribution)
    weights = np.array([distribution[token] for token in tokens])
    cumulative = np.cumsum(weights / weights.sum())
    cumulative[-1] = 1.0
    rng = np.random.default_rng(seed)
    draws = np.searchsorted(cumulative, rng.random(trials), side="right")
    indices, counts = np.unique(draws, return_counts=True)
    result = SampleResult(
        protocol=enumeration.report.protocol,
        seed=seed,
        trials=trials,
        counts={tokens[int(i)]: int(c) for i, c in zip(indices, counts)},
        probabilities=distribution,
    )
    logger.info(f"Sampled {trials} trials of {result.protocol} with seed {seed}")
    return result


class OracleComparison(BaseModel):
    name: str
    points: List[Dict[str, Any]]
    enumerated: List[float]
    closed_form: List[float]
    max_deviation: float
    worst_point: Optional[Dict[str, Any]] = None
    passed: bool


def compare_oracle(
    name: str,
    enumerated: Callable[..., float],
    closed_form: Callable[..., float],
    grid: Sequence[Dict[str, Any]],
    tolerance: Optional[float] = None,
) -> OracleComparison:
    """Evaluate both sides on every grid point; pass iff the largest gap is below tolerance"""
    tolerance = settings.probability_tolerance if tolerance is None else tolerance
    points = [dict(point) for point in grid]
    if not points:
        raise ParameterError("compare_oracle needs at least one grid point")
    lhs = [float(enumerated(**point)) for point in points]
    rhs = [float(closed_form(**point)) for point in points]
    gaps = [abs(a - b) for a, b in zip(lhs, rhs)]
    worst = int(np.argmax(gaps))
    comparison = OracleComparison(
        name=name,
        points=points,
        enumerated=lhs,
        closed_form=rhs,
        max_deviation=gaps[worst],
        worst_point=points[worst],
        passed=gaps[worst] < tolerance,
    )
    if not comparison.passed:
        logger.warning(f"Oracle {name}: deviation {gaps[worst]:.3e} at {points[worst]}")
    return comparison
