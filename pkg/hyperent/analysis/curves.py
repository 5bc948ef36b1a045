"""Curve tables for iterative concentration and purification.

Values come from the closed forms; a few grid points are re-derived by branch
enumeration and the largest gap is stored in the table metadata.
"""
import logging
import math
from typing import Callable, Dict, List, Sequence

from hyperent.analysis import closed_forms
from hyperent.config import settings
from hyperent.exceptions import ParameterError, StateError
from hyperent.models import CurveTable, PartialHyperParams
from hyperent.protocols import concentration, purification

logger = logging.getLogger(__name__)


def _check_points(grid: Sequence[float]) -> List[float]:
    """First, middle and last grid value"""
    picks = sorted({0, len(grid) // 2, len(grid) - 1})
    return [grid[i] for i in picks]


def _cross_check(name: str, points: Sequence[float], gap: Callable[[float], float]) -> Dict:
    deviations = {repr(point): gap(point) for point in points}
    worst = max(deviations.values()) if deviations else 0.0
    if worst > settings.probability_tolerance:
        logger.error(f"{name}: enumeration disagrees with the closed form by {worst:.3e}")
        raise StateError(f"{name}: enumeration disagrees with the closed form by {worst:.3e}")
    return {"points": list(deviations), "max_deviation": worst}


def _iteration_params(alpha_sq: float) -> PartialHyperParams:
    alpha, beta = math.sqrt(alpha_sq), math.sqrt(1.0 - alpha_sq)
    return PartialHyperParams(alpha=alpha, beta=beta, gamma=alpha, delta=beta)


def curve_ecp_iteration(alpha_sq: Sequence[float], rounds: Sequence[int]) -> CurveTable:
    """Total success probability of the iterative concentration against |alpha|^2, with |alpha| = |gamma|"""
    if not alpha_sq or not rounds:
        raise ParameterError("The grid and the round list must not be empty")
    for value in alpha_sq:
        if not 0.0 < value < 1.0:
            raise ParameterError(f"|alpha|^2 grid values must lie in (0, 1), got {value}")
    for n in rounds:
        if n < 1:
            raise ParameterError(f"Round counts must be >= 1, got {n}")
    series = {}
    for n in rounds:
        column = []
        for value in alpha_sq:
            p = _iteration_params(value)
            column.append(closed_forms.qnd_total_probability(p.alpha, p.beta, p.gamma, p.delta, n))
        series[f"n={n}"] = column

    deepest = max(rounds)

    def gap(value: float) -> float:
        p = _iteration_params(value)
        report = concentration.ecp_qnd_iterative(p, deepest)
        totals = report.details["total_by_round"]
        return max(
            abs(totals[n - 1] - closed_forms.qnd_total_probability(p.alpha, p.beta, p.gamma, p.delta, n))
            for n in rounds
        )

    check = _cross_check("ecp-curve", _check_points(list(alpha_sq)), gap)
    return CurveTable(variable="alpha_sq", grid=list(alpha_sq), series=series, metadata={"cross_check": check})


def _check_fidelity_grid(grid: Sequence[float]) -> None:
    if not grid:
        raise ParameterError("The fidelity grid must not be empty")
    for value in grid:
        if not 0.5 < value <= 1.0:
            raise ParameterError(f"Fidelity grid values must lie in (1/2, 1], got {value}")


def _one_round_gap(value: float) -> float:
    report = purification.hyper_epp_full(value, value, rounds=1, verify=True)
    return report.details["enumerated"][0]["max_deviation"]


def curve_epp_fidelity(fidelities: Sequence[float], rounds: Sequence[int]) -> CurveTable:
    """Per-DOF fidelity after n rounds against the initial fidelity, F1 = F2"""
    _check_fidelity_grid(fidelities)
    if not rounds or min(rounds) < 1:
        raise ParameterError(f"Round counts must be >= 1, got {list(rounds)}")
    deepest = max(rounds)
    trajectories = [closed_forms.fidelity_trajectory(value, deepest) for value in fidelities]
    series = {f"n={n}": [trajectory[n - 1] for trajectory in trajectories] for n in rounds}
    check = _cross_check("epp-curve", _check_points(list(fidelities)), _one_round_gap)
    return CurveTable(variable="F", grid=list(fidelities), series=series, metadata={"cross_check": check})


def epp_trajectory(fidelity: float, rounds: int) -> CurveTable:
    """Fidelity after each of n rounds for one starting fidelity"""
    _check_fidelity_grid([fidelity])
    if rounds < 1:
        raise ParameterError(f"rounds must be >= 1, got {rounds}")
    values = closed_forms.fidelity_trajectory(fidelity, rounds)
    check = _cross_check("epp-curve", [fidelity], _one_round_gap)
    return CurveTable(variable="n", grid=[float(n) for n in range(1, rounds + 1)],
                      series={"fidelity": values}, metadata={"cross_check": check, "F": fidelity})


def curve_epp_efficiency(fidelities: Sequence[float]) -> CurveTable:
    """Y0 (first step only) and Y (with state joining) against F, F1 = F2"""
    _check_fidelity_grid(fidelities)
    series = {
        "Y0": [closed_forms.epp_efficiency_y0(value, value) for value in fidelities],
        "Y": [closed_forms.epp_efficiency_y(value, value)[0] for value in fidelities],
    }
    check = _cross_check("epp-efficiency-curve", _check_points(list(fidelities)), _one_round_gap)
    return CurveTable(variable="F", grid=list(fidelities), series=series, metadata={"cross_check": check})
