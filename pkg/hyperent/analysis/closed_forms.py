"""Closed-form success probabilities, fidelities and efficiencies.

These are the reference values that the branch enumeration is checked against.
Amplitudes are real; only their squares enter.
"""
from typing import Dict, List, Tuple

from hyperent.exceptions import ParameterError


def param_split_probability(alpha: float, beta: float, gamma: float, delta: float) -> float:
    """4|beta gamma|^2 for |alpha| > |beta|, |gamma| < |delta|; other orderings by symmetry"""
    return 4.0 * min(alpha ** 2, beta ** 2) * min(gamma ** 2, delta ** 2)


def schmidt_probability(alpha: float, beta: float, gamma: float, delta: float) -> float:
    return 4.0 * (alpha * beta * gamma * delta) ** 2


def timebin_probability(alpha: float, beta: float, delta: float, eta: float) -> float:
    return (alpha * beta * delta * eta) ** 2


def _fourth_sum(x: float, y: float) -> float:
    return x ** 4 + y ** 4


def qnd_first_round(alpha: float, beta: float, gamma: float, delta: float) -> Dict[str, float]:
    """Round-one success p(1) and the three recursing cases p'(1)_1..3"""
    pol_even, spat_even = _fourth_sum(alpha, beta), _fourth_sum(gamma, delta)
    pol_odd, spat_odd = 2 * (alpha * beta) ** 2, 2 * (gamma * delta) ** 2
    return {
        "p1": pol_odd * spat_odd,
        "p1_prime_1": pol_even * spat_even,
        "p1_prime_2": pol_odd * spat_even,
        "p1_prime_3": pol_even * spat_odd,
    }


def qnd_second_round(alpha: float, beta: float, gamma: float, delta: float) -> Dict[str, float]:
    """Round-two success from each of the three recursing cases"""
    a, b, c, d = alpha ** 2, beta ** 2, gamma ** 2, delta ** 2
    pol_even, spat_even = a * a + b * b, c * c + d * d
    return {
        "p2_1": 4 * (a * b * c * d) ** 2 / (pol_even * spat_even),
        "p2_2": 4 * a * b * (c * d) ** 2 / spat_even,
        "p2_3": 4 * (a * b) ** 2 * c * d / pol_even,
    }


def dof_done_probability(x: float, y: float, rounds: int) -> float:
    """Probability that one DOF has met odd parity within the given rounds.

    Each even outcome maps the amplitudes (x, y) to (x^2, y^2) renormalized.
    """
    if rounds < 1:
        raise ParameterError(f"rounds must be >= 1, got {rounds}")
    remaining = 1.0
    for _ in range(rounds):
        even = _fourth_sum(x, y)
        if even == 0.0:
            break
        remaining *= even
        norm = even ** 0.5
        x, y = x * x / norm, y * y / norm
    return 1.0 - remaining


def qnd_total_probability(alpha: float, beta: float, gamma: float, delta: float, rounds: int) -> float:
    """Total success probability of the iterative QND concentration after the given rounds"""
    return dof_done_probability(alpha, beta, rounds) * dof_done_probability(gamma, delta, rounds)


def qnd_round_probabilities(alpha: float, beta: float, gamma: float, delta: float, rounds: int) -> List[float]:
    """Success probability contributed by each round"""
    totals = [qnd_total_probability(alpha, beta, gamma, delta, n) for n in range(1, rounds + 1)]
    return [totals[0]] + [later - earlier for earlier, later in zip(totals, totals[1:])]


def purified_fidelity(fidelity: float) -> float:
    """F' = F^2 / (F^2 + (1 - F)^2)"""
    return fidelity ** 2 / (fidelity ** 2 + (1.0 - fidelity) ** 2)


def fidelity_trajectory(fidelity: float, rounds: int) -> List[float]:
    values = []
    for _ in range(rounds):
        fidelity = purified_fidelity(fidelity)
        values.append(fidelity)
    return values


def _keep(fidelity: float) -> float:
    return fidelity ** 2 + (1.0 - fidelity) ** 2


def epp_case_probabilities(f1: float, f2: float) -> Dict[str, float]:
    keep_pol, keep_spat = _keep(f1), _keep(f2)
    return {
        "case-1": keep_pol * keep_spat,
        "case-2": (1 - keep_pol) * (1 - keep_spat),
        "case-3": keep_pol * (1 - keep_spat),
        "case-4": (1 - keep_pol) * keep_spat,
    }


def epp_efficiency_y0(f1: float, f2: float) -> float:
    return _keep(f1) * _keep(f2)


def epp_efficiency_y(f1: float, f2: float) -> Tuple[float, str]:
    """Efficiency with the second step; tagged "published" when F1 >= F2.

    Case-(3) and case-(4) pairs are joined one to one, so the smaller of the two
    probabilities adds to Y0. For F1 >= F2 this equals F2^2 + (1 - F2)^2.
    """
    cases = epp_case_probabilities(f1, f2)
    value = cases["case-1"] + min(cases["case-3"], cases["case-4"])
    return value, "published" if f1 >= f2 else "extension"
