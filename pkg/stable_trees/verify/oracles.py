"""Brute-force oracles: exhaustive conditioned trees and time-dependent urns."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray

from stable_trees.discrete_trees import (
    OffspringLaw,
    OrderedTree,
    ThetaWeights,
    size_biased_pmf,
)
from stable_trees.errors import ParameterError

MAX_ENUMERATION_SIZE = 8


def _preorder_degree_sequences(n: int, support: list[int]) -> list[tuple[int, ...]]:
    """Preorder out-degree sequences of every ordered tree with n vertices."""

    found: list[tuple[int, ...]] = []

    def extend(prefix: list[int], open_slots: int) -> None:
        remaining = n - len(prefix)
        if remaining == 0:
            if open_slots == 0:
                found.append(tuple(prefix))
            return
        if open_slots == 0 or open_slots > remaining:
            return
        for degree in support:
            prefix.append(degree)
            extend(prefix, open_slots - 1 + degree)
            prefix.pop()

    extend([], 1)
    return found


def enumerate_conditioned_gw(law: OffspringLaw, n: int) -> dict[OrderedTree, float]:
    """Exact law of the Bienayme tree conditioned on n vertices.

    Every ordered tree of size n gets weight prod p_{d_i}; weights are then
    normalised by their sum.
    """

    if law.is_stable:
        raise ParameterError("enumeration needs a finite-support offspring law.")
    if not 1 <= n <= MAX_ENUMERATION_SIZE:
        raise ParameterError(f"n must be between 1 and {MAX_ENUMERATION_SIZE}.")
    pmf = law.finite_pmf
    support = [d for d in range(min(pmf.size, n)) if pmf[d] > 0]
    weights = {
        OrderedTree(degrees): float(np.prod(pmf[list(degrees)]))
        for degrees in _preorder_degree_sequences(n, support)
    }
    total = sum(weights.values())
    if total <= 0:
        raise ParameterError(f"no tree of size {n} has positive probability.")
    return {tree: weight / total for tree, weight in weights.items()}


def unnormalised_tree_mass(law: OffspringLaw, n: int) -> float:
    """P(the unconditioned tree has n vertices), summed over enumerated trees."""

    pmf = law.finite_pmf
    support = [d for d in range(min(pmf.size, n)) if pmf[d] > 0]
    return float(
        sum(
            np.prod(pmf[list(degrees)])
            for degrees in _preorder_degree_sequences(n, support)
        )
    )


def enumerate_theta_expectation(law: OffspringLaw, n: int, m: int) -> float:
    """E[Theta_m^n(xi*_1..xi*_m)] by summing over every feasible prefix."""

    if law.is_stable:
        raise ParameterError("exact Theta expectation needs a finite law.")
    sb = size_biased_pmf(law)
    support = [k for k in range(1, sb.size) if sb[k] > 0]
    weights = ThetaWeights(law, n, m)
    total = 0.0
    for prefix in itertools.product(support, repeat=m):
        probability = float(np.prod(sb[list(prefix)]))
        total += probability * float(np.exp(weights.log_theta(prefix))[0])
    return total


@dataclass(frozen=True)
class UrnProcess:
    """Time-dependent urn: M_i = M_0 + sum of increments, A grows on acceptance.

    At step i the increment m_i is added to A with probability A_{i-1}/M_{i-1}.
    """

    initial_mass: float
    initial_total: float
    increments: NDArray[np.float64]
    fractions: NDArray[np.float64]
    frequencies: NDArray[np.float64]

    @property
    def terminal_fraction(self) -> float:
        return float(self.fractions[-1])

    @property
    def terminal_gap(self) -> float:
        return float(abs(self.fractions[-1] - self.frequencies[-1]))


def polya_urn_simulate(
    initial_mass: float,
    initial_total: float,
    increments: ArrayLike,
    steps: int,
    rng: np.random.Generator,
) -> UrnProcess:
    """Run one urn trajectory; returns A_n/M_n and the acceptance frequencies.

    ``increments`` is either a scalar (constant m_i) or an array of at least
    ``steps`` positive values.
    """

    if not 0.0 <= initial_mass <= initial_total or initial_total <= 0:
        raise ParameterError("the urn needs 0 <= A_0 <= M_0 and M_0 > 0.")
    m = _increment_schedule(increments, steps)
    uniforms = rng.random(steps)
    fractions = np.empty(steps)
    frequencies = np.empty(steps)
    mass, total, accepted = initial_mass, initial_total, 0
    for i in range(steps):
        if uniforms[i] < mass / total:
            mass += m[i]
            accepted += 1
        total += m[i]
        fractions[i] = mass / total
        frequencies[i] = accepted / (i + 1)
    return UrnProcess(initial_mass, initial_total, m, fractions, frequencies)


def _increment_schedule(increments: ArrayLike, steps: int) -> NDArray[np.float64]:
    values = np.asarray(increments, dtype=float)
    if values.ndim == 0:
        values = np.full(steps, float(values))
    elif values.size < steps:
        raise ParameterError(f"need at least {steps} increments, got {values.size}.")
    values = values[:steps].copy()
    if np.any(values <= 0):
        raise ParameterError("urn increments must be positive.")
    return values


def polya_urn_terminal(
    initial_mass: float,
    initial_total: float,
    increments: ArrayLike,
    steps: int,
    replicas: int,
    rng: np.random.Generator,
) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    """Terminal (A_n/M_n, acceptance frequency) for independent urns in lockstep."""

    if not 0.0 <= initial_mass <= initial_total or initial_total <= 0:
        raise ParameterError("the urn needs 0 <= A_0 <= M_0 and M_0 > 0.")
    m = _increment_schedule(increments, steps)
    mass = np.full(replicas, float(initial_mass))
    accepted = np.zeros(replicas)
    total = float(initial_total)
    for i in range(steps):
        hit = rng.random(replicas) < mass / total
        mass += m[i] * hit
        accepted += hit
        total += m[i]
    return mass / total, accepted / steps
