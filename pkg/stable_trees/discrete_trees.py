"""Conditioned Bienayme trees through reverse Prufer codewords.

Labels are 1-based throughout, as in codewords over [n]. Trees produced by
the half-edge growth algorithm use vertex ids 0..n-1 in creation order and
are converted to labels id + 1, so the root is label 1 and a vertex created
at step k carries label k + 1.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Literal

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy import signal, special, stats

from stable_trees.errors import (
    CodewordError,
    InvariantViolationError,
    ParameterError,
    SupportCapError,
    TreeStructureError,
)

logger = logging.getLogger(__name__)

_TABLE_SIZE = 10_000
_MAX_SUPPORT = 2**24
_DIRECT_CONVOLVE = 512
_REJECTION_BLOCK = 2_000_000

GROWTH, BRANCHING, ACTIVATION = 0, 1, 2
EVENT_NAMES = {GROWTH: "growth", BRANCHING: "branching", ACTIVATION: "activation"}


# -- offspring laws -------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class OffspringLaw:
    """Critical offspring law with either a finite pmf or the stable family.

    The stable family has generating function s + (1 - s)**alpha / alpha, so
    p_0 = 1/alpha, p_1 = 0 and P(xi >= k) = (alpha - 1) Gamma(k - alpha) /
    (alpha Gamma(2 - alpha) Gamma(k)) for k >= 2. Normalisation is
    a_n = (n / scale_constant)**(1/alpha).
    """

    name: str
    alpha: float
    scale_constant: float
    finite_pmf: NDArray[np.float64] | None = None

    def __post_init__(self) -> None:
        if not 1.0 < self.alpha <= 2.0:
            raise ParameterError("alpha must be in (1, 2].")
        if self.finite_pmf is None:
            return
        pmf = np.asarray(self.finite_pmf, dtype=float)
        object.__setattr__(self, "finite_pmf", pmf)
        support = np.arange(pmf.size)
        if np.any(pmf < 0) or abs(pmf.sum() - 1.0) > 1e-12:
            raise ParameterError("offspring pmf must be a probability vector.")
        if abs(float(support @ pmf) - 1.0) > 1e-12:
            raise ParameterError("offspring law must have mean 1.")
        if pmf.size > 1 and pmf[1] == 1.0:
            raise ParameterError("the law concentrated on 1 is degenerate.")

    @property
    def is_stable(self) -> bool:
        return self.finite_pmf is None

    @property
    def p_zero(self) -> float:
        return 1.0 / self.alpha if self.is_stable else float(self.finite_pmf[0])

    def a_n(self, n: float) -> float:
        return (n / self.scale_constant) ** (1.0 / self.alpha)

    def m_n(self, n: float) -> float:
        return n / self.a_n(n)

    def _log_stable_tail(self, k: NDArray[np.float64]) -> NDArray[np.float64]:
        a = self.alpha
        return (
            math.log((a - 1.0) / (a * special.gamma(2.0 - a)))
            + special.gammaln(k - a)
            - special.gammaln(k)
        )

    def tail(self, k: ArrayLike) -> NDArray[np.float64]:
        """P(xi >= k)."""

        k_arr = np.asarray(k, dtype=float)
        if self.is_stable:
            out = np.ones_like(k_arr)
            out[k_arr >= 1] = 1.0 - 1.0 / self.alpha
            # p_1 = 0, so P(xi >= 2) = P(xi >= 1) exactly
            big = k_arr > 2
            out[big] = np.exp(self._log_stable_tail(k_arr[big]))
            return out
        cumulative = np.concatenate([[1.0], 1.0 - np.cumsum(self.finite_pmf)])
        cumulative[-1] = 0.0
        index = np.clip(k_arr, 0, cumulative.size - 1).astype(int)
        return np.clip(np.where(k_arr <= 0, 1.0, cumulative[index]), 0.0, 1.0)

    def size_biased_tail(self, k: ArrayLike) -> NDArray[np.float64]:
        """P(xi* >= k) = sum_{j >= k} j p_j."""

        k_arr = np.asarray(k, dtype=float)
        if self.is_stable:
            a = self.alpha
            out = np.ones_like(k_arr)
            big = k_arr > 2
            out[big] = np.exp(
                special.gammaln(k_arr[big] - a)
                - special.gammaln(2.0 - a)
                - special.gammaln(k_arr[big] - 1.0)
            )
            return out
        weighted = np.arange(self.finite_pmf.size) * self.finite_pmf
        cumulative = np.concatenate([[1.0], 1.0 - np.cumsum(weighted)])
        cumulative[-1] = 0.0
        index = np.clip(k_arr, 0, cumulative.size - 1).astype(int)
        return np.clip(np.where(k_arr <= 0, 1.0, cumulative[index]), 0.0, 1.0)

    def pmf(self, cap: int) -> NDArray[np.float64]:
        """P(xi = k) for k = 0..cap."""

        if self.is_stable:
            tails = self.tail(np.arange(cap + 2))
            return np.clip(tails[:-1] - tails[1:], 0.0, None)
        out = np.zeros(cap + 1)
        size = min(cap + 1, self.finite_pmf.size)
        out[:size] = self.finite_pmf[:size]
        return out

    @property
    def max_degree(self) -> float:
        return math.inf if self.is_stable else float(self.finite_pmf.size - 1)

    def sample(self, rng: np.random.Generator, size: int | tuple[int, ...]) -> NDArray:
        return _sample_from_tail(self.tail, self._tail_table, rng, size)

    def sample_size_biased(
        self, rng: np.random.Generator, size: int | tuple[int, ...]
    ) -> NDArray:
        return _sample_from_tail(
            self.size_biased_tail, self._size_biased_table, rng, size
        )

    @property
    def _tail_table(self) -> NDArray[np.float64]:
        return _cached_table(self, "plain")

    @property
    def _size_biased_table(self) -> NDArray[np.float64]:
        return _cached_table(self, "size_biased")


@lru_cache(maxsize=32)
def _cached_table(law: OffspringLaw, kind: str) -> NDArray[np.float64]:
    k = np.arange(_TABLE_SIZE + 1)
    table = law.tail(k) if kind == "plain" else law.size_biased_tail(k)
    return table[::-1].copy()


def _sample_from_tail(
    tail, reversed_table: NDArray[np.float64], rng: np.random.Generator, size
) -> NDArray[np.int64]:
    """xi = max{k : P(xi >= k) > U} by table lookup, bisection past the table."""

    u = rng.random(size)
    flat = np.atleast_1d(u).ravel()
    out = reversed_table.size - np.searchsorted(reversed_table, flat, side="right") - 1
    out = out.astype(np.float64)
    deep = flat < reversed_table[0]
    if np.any(deep):
        targets = np.maximum(flat[deep], 1e-300)
        lo = np.full(targets.size, float(_TABLE_SIZE))
        hi = np.full(targets.size, 2.0 * _TABLE_SIZE)
        while np.any(open_ := tail(hi) > targets):
            hi[open_] *= 2.0
        while np.any(wide := hi - lo > 1.0):
            mid = np.floor(0.5 * (lo + hi))
            above = tail(mid) > targets
            lo = np.where(wide & above, mid, lo)
            hi = np.where(wide & ~above, mid, hi)
        out[deep] = lo
    result = np.minimum(out, 2.0**62).astype(np.int64)
    return result.reshape(np.shape(u)) if np.ndim(u) else result


def stable_offspring(alpha: float) -> OffspringLaw:
    """The stable family with a_n = (n/alpha)**(1/alpha)."""

    if not 1.0 < alpha < 2.0:
        raise ParameterError("alpha must be between 1 and 2 (exclusive).")
    return OffspringLaw(f"stable({alpha})", float(alpha), float(alpha))


def offspring_from_pmf(
    pmf: ArrayLike, name: str = "custom", alpha: float = 2.0
) -> OffspringLaw:
    """A finite-support law; ``alpha`` = 2 uses the Gaussian scale sqrt(n var)."""

    values = np.asarray(pmf, dtype=float)
    support = np.arange(values.size)
    variance = float(((support - 1.0) ** 2) @ values)
    scale = 1.0 / (2.0 * variance) if alpha == 2.0 else 1.0
    return OffspringLaw(name, alpha, scale, values)


def uniform_offspring(max_children: int = 2) -> OffspringLaw:
    """Uniform on {0, ..., 2m} style laws; the default is uniform{0,1,2}."""

    return offspring_from_pmf(
        np.full(max_children + 1, 1.0 / (max_children + 1)),
        name=f"uniform0..{max_children}",
    )


def size_biased_pmf(law: OffspringLaw, cap: int | None = None) -> NDArray[np.float64]:
    """P(xi* = k) = k P(xi = k) for k = 0..cap."""

    if cap is None:
        if law.is_stable:
            raise ParameterError("the stable family needs an explicit cap.")
        cap = law.finite_pmf.size - 1
    return np.arange(cap + 1) * law.pmf(cap)


def _convolve(a: NDArray[np.float64], b: NDArray[np.float64], cap: int) -> NDArray:
    if min(a.size, b.size) <= _DIRECT_CONVOLVE:
        out = np.convolve(a, b)[: cap + 1]
    else:
        out = signal.fftconvolve(a, b)[: cap + 1]
    return np.clip(out, 0.0, None)


def walk_pmf(law: OffspringLaw, j: int, cap: int) -> NDArray[np.float64]:
    """P(Xi_j = s) for s = 0..cap, Xi_j a sum of j i.i.d. copies of xi.

    Truncating the step law to [0, cap] leaves every entry exact.
    """

    if j < 0:
        raise ParameterError("j must be non-negative.")
    if not 0 <= cap <= _MAX_SUPPORT:
        raise SupportCapError(f"support cap {cap} exceeds {_MAX_SUPPORT}.")
    result = np.zeros(cap + 1)
    result[0] = 1.0
    base = law.pmf(cap)
    power = j
    while power:
        if power & 1:
            result = _convolve(result, base, cap)
        power >>= 1
        if power:
            base = _convolve(base, base, cap)
    return result


@lru_cache(maxsize=64)
def _walk_at(law: OffspringLaw, j: int, cap: int) -> NDArray[np.float64]:
    return walk_pmf(law, j, cap)


def conditioning_probability(law: OffspringLaw, n: int) -> float:
    """P(Xi_n = n - 1)."""

    return float(_walk_at(law, n, n - 1)[n - 1])


# -- degree sequences -----------------------------------------------------------


@dataclass(frozen=True)
class DegreeSequence:
    """Out-degrees D_1..D_n with sum n - 1."""

    entries: NDArray[np.int64]
    trials: int = field(default=0, compare=False)

    def __post_init__(self) -> None:
        entries = np.asarray(self.entries, dtype=np.int64)
        object.__setattr__(self, "entries", entries)
        if entries.ndim != 1 or entries.size < 1:
            raise ParameterError("a degree sequence needs at least one entry.")
        if np.any(entries < 0) or int(entries.sum()) != entries.size - 1:
            raise ParameterError("degrees must be non-negative with sum n - 1.")

    @property
    def n(self) -> int:
        return int(self.entries.size)

    @property
    def internal(self) -> int:
        """N^n, the number of nonzero entries."""

        return int(np.count_nonzero(self.entries))


def sample_conditioned_degrees(
    law: OffspringLaw, n: int, rng: np.random.Generator
) -> DegreeSequence:
    """n i.i.d. copies of xi conditioned on their sum being n - 1 (rejection)."""

    if n < 1:
        raise ParameterError("n must be at least 1.")
    if n == 1:
        return DegreeSequence(np.zeros(1, dtype=np.int64), trials=1)
    if conditioning_probability(law, n) <= 0.0:
        raise ParameterError(f"P(Xi_n = n - 1) vanishes for n={n} under {law.name}.")
    block = max(1, _REJECTION_BLOCK // n)
    trials = 0
    while True:
        draws = law.sample(rng, (block, n))
        hits = np.flatnonzero(draws.sum(axis=1) == n - 1)
        if hits.size:
            trials += int(hits[0]) + 1
            logger.debug("conditioned degrees for n=%d after %d trials", n, trials)
            return DegreeSequence(draws[hits[0]], trials=trials)
        trials += block


def size_biased_reorder(
    degrees: DegreeSequence | ArrayLike, rng: np.random.Generator
) -> tuple[NDArray[np.int64], NDArray[np.int64]]:
    """Size-biased random order of the nonzero entries, zeros appended.

    Returns (D-hat, Sigma) with Sigma the 1-based labels in D-hat order.
    Exponential clocks E_i / D_i sorted ascending give sampling without
    replacement proportional to D_i.
    """

    entries = (
        degrees.entries
        if isinstance(degrees, DegreeSequence)
        else np.asarray(degrees, dtype=np.int64)
    )
    positive = np.flatnonzero(entries > 0)
    clocks = rng.standard_exponential(positive.size) / entries[positive]
    order = positive[np.argsort(clocks, kind="stable")]
    zeros = rng.permutation(np.flatnonzero(entries == 0))
    sigma = np.concatenate([order, zeros]).astype(np.int64)
    return entries[sigma], sigma + 1


# -- reverse Prufer codec ---------------------------------------------------------


@dataclass(frozen=True)
class Codeword:
    entries: tuple[int, ...]

    def __post_init__(self) -> None:
        n = len(self.entries) + 1
        for value in self.entries:
            if not 1 <= value <= n:
                raise CodewordError(f"codeword entry {value} is outside [1, {n}].")

    @classmethod
    def of(cls, values: ArrayLike) -> Codeword:
        return cls(tuple(int(v) for v in np.asarray(values).ravel()))

    @property
    def n(self) -> int:
        return len(self.entries) + 1

    def multiplicities(self) -> NDArray[np.int64]:
        labels = np.asarray(self.entries, dtype=np.int64) - 1
        return np.bincount(labels, minlength=self.n)


@dataclass(frozen=True)
class RootedLabelledTree:
    """``parents[i - 1]`` is the parent label of vertex i, 0 for the root."""

    parents: tuple[int, ...]
    root: int

    def __post_init__(self) -> None:
        n = len(self.parents)
        if n < 1 or not 1 <= self.root <= n or self.parents[self.root - 1] != 0:
            raise TreeStructureError("the root must be the only vertex without parent.")
        for label, parent in enumerate(self.parents, start=1):
            if label != self.root and not 1 <= parent <= n:
                raise TreeStructureError(f"vertex {label} has invalid parent {parent}.")
        if _has_cycle(self.parents, self.root):
            raise TreeStructureError("parent pointers do not reach the root.")

    @property
    def n(self) -> int:
        return len(self.parents)

    def out_degrees(self) -> NDArray[np.int64]:
        parents = np.asarray(self.parents, dtype=np.int64)
        return np.bincount(parents[parents > 0] - 1, minlength=self.n)

    def children(self) -> list[list[int]]:
        """Children labels of every vertex, in increasing label order."""

        lists: list[list[int]] = [[] for _ in range(self.n)]
        for label, parent in enumerate(self.parents, start=1):
            if parent:
                lists[parent - 1].append(label)
        return lists

    def depths(self) -> NDArray[np.int64]:
        depth = np.full(self.n, -1, dtype=np.int64)
        depth[self.root - 1] = 0
        stack = [self.root]
        children = self.children()
        while stack:
            label = stack.pop()
            for child in children[label - 1]:
                depth[child - 1] = depth[label - 1] + 1
                stack.append(child)
        return depth

    @property
    def height(self) -> int:
        return int(self.depths().max())


def _has_cycle(parents: tuple[int, ...], root: int) -> bool:
    n = len(parents)
    state = np.zeros(n + 1, dtype=np.int8)
    state[root] = 2
    for start in range(1, n + 1):
        path = []
        label = start
        while state[label] == 0:
            state[label] = 1
            path.append(label)
            label = parents[label - 1]
        if state[label] == 1:
            return True
        state[path] = 2
    return False


def prufer_decode(codeword: Codeword | ArrayLike) -> RootedLabelledTree:
    """Glue the branches (w_{C_{k-1}}, ..., w_{C_k - 1}, L_k) into a tree."""

    word = codeword if isinstance(codeword, Codeword) else Codeword.of(codeword)
    n = word.n
    if n < 2:
        raise CodewordError("a codeword needs at least one entry.")
    w = word.entries
    parents = [0] * (n + 1)
    in_tree = [False] * (n + 2)
    in_tree[n + 1] = True
    seen = [False] * (n + 1)
    is_leaf_end = [False] * (n + 1)
    root = w[0]
    in_tree[root] = True
    seen[root] = True
    pointer = 1

    def next_leaf_end() -> int:
        nonlocal pointer
        while in_tree[pointer]:
            pointer += 1
        is_leaf_end[pointer] = True
        return pointer

    leaf_end = next_leaf_end()
    tail = root
    for label in w[1:]:
        if seen[label] or is_leaf_end[label]:
            parents[leaf_end] = tail
            in_tree[leaf_end] = True
            leaf_end = next_leaf_end()
        else:
            parents[label] = tail
            in_tree[label] = True
        tail = label
        seen[label] = True
    parents[leaf_end] = tail
    return RootedLabelledTree(tuple(parents[1:]), root)


def prufer_encode(tree: RootedLabelledTree) -> Codeword:
    """Reveal root-to-leaf paths towards the smallest unrevealed label."""

    n = tree.n
    revealed = [False] * (n + 2)
    revealed[tree.root] = True
    revealed[n + 1] = True
    entries: list[int] = []
    pointer = 1
    while True:
        while revealed[pointer]:
            pointer += 1
        if pointer > n:
            break
        path = []
        label = tree.parents[pointer - 1]
        revealed[pointer] = True
        while True:
            path.append(label)
            if revealed[label]:
                break
            revealed[label] = True
            label = tree.parents[label - 1]
        entries.extend(reversed(path))
    if len(entries) != n - 1:
        raise TreeStructureError("encoding did not produce n - 1 entries.")
    return Codeword(tuple(entries))


def codeword_from_degrees(
    degrees: DegreeSequence | ArrayLike, rng: np.random.Generator
) -> Codeword:
    """A uniform element of the codewords with the given label multiplicities."""

    entries = (
        degrees.entries
        if isinstance(degrees, DegreeSequence)
        else np.asarray(degrees, dtype=np.int64)
    )
    labels = np.repeat(np.arange(1, entries.size + 1), entries)
    return Codeword.of(rng.permutation(labels))


def first_appearance_reorder(
    codeword: Codeword, degrees: DegreeSequence | ArrayLike
) -> tuple[NDArray[np.int64], NDArray[np.int64]]:
    """(D-hat, Sigma) from first appearances of labels in the codeword."""

    entries = (
        degrees.entries
        if isinstance(degrees, DegreeSequence)
        else np.asarray(degrees, dtype=np.int64)
    )
    _, first = np.unique(np.asarray(codeword.entries), return_index=True)
    sigma = np.asarray(codeword.entries)[np.sort(first)]
    d_hat = np.zeros(entries.size, dtype=np.int64)
    d_hat[: sigma.size] = entries[sigma - 1]
    return d_hat, sigma.astype(np.int64)


# -- ordered trees ----------------------------------------------------------------


@dataclass(frozen=True)
class OrderedTree:
    """A rooted ordered tree identified by its preorder out-degrees."""

    degrees: tuple[int, ...]

    def __post_init__(self) -> None:
        excursion = np.cumsum(np.asarray(self.degrees) - 1)
        if excursion.size == 0 or excursion[-1] != -1 or np.any(excursion[:-1] < 0):
            raise TreeStructureError("preorder degrees do not encode a tree.")

    @property
    def n(self) -> int:
        return len(self.degrees)


def randomize_order(
    tree: RootedLabelledTree, rng: np.random.Generator
) -> OrderedTree:
    """Independent uniform child orders, then forget the labels."""

    children = [rng.permutation(c).tolist() if c else [] for c in tree.children()]
    degrees = []
    stack = [tree.root]
    while stack:
        label = stack.pop()
        kids = children[label - 1]
        degrees.append(len(kids))
        stack.extend(reversed(kids))
    return OrderedTree(tuple(degrees))


def sample_bienayme_via_codeword(
    law: OffspringLaw, n: int, rng: np.random.Generator
) -> OrderedTree:
    degrees = sample_conditioned_degrees(law, n, rng)
    tree = prufer_decode(codeword_from_degrees(degrees, rng))
    return randomize_order(tree, rng)


# -- growth algorithm ---------------------------------------------------------------


@dataclass(frozen=True)
class GrowthTrace:
    """Per-step record of the half-edge growth algorithm.

    Index k of ``events``, ``active`` refers to step k + 1; ``half_edges`` and
    ``dormant`` hold #H_k and #Z_k for k = 0..n-1.
    ``attach_steps`` is J_i, the creation step of the owner of the half-edge
    closed at C_i; ``attach_revealed`` is the step its degree was revealed,
    later than creation plus one only for activated vertices.
    """

    n: int
    events: NDArray[np.int8]
    half_edges: NDArray[np.int64]
    dormant: NDArray[np.int64]
    active: NDArray[np.int64]
    branch_steps: NDArray[np.int64]
    attach_steps: NDArray[np.int64]
    attach_revealed: NDArray[np.int64]
    reveal_step: NDArray[np.int64]

    @property
    def activations(self) -> int:
        return int(np.count_nonzero(self.events == ACTIVATION))

    def first_activation(self) -> int | None:
        hits = np.flatnonzero(self.events == ACTIVATION)
        return int(hits[0]) + 1 if hits.size else None

    def activated_before(self, step: int) -> bool:
        """Whether an activation event happened at some step j < step."""

        return bool(np.any(self.events[: max(step - 1, 0)] == ACTIVATION))

    def branch_time(self, i: int) -> float:
        """C_i, or infinity when fewer than i branching events happened."""

        if i > self.branch_steps.size:
            return math.inf
        return float(self.branch_steps[i - 1])


def grow_tree(
    n: int,
    d_hat: ArrayLike,
    rng: np.random.Generator,
    check_invariants: bool = True,
) -> tuple[RootedLabelledTree, GrowthTrace]:
    """Run the growth / branching / activation algorithm on a size-biased D-hat."""

    d_hat = np.asarray(d_hat, dtype=np.int64)
    if d_hat.size != n or int(d_hat.sum()) != n - 1:
        raise ParameterError("D-hat must have n entries summing to n - 1.")
    parents = np.full(n, -1, dtype=np.int64)
    reveal_step = np.zeros(n, dtype=np.int64)
    events = np.zeros(max(n - 1, 0), dtype=np.int8)
    active_trace = np.zeros(max(n - 1, 0), dtype=np.int64)
    half_counts = np.zeros(n, dtype=np.int64)
    dormant_counts = np.zeros(n, dtype=np.int64)
    half_edges: list[int] = []
    dormant: list[int] = []
    branch_steps: list[int] = []
    attach_steps: list[int] = []
    attach_revealed: list[int] = []
    active = 0
    revealed = 0
    half_total = 0

    def reveal(owner: int, step: int) -> None:
        nonlocal revealed, half_total
        degree = int(d_hat[revealed])
        if degree < 1:
            raise InvariantViolationError(f"revealed a zero degree at step {step}.")
        revealed += 1
        half_total += degree - 1
        half_edges.extend([owner] * (degree - 1))
        reveal_step[owner] = step

    for step in range(1, n):
        remaining = n - step
        draw = rng.random() * remaining
        if draw < len(half_edges):
            slot = int(draw)
            owner = half_edges[slot]
            half_edges[slot] = half_edges[-1]
            half_edges.pop()
            parents[step] = owner
            dormant.append(active)
            branch_steps.append(step)
            attach_steps.append(owner)
            attach_revealed.append(int(reveal_step[owner]))
            events[step - 1] = BRANCHING
        elif dormant and rng.random() * (remaining + len(dormant)) < len(dormant):
            slot = int(rng.integers(len(dormant)))
            woken = dormant[slot]
            dormant[slot] = dormant[-1]
            dormant.pop()
            reveal(woken, step)
            parents[step] = woken
            dormant.append(active)
            events[step - 1] = ACTIVATION
        else:
            reveal(active, step)
            parents[step] = active
            events[step - 1] = GROWTH
        active = step
        active_trace[step - 1] = active
        half_counts[step] = len(half_edges)
        dormant_counts[step] = len(dormant)
        if check_invariants and (
            revealed != step - len(dormant)
            or len(half_edges) != half_total - len(dormant)
            or len(half_edges) > n - step - 1
        ):
            raise InvariantViolationError(f"half-edge identity fails at step {step}.")

    if half_edges:
        raise InvariantViolationError("half-edges remain after the last step.")
    labels = tuple(int(p) + 1 if p >= 0 else 0 for p in parents)
    tree = RootedLabelledTree(labels, 1)
    trace = GrowthTrace(
        n=n,
        events=events,
        half_edges=half_counts,
        dormant=dormant_counts,
        active=active_trace,
        branch_steps=np.asarray(branch_steps, dtype=np.int64),
        attach_steps=np.asarray(attach_steps, dtype=np.int64),
        attach_revealed=np.asarray(attach_revealed, dtype=np.int64),
        reveal_step=reveal_step,
    )
    return tree, trace


def sample_growth_tree(
    law: OffspringLaw, n: int, rng: np.random.Generator
) -> tuple[RootedLabelledTree, GrowthTrace, NDArray[np.int64]]:
    degrees = sample_conditioned_degrees(law, n, rng)
    d_hat, _ = size_biased_reorder(degrees, rng)
    tree, trace = grow_tree(n, d_hat, rng)
    return tree, trace, d_hat


def first_stick_survival(d_hat: ArrayLike, k: int, n: int) -> float:
    """P(the first k steps are all growth events | D-hat)."""

    if not 0 <= k <= n - 1:
        raise ParameterError("k must lie in [0, n - 1].")
    excess = np.concatenate([[0], np.cumsum(np.asarray(d_hat[:k], dtype=float) - 1)])
    j = np.arange(1, k + 1)
    factors = 1.0 - excess[:k] / (n - j)
    return float(np.prod(np.clip(factors, 0.0, 1.0)))


def rescaled_cumulative_degrees(
    d_hat: ArrayLike, law: OffspringLaw, n: int, t: float
) -> float:
    """(1/a_n) sum_{i <= m_n t} D-hat_i."""

    if t < 0:
        raise ParameterError("t must be non-negative.")
    steps = int(math.floor(law.m_n(n) * t))
    head = np.asarray(d_hat, dtype=float)[:steps]
    return float(head.sum() / law.a_n(n))


# -- measure change -------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class ThetaWeights:
    """Theta_m^n for prefixes of length m, evaluated in log space."""

    law: OffspringLaw
    n: int
    m: int

    def __post_init__(self) -> None:
        if not 0 <= self.m < self.n:
            raise ParameterError("theta weights need 0 <= m < n.")

    @property
    def _log_tables(self) -> tuple[NDArray[np.float64], float]:
        return _theta_tables(self.law, self.n, self.m)

    def log_theta(self, prefixes: ArrayLike) -> NDArray[np.float64]:
        k = np.atleast_2d(np.asarray(prefixes, dtype=np.int64))
        if k.shape[1] != self.m:
            raise ParameterError(f"prefixes must have length {self.m}.")
        if np.any(k < 1):
            raise ParameterError("prefix entries must be at least 1.")
        k = np.minimum(k, self.n)
        log_rest, log_total = self._log_tables
        partial_sums = np.cumsum(k, axis=1)
        total = partial_sums[:, -1] if self.m else np.zeros(k.shape[0], dtype=np.int64)
        feasible = total <= self.n - 1
        before = np.concatenate(
            [np.zeros((k.shape[0], 1), dtype=np.int64), partial_sums[:, :-1]], axis=1
        )
        i = np.arange(1, self.m + 1)
        with np.errstate(divide="ignore", invalid="ignore"):
            log_product = np.sum(
                np.log(self.n - i + 1.0) - np.log(self.n - 1.0 - before), axis=1
            )
            remainder = np.clip(self.n - 1 - total, 0, self.n - 1)
            out = log_rest[remainder] - log_total + log_product
        return np.where(feasible, out, -np.inf)

    def theta(self, prefix: ArrayLike) -> float | NDArray[np.float64]:
        values = np.exp(self.log_theta(prefix))
        return float(values[0]) if np.ndim(prefix) <= 1 else values


@lru_cache(maxsize=32)
def _theta_tables(law: OffspringLaw, n: int, m: int) -> tuple[NDArray, float]:
    with np.errstate(divide="ignore"):
        log_rest = np.log(_walk_at(law, n - m, n - 1))
    total = conditioning_probability(law, n)
    if total <= 0.0:
        raise ParameterError(f"P(Xi_n = n - 1) vanishes for n={n}.")
    return log_rest, math.log(total)


def theta_weight(prefix: ArrayLike, n: int, law: OffspringLaw) -> float:
    prefix_arr = np.asarray(prefix, dtype=np.int64).ravel()
    if prefix_arr.size and int(prefix_arr.sum()) > n - 1:
        return 0.0
    return float(ThetaWeights(law, n, prefix_arr.size).theta(prefix_arr))


def sample_theta_prefixes(
    law: OffspringLaw,
    n: int,
    m: int,
    replicas: int,
    rng: np.random.Generator,
) -> tuple[NDArray[np.int64], NDArray[np.float64]]:
    """i.i.d. size-biased prefixes (xi*_1..xi*_m) and their Theta weights."""

    prefixes = law.sample_size_biased(rng, (replicas, m))
    return prefixes, np.exp(ThetaWeights(law, n, m).log_theta(prefixes))


def prob_internal_at_least(law: OffspringLaw, n: int, m: int) -> float:
    """Exact P(N^n >= m) for n i.i.d. copies of xi conditioned to sum n - 1.

    Sums over the number r of nonzero entries: a Binomial(n, 1 - p_0) count
    times the r-fold convolution of the law of xi given xi >= 1.
    """

    p0 = law.p_zero
    positive = law.pmf(n - 1)
    positive[0] = 0.0
    positive /= 1.0 - p0
    total = conditioning_probability(law, n)
    current = np.zeros(n)
    current[0] = 1.0
    accumulated = 0.0
    for r in range(1, n):
        current = _convolve(current, positive, n - 1)
        if r >= m and current[n - 1] > 0:
            accumulated += math.exp(
                stats.binom.logpmf(r, n, 1.0 - p0) + math.log(current[n - 1])
            )
    return accumulated / total


# -- statistics ----------------------------------------------------------------


@dataclass(frozen=True)
class TreeStatistics:
    height: int
    branch_steps: tuple[float, ...]
    attach_steps: tuple[float, ...]
    spanned_size: int
    components: NDArray[np.int64]
    size_biased_pick: float | None
    size_biased_mean: float | None
    top_degrees: NDArray[np.int64]


def subtree_sizes(tree: RootedLabelledTree) -> NDArray[np.int64]:
    """Number of descendants (inclusive) of every label."""

    sizes = np.ones(tree.n, dtype=np.int64)
    depth = tree.depths()
    for label in np.argsort(-depth, kind="stable") + 1:
        parent = tree.parents[label - 1]
        if parent:
            sizes[parent - 1] += sizes[label - 1]
    return sizes


def tree_statistics(
    tree: RootedLabelledTree,
    trace: GrowthTrace,
    k: int,
    rng: np.random.Generator | None = None,
) -> TreeStatistics:
    """Statistics of a grown tree relative to the first k branching steps.

    T^n(k) consists of the vertices created before step C_k (the whole tree
    when fewer than k branchings happened); the components are the subtrees
    of T^n hanging off T^n(k).
    """

    if k < 1:
        raise ParameterError("k must be at least 1.")
    n = tree.n
    cutoff = int(trace.branch_steps[k - 1]) if k <= trace.branch_steps.size else n
    labels = np.arange(1, n + 1)
    parents = np.asarray(tree.parents, dtype=np.int64)
    hanging = (labels - 1 >= cutoff) & (parents >= 1) & (parents - 1 < cutoff)
    components = subtree_sizes(tree)[hanging]
    pick = mean = None
    if components.size:
        mass = components.sum()
        mean = float((components**2).sum() / (mass * n))
        if rng is not None:
            pick = float(rng.choice(components, p=components / mass) / n)
    degrees = np.sort(tree.out_degrees())[::-1][:k]
    return TreeStatistics(
        height=tree.height,
        branch_steps=tuple(trace.branch_time(i) for i in range(1, k + 1)),
        attach_steps=tuple(
            float(trace.attach_steps[i - 1])
            if i <= trace.attach_steps.size
            else math.inf
            for i in range(1, k + 1)
        ),
        spanned_size=cutoff,
        components=components,
        size_biased_pick=pick,
        size_biased_mean=mean,
        top_degrees=degrees,
    )


def beta_component_mean(alpha: float, k: int) -> float:
    """Mean of Beta(1 - 1/alpha, k)."""

    beta = 1.0 - 1.0 / alpha
    return beta / (k + beta)


# -- size-biased point process --------------------------------------------------


@dataclass(frozen=True)
class SizeBiasedPointProcess:
    """Points (E_g / Y_g, Y_g) sorted by time; S(t) = sum Y_g 1{E_g <= Y_g t}."""

    times: NDArray[np.float64]
    values: NDArray[np.float64]
    indices: NDArray[np.int64]

    def cumulative(self, t: float | ArrayLike) -> NDArray[np.float64] | float:
        totals = np.concatenate([[0.0], np.cumsum(self.values)])
        out = totals[np.searchsorted(self.times, np.asarray(t), side="right")]
        return float(out) if np.ndim(out) == 0 else out


def size_biased_point_process(
    values: ArrayLike, rng: np.random.Generator
) -> SizeBiasedPointProcess:
    y = np.asarray(values, dtype=float)
    positive = np.flatnonzero(y > 0)
    times = rng.standard_exponential(positive.size) / y[positive]
    order = np.argsort(times, kind="stable")
    return SizeBiasedPointProcess(
        times[order], y[positive][order], positive[order].astype(np.int64)
    )


OffspringName = Literal["stable", "uniform012"]


def offspring_by_name(name: OffspringName, alpha: float) -> OffspringLaw:
    if name == "stable":
        return stable_offspring(alpha)
    if name == "uniform012":
        return uniform_offspring()
    raise ParameterError(f"unknown offspring law {name!r}.")
