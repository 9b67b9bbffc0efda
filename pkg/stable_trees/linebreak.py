"""Line-breaking construction of R-trees driven by an intensity process.

Given a nondecreasing intensity tau, cut points Y_1 < Y_2 < ... are the arrival
times of a Poisson process with rate tau_t dt on the half-line. The segment
(Y_j, Y_{j+1}] is glued at Z_j = inf{t : tau_t > U_j tau(Y_j-)}, so jumps of
tau act as atoms that attract branches while the drift part spreads them
uniformly. tau_t = t gives the Brownian CRT, tau_t = theta_0**2 t + sum of
jumps at exponential times gives an ICRT, and the tilted subordinator gives
the stable tree.
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, field
from functools import partial
from typing import Any, Callable, Literal, Sequence

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy import special

from stable_trees.errors import ParameterError, TreeStructureError
from stable_trees.levy_paths import (
    Estimate,
    JumpPath,
    WeightedAccumulator,
    WeightedSample,
    log_martingale_weights,
    sample_subordinator_batch,
)
from stable_trees.parallel import SeedLike, run_chunked
from stable_trees.stable_density import StableModel

logger = logging.getLogger(__name__)

WeightAt = Literal["stopping", "horizon"]


@dataclass(frozen=True)
class IntensityPath:
    """tau(t) = drift t + sum of jumps at times <= t, on [0, horizon]."""

    drift: float
    times: NDArray[np.float64]
    sizes: NDArray[np.float64]
    horizon: float

    def __post_init__(self) -> None:
        times = np.asarray(self.times, dtype=float)
        sizes = np.asarray(self.sizes, dtype=float)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "sizes", sizes)
        if self.drift < 0:
            raise ParameterError("drift must be non-negative.")
        if self.horizon <= 0:
            raise ParameterError("horizon must be positive.")
        if times.shape != sizes.shape or np.any(sizes <= 0):
            raise ParameterError("jumps need one positive size per time.")
        if times.size and (times[0] < 0 or times[-1] > self.horizon):
            raise ParameterError("jump times must lie in [0, horizon].")
        if np.any(np.diff(times) <= 0):
            raise ParameterError("jump times must be strictly increasing.")

    @classmethod
    def from_jumps(
        cls, drift: float, jumps: Sequence[tuple[float, float]], horizon: float
    ) -> IntensityPath:
        pairs = sorted(jumps)
        return cls(
            drift,
            np.array([s for s, _ in pairs], dtype=float),
            np.array([x for _, x in pairs], dtype=float),
            horizon,
        )

    @classmethod
    def from_jump_path(cls, path: JumpPath) -> IntensityPath:
        return cls(path.drift, path.times, path.sizes, path.horizon)

    @property
    def _knots(self) -> tuple[NDArray, NDArray, NDArray, NDArray]:
        knots = np.concatenate([[0.0], self.times])
        slopes = np.concatenate([[0.0], np.cumsum(self.sizes)])
        offsets = np.concatenate([[0.0], np.cumsum(self.sizes * self.times)])
        hazard = 0.5 * self.drift * knots**2 + slopes * knots - offsets
        return knots, slopes, offsets, hazard

    def tau(self, t: float) -> float:
        return self.drift * t + float(self.sizes[self.times <= t].sum())

    def tau_left(self, t: float) -> float:
        """tau(t-)."""

        return self.drift * t + float(self.sizes[self.times < t].sum())

    def cumulative_hazard(self, t: float) -> float:
        """Lambda(t) = drift t**2/2 + sum x_i (t - s_i)+."""

        before = self.times <= t
        return 0.5 * self.drift * t * t + float(
            (self.sizes[before] * (t - self.times[before])).sum()
        )

    def inverse_hazard(self, values: ArrayLike) -> NDArray[np.float64]:
        """Lambda^{-1}, solved in closed form on each piece."""

        v = np.asarray(values, dtype=float)
        knots, slopes, offsets, hazard = self._knots
        piece = np.searchsorted(hazard, v, side="right") - 1
        s, a = slopes[piece], offsets[piece] + v
        root = np.sqrt(s * s + 2.0 * self.drift * a)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.where(s + root > 0, 2.0 * a / (s + root), knots[piece])
        return out


@dataclass(frozen=True)
class CutPoints:
    values: NDArray[np.float64]
    requested: int

    @property
    def complete(self) -> bool:
        return self.values.size == self.requested

    @property
    def shortfall(self) -> int:
        return self.requested - self.values.size


def sample_cut_points(
    intensity: IntensityPath, count: int, rng: np.random.Generator
) -> CutPoints:
    """First ``count`` arrivals of the Poisson process with rate tau_t dt.

    Arrivals beyond the horizon are dropped and reported by ``shortfall``.
    """

    if count < 1:
        raise ParameterError("count must be at least 1.")
    epochs = np.cumsum(rng.standard_exponential(count))
    reachable = epochs[epochs <= intensity.cumulative_hazard(intensity.horizon)]
    return CutPoints(intensity.inverse_hazard(reachable), count)


def sample_attachment(intensity: IntensityPath, y: float, u: float) -> float:
    """inf{t : tau(t) > u tau(y-)}."""

    if not 0.0 <= u < 1.0:
        raise ParameterError("u must lie in [0, 1).")
    level = intensity.tau_left(y)
    if level <= 0:
        raise ParameterError(f"tau vanishes before y={y}; no attachment exists.")
    threshold = u * level
    mask = intensity.times < y
    times, sizes = intensity.times[mask], intensity.sizes[mask]
    totals = np.cumsum(sizes)
    after = intensity.drift * times + totals
    crossed = np.flatnonzero(after > threshold)
    if crossed.size:
        first = int(crossed[0])
        previous = float(totals[first - 1]) if first else 0.0
        before_jump = intensity.drift * times[first] + previous
        if intensity.drift > 0 and before_jump > threshold:
            return (threshold - previous) / intensity.drift
        return float(times[first])
    previous = float(totals[-1]) if totals.size else 0.0
    return (threshold - previous) / intensity.drift


def attachment_coverage(
    intensity: IntensityPath, y: float, z: float, u: float
) -> bool:
    """tau(z-) <= u tau(y-) <= tau(z)."""

    level = u * intensity.tau_left(y)
    tolerance = 1e-12 * max(1.0, level)
    return (
        intensity.tau_left(z) <= level + tolerance
        and level <= intensity.tau(z) + tolerance
    )


@dataclass(frozen=True)
class LineBreakTree:
    """Segments [0, y_1], (y_1, y_2], ... glued at the attachment points.

    ``attachments[j - 1]`` is where segment ``j`` hangs and ``parents[j]`` is
    the segment containing it; ``parents[0]`` is -1.
    """

    cuts: NDArray[np.float64]
    attachments: NDArray[np.float64]
    parents: NDArray[np.int64]

    @property
    def k(self) -> int:
        return int(self.cuts.size)

    @property
    def total_length(self) -> float:
        return float(self.cuts[-1])

    def segment_of(self, position: float) -> int:
        if position < 0 or position > self.cuts[-1]:
            raise ParameterError(
                f"position {position} is outside [0, {self.total_length}]."
            )
        return int(np.searchsorted(self.cuts, position, side="left"))

    def to_dict(self) -> dict[str, list[float] | list[int]]:
        return {
            "cuts": self.cuts.tolist(),
            "attachments": self.attachments.tolist(),
            "parents": self.parents.tolist(),
        }


def build_tree(cuts: ArrayLike, attachments: ArrayLike) -> LineBreakTree:
    cut_arr = np.asarray(cuts, dtype=float)
    attach_arr = np.asarray(attachments, dtype=float)
    if cut_arr.ndim != 1 or cut_arr.size < 1:
        raise TreeStructureError("a tree needs at least one cut point.")
    if attach_arr.size != cut_arr.size - 1:
        raise TreeStructureError("expected one attachment per cut after the first.")
    if cut_arr[0] <= 0 or np.any(np.diff(cut_arr) <= 0):
        raise TreeStructureError("cut points must be positive and increasing.")
    if np.any(attach_arr < 0) or np.any(attach_arr >= cut_arr[:-1]):
        raise TreeStructureError("each attachment must precede its cut point.")
    parents = np.concatenate(
        [[-1], np.searchsorted(cut_arr, attach_arr, side="left")]
    ).astype(np.int64)
    return LineBreakTree(cut_arr, attach_arr, parents)


def distance(tree: LineBreakTree, u: float, v: float) -> float:
    """Tree distance between positions u and v of the cut half-line."""

    seg_u, seg_v = tree.segment_of(u), tree.segment_of(v)
    total = 0.0
    while seg_u != seg_v:
        if seg_u > seg_v:
            total += u - tree.cuts[seg_u - 1]
            u, seg_u = tree.attachments[seg_u - 1], int(tree.parents[seg_u])
        else:
            total += v - tree.cuts[seg_v - 1]
            v, seg_v = tree.attachments[seg_v - 1], int(tree.parents[seg_v])
    return float(total + abs(u - v))


def segment_lengths(tree: LineBreakTree) -> NDArray[np.float64]:
    return np.diff(np.concatenate([[0.0], tree.cuts]))


def empirical_measure_distances(
    tree: LineBreakTree,
) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    """Pairwise distances between the cut points and from the root to each."""

    k = tree.k
    matrix = np.zeros((k, k))
    for i, j in itertools.combinations(range(k), 2):
        matrix[i, j] = matrix[j, i] = distance(tree, tree.cuts[i], tree.cuts[j])
    root = np.array([distance(tree, 0.0, y) for y in tree.cuts])
    return matrix, root


def tree_height(tree: LineBreakTree) -> float:
    return float(empirical_measure_distances(tree)[1].max())


def with_root(matrix: NDArray[np.float64], root: NDArray[np.float64]) -> NDArray:
    """Distance matrix over {root, Y_1, ..., Y_k}."""

    full = np.zeros((matrix.shape[0] + 1,) * 2)
    full[1:, 1:] = matrix
    full[0, 1:] = full[1:, 0] = root
    return full


def four_point_violation(matrix: NDArray[np.float64]) -> float:
    """Largest gap between the two largest pair sums over all quadruples."""

    n = matrix.shape[0]
    if n < 4:
        return 0.0
    quads = np.array(list(itertools.combinations(range(n), 4)))
    i, j, k, m = quads.T
    sums = np.sort(
        np.column_stack(
            [
                matrix[i, j] + matrix[k, m],
                matrix[i, k] + matrix[j, m],
                matrix[i, m] + matrix[j, k],
            ]
        ),
        axis=1,
    )
    return float((sums[:, 2] - sums[:, 1]).max())


def satisfies_four_point(matrix: NDArray[np.float64], tolerance: float = 1e-9) -> bool:
    return four_point_violation(matrix) <= tolerance * max(1.0, float(matrix.max()))


def triangle_violation(matrix: NDArray[np.float64]) -> float:
    through = matrix[:, :, None] + matrix[None, :, :]
    return float(np.max(matrix[:, None, :] - through))


def crt_intensity(
    rng: np.random.Generator | None = None, *, horizon: float = 50.0
) -> IntensityPath:
    """tau_t = t, the Brownian CRT."""

    return IntensityPath(1.0, np.empty(0), np.empty(0), horizon)


def icrt_intensity(
    theta0: float,
    thetas: ArrayLike,
    rng: np.random.Generator,
    *,
    horizon: float = 50.0,
) -> IntensityPath:
    """tau_t = theta0**2 t + sum theta_i 1{E_i <= t}, E_i ~ Exp(theta_i)."""

    theta = np.asarray(thetas, dtype=float)
    if theta0 < 0 or np.any(theta <= 0):
        raise ParameterError("theta0 must be >= 0 and every theta_i positive.")
    if np.any(np.diff(theta) > 0):
        raise ParameterError("thetas must be nonincreasing.")
    if theta0 == 0 and theta.size == 0:
        raise ParameterError("the intensity must not vanish identically.")
    times = rng.standard_exponential(theta.size) / theta
    keep = times <= horizon
    order = np.argsort(times[keep])
    return IntensityPath(
        theta0**2, times[keep][order], theta[keep][order], horizon
    )


def break_line(
    intensity: IntensityPath, k: int, rng: np.random.Generator
) -> tuple[LineBreakTree | None, bool]:
    """Cuts and attachments for up to k segments; False when the horizon ran out."""

    cuts = sample_cut_points(intensity, k, rng)
    if cuts.values.size == 0:
        return None, False
    uniforms = rng.random(cuts.values.size - 1)
    attachments = [
        sample_attachment(intensity, y, u) for y, u in zip(cuts.values[1:], uniforms)
    ]
    return build_tree(cuts.values, attachments), cuts.complete


@dataclass
class WeightedTreeEnsemble:
    """Weighted replicas of a line-breaking tree with their provenance."""

    samples: list[WeightedSample]
    provenance: dict[str, Any] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.samples)

    @property
    def weights(self) -> NDArray[np.float64]:
        return np.array([sample.weight for sample in self.samples])

    @property
    def complete(self) -> NDArray[np.bool_]:
        return np.array([sample.indicator for sample in self.samples])

    def estimate(
        self,
        statistic: Callable[[Any], float],
        *,
        complete_only: bool = True,
    ) -> Estimate:
        """Mean of weight * statistic(tree), zero on incomplete replicas.

        With ``complete_only=False`` the statistic also sees truncated trees
        (or None when no cut fell before the horizon).
        """

        values = np.array(
            [
                float(statistic(s.payload)) if s.indicator or not complete_only else 0.0
                for s in self.samples
            ]
        )
        accumulator = WeightedAccumulator()
        with np.errstate(divide="ignore"):
            accumulator.add(np.log(self.weights), values)
        return accumulator.estimate()

    def weight_estimate(self) -> Estimate:
        return self.estimate(lambda tree: 1.0, complete_only=False)

    def missing_mass(self) -> Estimate:
        """Weighted probability that fewer than k cuts fell before the horizon."""

        incomplete = (~self.complete).astype(float)
        accumulator = WeightedAccumulator()
        with np.errstate(divide="ignore"):
            accumulator.add(np.log(self.weights), incomplete)
        return accumulator.estimate()

    def first_cut_survival(self, t: float) -> Estimate:
        return self.estimate(
            lambda tree: tree is None or tree.cuts[0] >= t, complete_only=False
        )

    def to_dict(self) -> dict[str, Any]:
        trees = []
        for sample in self.samples:
            entry: dict[str, Any] = (
                sample.payload.to_dict()
                if sample.payload is not None
                else {"cuts": [], "attachments": [], "parents": []}
            )
            entry["weight"] = sample.weight
            entry["complete"] = bool(sample.indicator)
            trees.append(entry)
        return {**self.provenance, "trees": trees}


def _stable_tree_chunk(
    count: int,
    rng: np.random.Generator,
    *,
    model: StableModel,
    k: int,
    horizon: float,
    epsilon: float,
    weight_at: WeightAt,
) -> list[WeightedSample]:
    batch = sample_subordinator_batch(model, horizon, epsilon, count, rng)
    trees: list[LineBreakTree | None] = []
    complete = np.zeros(count, dtype=bool)
    stops = np.full(count, horizon)
    for index in range(count):
        intensity = IntensityPath.from_jump_path(batch.path(index))
        tree, done = break_line(intensity, k, rng)
        trees.append(tree)
        complete[index] = done
        if done and weight_at == "stopping":
            stops[index] = tree.cuts[-1]
    weights = np.exp(log_martingale_weights(batch, stops, model))
    return [
        WeightedSample(tree, float(w), bool(done))
        for tree, w, done in zip(trees, weights, complete)
    ]


def sample_stable_tree_ensemble(
    model: StableModel,
    k: int,
    horizon: float,
    replicas: int,
    seed: SeedLike,
    epsilon: float = 1e-3,
    weight_at: WeightAt = "stopping",
    n_jobs: int | None = None,
) -> WeightedTreeEnsemble:
    """Stable line-breaking trees from sigma paths weighted by the martingale.

    The weight is M at min(Y_k, horizon) by default; ``weight_at="horizon"``
    uses M at the horizon for every replica.
    """

    if k < 1:
        raise ParameterError("k must be at least 1.")
    if weight_at not in ("stopping", "horizon"):
        raise ParameterError("weight_at must be 'stopping' or 'horizon'.")
    worker = partial(
        _stable_tree_chunk,
        model=model,
        k=k,
        horizon=horizon,
        epsilon=epsilon,
        weight_at=weight_at,
    )
    chunks = run_chunked(worker, replicas, seed, n_jobs)
    samples = [sample for chunk in chunks for sample in chunk]
    ensemble = WeightedTreeEnsemble(
        samples,
        {
            "alpha": model.alpha,
            "k": k,
            "horizon": horizon,
            "epsilon": epsilon,
            "replicas": replicas,
            "seed": int(seed) if not isinstance(seed, np.random.SeedSequence) else None,
        },
    )
    missing = ensemble.missing_mass()
    if missing.mean > 1e-2:
        logger.warning(
            "weighted missing mass %.3g: horizon %s is short for k=%d",
            missing.mean,
            horizon,
            k,
        )
    return ensemble


def _unweighted_tree_chunk(
    count: int,
    rng: np.random.Generator,
    *,
    intensity_factory: Callable[[np.random.Generator], IntensityPath],
    k: int,
) -> list[WeightedSample]:
    samples = []
    for _ in range(count):
        tree, done = break_line(intensity_factory(rng), k, rng)
        samples.append(WeightedSample(tree, 1.0, done))
    return samples


def sample_tree_ensemble(
    intensity_factory: Callable[[np.random.Generator], IntensityPath],
    k: int,
    replicas: int,
    seed: SeedLike,
    n_jobs: int | None = None,
) -> WeightedTreeEnsemble:
    """Unit-weight ensemble for intensities with a directly sampled law."""

    if k < 1:
        raise ParameterError("k must be at least 1.")
    worker = partial(_unweighted_tree_chunk, intensity_factory=intensity_factory, k=k)
    chunks = run_chunked(worker, replicas, seed, n_jobs)
    samples = [sample for chunk in chunks for sample in chunk]
    return WeightedTreeEnsemble(
        samples,
        {
            "k": k,
            "replicas": replicas,
            "seed": int(seed) if not isinstance(seed, np.random.SeedSequence) else None,
        },
    )


def mittag_leffler_moment(theta: float, beta: float, n: int) -> float:
    """n-th moment of ML(theta, beta)."""

    return math.exp(
        special.gammaln(theta)
        + special.gammaln(theta / beta + n)
        - special.gammaln(theta / beta)
        - special.gammaln(theta + n * beta)
    )


def first_cut_moment(alpha: float, n: int) -> float:
    """E[Y_1**n] = alpha**(-n) n! Gamma(1 - 1/alpha) / Gamma((n+1)(1 - 1/alpha))."""

    beta = 1.0 - 1.0 / alpha
    return math.exp(
        -n * math.log(alpha)
        + special.gammaln(n + 1.0)
        + special.gammaln(beta)
        - special.gammaln((n + 1.0) * beta)
    )

