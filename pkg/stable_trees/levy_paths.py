"""The (alpha-1)-stable subordinator sigma and its martingale change of measure.

sigma has Levy measure C_alpha x**(-alpha) dx and Laplace transform
E[exp(-lam sigma_t)] = exp(-t alpha lam**(alpha-1)). The weight

    M_t = exp(int_0^t sigma_s ds) p(-sigma_t) / p(0)

is a mean-one martingale; weighting functionals of sigma by M_t estimates
functionals of the tilted process sigma-tilde. Every weight is handled in log
space because exp(int sigma) and p(-sigma_t) individually leave the float
range for moderate t.
"""

from __future__ import annotations

import cmath
import logging
import math
from dataclasses import dataclass, field
from functools import partial, reduce
from typing import Any, Callable, Literal, Mapping

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy import integrate

from stable_trees.config import DEFAULT_EPSILON
from stable_trees.errors import ParameterError, QuadratureError
from stable_trees.parallel import SeedLike, run_chunked
from stable_trees.stable_density import StableModel

logger = logging.getLogger(__name__)

SmallJumps = Literal["drift", "drop"]
Statistic = Callable[["PathBatch", float, StableModel], NDArray[np.float64]]


@dataclass(frozen=True)
class JumpPath:
    """One increasing path on (0, horizon]: optional drift plus sorted jumps."""

    horizon: float
    times: NDArray[np.float64]
    sizes: NDArray[np.float64]
    truncation: float = 0.0
    drift: float = 0.0

    def __post_init__(self) -> None:
        times = np.asarray(self.times, dtype=float)
        sizes = np.asarray(self.sizes, dtype=float)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "sizes", sizes)
        if self.horizon <= 0:
            raise ParameterError("horizon must be positive.")
        if times.shape != sizes.shape:
            raise ParameterError("times and sizes must have the same length.")
        if times.size and (times[0] <= 0 or times[-1] > self.horizon):
            raise ParameterError("jump times must lie in (0, horizon].")
        if np.any(np.diff(times) <= 0):
            raise ParameterError("jump times must be strictly increasing.")
        if np.any(sizes <= self.truncation):
            raise ParameterError("jump sizes must exceed the truncation level.")
        if self.drift < 0:
            raise ParameterError("drift must be non-negative.")

    @classmethod
    def from_jumps(
        cls, horizon: float, jumps: list[tuple[float, float]], **kwargs: Any
    ) -> JumpPath:
        pairs = sorted(jumps)
        return cls(
            horizon,
            np.array([s for s, _ in pairs], dtype=float),
            np.array([x for _, x in pairs], dtype=float),
            **kwargs,
        )

    @property
    def jumps(self) -> list[tuple[float, float]]:
        return list(zip(self.times.tolist(), self.sizes.tolist()))

    def _check_time(self, t: float) -> None:
        if t < 0 or t > self.horizon:
            raise ParameterError(f"t={t} is outside [0, {self.horizon}].")

    def value(self, t: float) -> float:
        self._check_time(t)
        return self.drift * t + float(self.sizes[self.times <= t].sum())


def integral_of_path(path: JumpPath, t: float) -> float:
    """int_0^t sigma_s ds, exact for a drift-plus-jumps path."""

    path._check_time(t)
    before = path.times <= t
    return 0.5 * path.drift * t * t + float(
        (path.sizes[before] * (t - path.times[before])).sum()
    )


def quadratic_variation(path: JumpPath, t: float) -> float:
    """Sum of squared jumps up to time t."""

    path._check_time(t)
    return float((path.sizes[path.times <= t] ** 2).sum())


@dataclass(frozen=True)
class PathBatch:
    """Columnar storage of independent paths sharing horizon and drift.

    ``owner[i]`` is the replica of jump ``i``; jumps are sorted by
    (owner, time). Evaluation times may be a scalar or one time per replica.
    """

    replicas: int
    horizon: float
    times: NDArray[np.float64]
    sizes: NDArray[np.float64]
    owner: NDArray[np.int64]
    truncation: float = 0.0
    drift: float = 0.0

    def _before(self, t: float | NDArray[np.float64]) -> NDArray[np.bool_]:
        per_replica = np.broadcast_to(np.asarray(t, dtype=float), (self.replicas,))
        return self.times <= per_replica[self.owner]

    def _per_replica_sum(self, weights: NDArray[np.float64]) -> NDArray[np.float64]:
        return np.bincount(self.owner, weights=weights, minlength=self.replicas)

    def value(self, t: float | NDArray[np.float64]) -> NDArray[np.float64]:
        before = self._before(t)
        return self.drift * np.asarray(t) + self._per_replica_sum(
            np.where(before, self.sizes, 0.0)
        )

    def integral(self, t: float | NDArray[np.float64]) -> NDArray[np.float64]:
        t_arr = np.broadcast_to(np.asarray(t, dtype=float), (self.replicas,))
        before = self._before(t_arr)
        elapsed = np.where(before, t_arr[self.owner] - self.times, 0.0)
        return 0.5 * self.drift * t_arr**2 + self._per_replica_sum(
            self.sizes * elapsed
        )

    def quadratic_variation(
        self, t: float | NDArray[np.float64]
    ) -> NDArray[np.float64]:
        return self._per_replica_sum(np.where(self._before(t), self.sizes**2, 0.0))

    def path(self, index: int) -> JumpPath:
        if not 0 <= index < self.replicas:
            raise ParameterError(f"replica {index} is outside the batch.")
        start, stop = np.searchsorted(self.owner, [index, index + 1])
        return JumpPath(
            self.horizon,
            self.times[start:stop],
            self.sizes[start:stop],
            truncation=self.truncation,
            drift=self.drift,
        )


def compensation_drift(model: StableModel, epsilon: float) -> float:
    """Mean rate of the jumps below epsilon, C_alpha eps**(2-alpha)/(2-alpha)."""

    a = model.alpha
    return model.c_alpha * epsilon ** (2.0 - a) / (2.0 - a)


def truncation_bias(model: StableModel, horizon: float, epsilon: float) -> float:
    """Expected mass of the discarded small jumps over [0, horizon]."""

    return horizon * compensation_drift(model, epsilon)


def _check_path_parameters(horizon: float, epsilon: float) -> None:
    if horizon <= 0:
        raise ParameterError("horizon must be positive.")
    if epsilon <= 0:
        raise ParameterError("epsilon must be positive.")


def sample_subordinator_batch(
    model: StableModel,
    horizon: float,
    epsilon: float,
    replicas: int,
    rng: np.random.Generator,
    small_jumps: SmallJumps = "drift",
) -> PathBatch:
    """Sample ``replicas`` independent paths of sigma on [0, horizon].

    Jumps above epsilon form a Poisson process with intensity
    dt C_alpha x**(-alpha) dx. Jumps below epsilon are replaced by their
    mean drift (``"drift"``) or discarded (``"drop"``).
    """

    _check_path_parameters(horizon, epsilon)
    if small_jumps not in ("drift", "drop"):
        raise ParameterError("small_jumps must be 'drift' or 'drop'.")
    a = model.alpha
    rate = horizon * model.c_alpha * epsilon ** (1.0 - a) / (a - 1.0)
    counts = rng.poisson(rate, size=replicas)
    total = int(counts.sum())
    owner = np.repeat(np.arange(replicas, dtype=np.int64), counts)
    times = horizon * (1.0 - rng.random(total))
    sizes = epsilon * (1.0 - rng.random(total)) ** (-1.0 / (a - 1.0))
    order = np.lexsort((times, owner))
    drift = compensation_drift(model, epsilon) if small_jumps == "drift" else 0.0
    return PathBatch(
        replicas=replicas,
        horizon=horizon,
        times=times[order],
        sizes=sizes[order],
        owner=owner[order],
        truncation=epsilon,
        drift=drift,
    )


def sample_subordinator_path(
    model: StableModel,
    horizon: float,
    epsilon: float,
    rng: np.random.Generator,
    small_jumps: SmallJumps = "drift",
) -> JumpPath:
    return sample_subordinator_batch(
        model, horizon, epsilon, 1, rng, small_jumps=small_jumps
    ).path(0)


def exact_marginal_sample(
    model: StableModel,
    t: float,
    rng: np.random.Generator,
    size: int | None = None,
) -> float | NDArray[np.float64]:
    """Exact draw(s) of sigma_t = (alpha t)**(1/(alpha-1)) S.

    S is one-sided (alpha-1)-stable with E[exp(-lam S)] = exp(-lam**(alpha-1)),
    generated from a uniform angle and an exponential variate.
    """

    if t <= 0:
        raise ParameterError("t must be positive.")
    beta = model.alpha - 1.0
    angle = math.pi * (1.0 - rng.random(size))
    exponential = rng.standard_exponential(size)
    stable = (np.sin(beta * angle) / np.sin(angle) ** (1.0 / beta)) * (
        np.sin((1.0 - beta) * angle) / exponential
    ) ** ((1.0 - beta) / beta)
    out = (model.alpha * t) ** (1.0 / beta) * stable
    return float(out) if size is None else out


def log_martingale_weight(path: JumpPath, t: float, model: StableModel) -> float:
    """log M_t = int_0^t sigma + log p(-sigma_t) - log p(0)."""

    return (
        integral_of_path(path, t)
        + float(model.fast_log_density(-path.value(t)))
        - math.log(model.p_zero)
    )


def log_martingale_weights(
    batch: PathBatch, t: float | NDArray[np.float64], model: StableModel
) -> NDArray[np.float64]:
    return (
        batch.integral(t)
        + model.fast_log_density(-batch.value(t))
        - math.log(model.p_zero)
    )


@dataclass(frozen=True)
class WeightedSample:
    """A payload with its importance weight and an event indicator."""

    payload: Any
    weight: float
    indicator: bool = True

    def __post_init__(self) -> None:
        if not self.weight >= 0:
            raise ParameterError("weights must be non-negative.")


@dataclass(frozen=True)
class Estimate:
    mean: float
    stderr: float
    replicas: int

    def z_score(self, target: float) -> float:
        if self.stderr == 0:
            return 0.0 if self.mean == target else math.inf
        return abs(self.mean - target) / self.stderr

    def within(self, target: float, standard_errors: float = 3.0) -> bool:
        return self.z_score(target) <= standard_errors


@dataclass
class WeightedAccumulator:
    """Streaming sums for weighted means; ``merge`` is associative."""

    count: int = 0
    sum_w: float = 0.0
    sum_w2: float = 0.0
    sum_wf: float = 0.0
    sum_wf2: float = 0.0

    def add(self, log_weights: ArrayLike, values: ArrayLike) -> None:
        weights = np.exp(np.asarray(log_weights, dtype=float))
        weighted = weights * np.asarray(values, dtype=float)
        self.count += weights.size
        self.sum_w += float(weights.sum())
        self.sum_w2 += float((weights**2).sum())
        self.sum_wf += float(weighted.sum())
        self.sum_wf2 += float((weighted**2).sum())

    def merge(self, other: WeightedAccumulator) -> WeightedAccumulator:
        return WeightedAccumulator(
            self.count + other.count,
            self.sum_w + other.sum_w,
            self.sum_w2 + other.sum_w2,
            self.sum_wf + other.sum_wf,
            self.sum_wf2 + other.sum_wf2,
        )

    @staticmethod
    def _estimate(count: int, total: float, squares: float) -> Estimate:
        if count < 2:
            raise ParameterError("an estimate needs at least two replicas.")
        mean = total / count
        variance = max(squares - count * mean * mean, 0.0) / (count - 1)
        return Estimate(mean, math.sqrt(variance / count), count)

    def estimate(self) -> Estimate:
        return self._estimate(self.count, self.sum_wf, self.sum_wf2)

    def weight_estimate(self) -> Estimate:
        return self._estimate(self.count, self.sum_w, self.sum_w2)


# -- path statistics ------------------------------------------------------------


def constant_statistic(batch: PathBatch, t: float, model: StableModel) -> NDArray:
    return np.ones(batch.replicas)


def value_statistic(batch: PathBatch, t: float, model: StableModel) -> NDArray:
    return batch.value(t)


def second_moment_statistic(batch: PathBatch, t: float, model: StableModel) -> NDArray:
    return batch.value(t) ** 2


def quadratic_variation_statistic(
    batch: PathBatch, t: float, model: StableModel
) -> NDArray:
    return batch.quadratic_variation(t)


def laplace_statistic(
    batch: PathBatch, t: float, model: StableModel, *, lam: float
) -> NDArray:
    return np.exp(-lam * batch.value(t))


def density_shift_statistic(
    batch: PathBatch, t: float, model: StableModel, *, x: float
) -> NDArray:
    """p(-sigma_t - x) / p(-sigma_t)."""

    value = batch.value(t)
    return np.exp(model.fast_log_density(-value - x) - model.fast_log_density(-value))


def martingale_key_statistic(
    batch: PathBatch, t: float, model: StableModel, *, c: float
) -> NDArray:
    """exp(c t) p(-c - sigma_t) p(0) / p(-sigma_t); times M_t this is the
    unweighted key functional exp(int (c + sigma)) p(-c - sigma_t)."""

    value = batch.value(t)
    return np.exp(
        c * t
        + model.fast_log_density(-c - value)
        - model.fast_log_density(-value)
        + math.log(model.p_zero)
    )


def _importance_chunk(
    count: int,
    rng: np.random.Generator,
    *,
    model: StableModel,
    t: float,
    epsilon: float,
    small_jumps: SmallJumps,
    statistics: tuple[tuple[str, Statistic], ...],
) -> dict[str, WeightedAccumulator]:
    batch = sample_subordinator_batch(model, t, epsilon, count, rng, small_jumps)
    log_weights = log_martingale_weights(batch, t, model)
    result: dict[str, WeightedAccumulator] = {}
    for name, statistic in statistics:
        accumulator = WeightedAccumulator()
        accumulator.add(log_weights, statistic(batch, t, model))
        result[name] = accumulator
    return result


def importance_estimates(
    statistics: Mapping[str, Statistic],
    model: StableModel,
    t: float,
    replicas: int,
    seed: SeedLike,
    epsilon: float = DEFAULT_EPSILON,
    small_jumps: SmallJumps = "drift",
    n_jobs: int | None = None,
) -> dict[str, Estimate]:
    """Weighted means E[M_t F(sigma)] for several statistics on shared paths."""

    if replicas < 2:
        raise ParameterError("replicas must be at least 2.")
    _check_path_parameters(t, epsilon)
    worker = partial(
        _importance_chunk,
        model=model,
        t=t,
        epsilon=epsilon,
        small_jumps=small_jumps,
        statistics=tuple(statistics.items()),
    )
    chunks = run_chunked(worker, replicas, seed, n_jobs=n_jobs)
    merged = {
        name: reduce(WeightedAccumulator.merge, (chunk[name] for chunk in chunks))
        for name in statistics
    }
    weight_mean = next(iter(merged.values())).weight_estimate()
    logger.debug(
        "importance sampling at t=%s: mean weight %.4f +- %.4f",
        t,
        weight_mean.mean,
        weight_mean.stderr,
    )
    return {name: accumulator.estimate() for name, accumulator in merged.items()}


def importance_estimate(
    statistic: Statistic,
    model: StableModel,
    t: float,
    replicas: int,
    seed: SeedLike,
    epsilon: float = DEFAULT_EPSILON,
    small_jumps: SmallJumps = "drift",
    n_jobs: int | None = None,
) -> Estimate:
    """Estimate E[F(sigma-tilde restricted to [0, t])] as the mean of M_t F(sigma)."""

    return importance_estimates(
        {"statistic": statistic},
        model,
        t,
        replicas,
        seed,
        epsilon=epsilon,
        small_jumps=small_jumps,
        n_jobs=n_jobs,
    )["statistic"]


def martingale_key_estimate(
    model: StableModel,
    c: float,
    t: float,
    replicas: int,
    seed: SeedLike,
    epsilon: float = DEFAULT_EPSILON,
    n_jobs: int | None = None,
) -> tuple[Estimate, float]:
    """E[exp(int_0^t (c + sigma_s) ds) p(-c - sigma_t)] and its value p(-c)."""

    if c < 0:
        raise ParameterError("c must be non-negative.")
    estimate = importance_estimate(
        partial(martingale_key_statistic, c=c),
        model,
        t,
        replicas,
        seed,
        epsilon=epsilon,
        n_jobs=n_jobs,
    )
    return estimate, float(model.density(-c))


def quadvar_lemma_estimate(
    model: StableModel,
    t: float,
    x: float,
    replicas: int,
    seed: SeedLike,
    epsilon: float = DEFAULT_EPSILON,
    n_jobs: int | None = None,
) -> tuple[Estimate, float]:
    """E[p(-sigma-tilde_t - x)/p(-sigma-tilde_t)] against exp(-tx) p(-x)/p(0)."""

    if x < 0:
        raise ParameterError("x must be non-negative.")
    estimate = importance_estimate(
        partial(density_shift_statistic, x=x),
        model,
        t,
        replicas,
        seed,
        epsilon=epsilon,
        n_jobs=n_jobs,
    )
    oracle = math.exp(-t * x + model.log_density(-x)) / model.p_zero
    return estimate, oracle


@dataclass(frozen=True)
class VarianceReport:
    t: float
    mean: Estimate
    second_moment: Estimate
    variance: float = field(init=False)

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "variance", self.second_moment.mean - self.mean.mean**2
        )

    def scaled(self, alpha: float) -> float:
        """Variance divided by t**(alpha-1)."""

        return self.variance / self.t ** (alpha - 1.0)


def sigma_tilde_variance_estimate(
    model: StableModel,
    t: float,
    replicas: int,
    seed: SeedLike,
    epsilon: float = DEFAULT_EPSILON,
    n_jobs: int | None = None,
) -> VarianceReport:
    estimates = importance_estimates(
        {"mean": value_statistic, "second": second_moment_statistic},
        model,
        t,
        replicas,
        seed,
        epsilon=epsilon,
        n_jobs=n_jobs,
    )
    return VarianceReport(t, estimates["mean"], estimates["second"])


# -- quadrature oracles ---------------------------------------------------------


def _check_quad(name: str, value: float, error: float, tolerance: float) -> float:
    if not math.isfinite(value) or error > tolerance * max(1.0, abs(value)):
        raise QuadratureError(f"{name} quadrature did not converge", value, error)
    return value


def _tilted_levy_integral(
    model: StableModel, kernel: Callable[[float], float], power: float
) -> float:
    """int_0^inf x**power kernel(x) p(-x)/p(0) dx with power > -1.

    The singular factor near zero is handled by an algebraic QAWS weight.
    """

    def relative_density(x: float) -> float:
        return math.exp(float(model.fast_log_density(-x))) / model.p_zero

    def near(x: float) -> float:
        return kernel(x) * relative_density(x)

    def far(x: float) -> float:
        return x**power * kernel(x) * relative_density(x)

    head, head_error = integrate.quad(
        near, 0.0, 1.0, weight="alg", wvar=(power, 0.0), limit=200
    )
    tail, tail_error = integrate.quad(far, 1.0, model.x_far, limit=200)
    return _check_quad("Levy-measure", head + tail, head_error + tail_error, 1e-8)


def sigma_tilde_mean(model: StableModel, t: float) -> float:
    """E[sigma-tilde_t] = int (1 - e^{-tx}) C_alpha x**(-alpha) p(-x)/p(0) dx."""

    if t <= 0:
        raise ParameterError("t must be positive.")

    def kernel(x: float) -> float:
        return -math.expm1(-t * x) / x if x > 0 else t

    return model.c_alpha * _tilted_levy_integral(model, kernel, 1.0 - model.alpha)


def quadratic_variation_bound(model: StableModel) -> float:
    """C_alpha int_0^inf x**(1-alpha) p(-x)/p(0) dx, an upper bound for E[Q_inf]."""

    return model.c_alpha * _tilted_levy_integral(
        model, lambda x: 1.0, 1.0 - model.alpha
    )


def _complex_exponent(z: complex, alpha: float) -> complex:
    return (-z) ** alpha


def sigma_tilde_laplace(model: StableModel, lam: float, t: float) -> float:
    """E[exp(-lam sigma-tilde_t)] by the contour-integral formula.

    (1/(pi p(0))) Re int_0^inf exp(G(iu - lam) - G(iu - t - lam) + G(iu - t)) du
    """

    if lam < 0:
        raise ParameterError("lam must be non-negative.")
    if t <= 0:
        raise ParameterError("t must be positive.")
    a = model.alpha

    def integrand(u: float) -> float:
        z = 1j * u
        exponent = (
            _complex_exponent(z - lam, a)
            - _complex_exponent(z - t - lam, a)
            + _complex_exponent(z - t, a)
        )
        return cmath.exp(exponent).real

    upper = 1.5 * model.max_frequency + 4.0 * (t + lam)
    value, error = integrate.quad(
        integrand, 0.0, upper, limit=800, epsabs=1e-12, epsrel=1e-10
    )
    _check_quad("sigma-tilde Laplace", value, error, 1e-8)
    return value / (math.pi * model.p_zero)


def sigma_tilde_laplace_slope(model: StableModel, t: float, h: float = 1e-3) -> float:
    """One-sided three-point derivative of the Laplace transform at lam = 0."""

    f0 = sigma_tilde_laplace(model, 0.0, t)
    f1 = sigma_tilde_laplace(model, h, t)
    f2 = sigma_tilde_laplace(model, 2.0 * h, t)
    return (-3.0 * f0 + 4.0 * f1 - f2) / (2.0 * h)


# -- first cut time ---------------------------------------------------------------


def _first_cut_chunk(
    count: int, rng: np.random.Generator, *, model: StableModel, t: float
) -> WeightedAccumulator:
    sigma_t = exact_marginal_sample(model, t, rng, size=count)
    accumulator = WeightedAccumulator()
    accumulator.add(
        model.fast_log_density(-sigma_t) - math.log(model.p_zero), np.ones(count)
    )
    return accumulator


def first_cut_survival(
    model: StableModel,
    t: float,
    replicas: int,
    seed: SeedLike,
    n_jobs: int | None = None,
) -> Estimate:
    """P(Y_1 >= t) = E[p(-sigma_t)]/p(0), from exact marginals of sigma."""

    chunks = run_chunked(
        partial(_first_cut_chunk, model=model, t=t), replicas, seed, n_jobs=n_jobs
    )
    return reduce(WeightedAccumulator.merge, chunks).estimate()
