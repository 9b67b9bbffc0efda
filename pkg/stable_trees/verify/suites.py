"""Named verification suites binding each closed-form identity to an estimate.

Every suite compares a Monte Carlo or numerical estimate with a value from a
different code path: quadrature, exhaustive enumeration or a closed form.
Statistical cases accept at three standard errors unless a distribution-free
test level is given; convergence statements at finite n are flagged
qualitative.
"""

from __future__ import annotations

import itertools
import logging
import math
import time
import zlib
from collections import Counter
from dataclasses import dataclass
from functools import partial
from typing import Callable, Literal

import numpy as np
from scipy import special, stats

from stable_trees import discrete_trees as dt
from stable_trees.config import DEFAULT_ALPHA, DEFAULT_SEED
from stable_trees.errors import (
    InvariantViolationError,
    ParameterError,
    UnknownSuiteError,
)
from stable_trees.levy_paths import (
    Estimate,
    constant_statistic,
    first_cut_survival,
    importance_estimate,
    importance_estimates,
    laplace_statistic,
    martingale_key_estimate,
    quadratic_variation_bound,
    quadratic_variation_statistic,
    quadvar_lemma_estimate,
    sigma_tilde_laplace,
    sigma_tilde_laplace_slope,
    sigma_tilde_mean,
    value_statistic,
)
from stable_trees.linebreak import (
    crt_intensity,
    empirical_measure_distances,
    first_cut_moment,
    icrt_intensity,
    mittag_leffler_moment,
    sample_stable_tree_ensemble,
    sample_tree_ensemble,
    satisfies_four_point,
    with_root,
)
from stable_trees.parallel import run_chunked
from stable_trees.stable_density import density_at_zero, get_model
from stable_trees.verify.oracles import (
    enumerate_conditioned_gw,
    enumerate_theta_expectation,
    polya_urn_terminal,
    unnormalised_tree_mass,
)
from stable_trees.verify.report import PLUMBING, CaseResult, SuiteReport

logger = logging.getLogger(__name__)

Profile = Literal["full", "quick"]
SuiteFunction = Callable[["SuiteConfig", np.random.Generator, SuiteReport], None]

SUITES: dict[str, SuiteFunction] = {}


@dataclass(frozen=True)
class SuiteConfig:
    alpha: float = DEFAULT_ALPHA
    seed: int = DEFAULT_SEED
    profile: Profile = "full"
    n_jobs: int | None = None

    def __post_init__(self) -> None:
        if not 1.0 < self.alpha < 2.0:
            raise ParameterError("alpha must be between 1 and 2 (exclusive).")
        if self.profile not in ("full", "quick"):
            raise ParameterError("profile must be 'full' or 'quick'.")

    def size(self, full: int, quick: int) -> int:
        return full if self.profile == "full" else quick


def register(name: str) -> Callable[[SuiteFunction], SuiteFunction]:
    def decorator(function: SuiteFunction) -> SuiteFunction:
        SUITES[name] = function
        return function

    return decorator


def suite_names() -> list[str]:
    return list(SUITES)


def suite_rng(name: str, seed: int) -> np.random.Generator:
    """Stream for one suite; independent of which other suites run."""

    entropy = [seed, zlib.crc32(name.encode())]
    return np.random.default_rng(np.random.SeedSequence(entropy))


def _child_seed(rng: np.random.Generator) -> int:
    return int(rng.integers(0, 2**63 - 1))


def run_suite(
    name: str,
    config: SuiteConfig | None = None,
    rng: np.random.Generator | None = None,
) -> SuiteReport:
    if name not in SUITES:
        raise UnknownSuiteError(f"unknown suite {name!r}; known: {', '.join(SUITES)}")
    config = config or SuiteConfig()
    rng = rng if rng is not None else suite_rng(name, config.seed)
    report = SuiteReport(name, config.alpha, config.seed, config.profile)
    started = time.perf_counter()
    SUITES[name](config, rng, report)
    report.runtime = time.perf_counter() - started
    logger.info("%s in %.1fs", report.summary_line(), report.runtime)
    return report


def run_all(config: SuiteConfig | None = None) -> list[SuiteReport]:
    return [run_suite(name, config) for name in SUITES]


def _estimate_case(
    description: str, anchor: str, estimate: Estimate, oracle: float, **extra
) -> CaseResult:
    return CaseResult(
        description,
        anchor,
        estimate.mean,
        oracle,
        extra.pop("tolerance", 3.0),
        stderr=estimate.stderr,
        **extra,
    )


def _proportion(hits: int, trials: int) -> Estimate:
    p = hits / trials
    return Estimate(p, math.sqrt(max(p * (1.0 - p), 1.0 / trials) / trials), trials)


def _sample_mean(values: np.ndarray) -> Estimate:
    values = np.asarray(values, dtype=float)
    return Estimate(
        float(values.mean()),
        float(values.std(ddof=1) / math.sqrt(values.size)),
        values.size,
    )


# -- stable density ---------------------------------------------------------------


@register("density-normalization")
def _density_normalization(
    config: SuiteConfig, rng: np.random.Generator, report: SuiteReport
) -> None:
    alphas = (1.2, 1.5, 1.8) if config.profile == "full" else (config.alpha,)
    for alpha in alphas:
        model = get_model(alpha)
        report.add(
            CaseResult(
                f"total mass at alpha={alpha}",
                "int p = 1",
                model.total_mass(),
                1.0,
                1e-6,
                kind="abs",
            )
        )
        report.add(
            CaseResult(
                f"p(0) alpha Gamma(1 - 1/alpha) at alpha={alpha}",
                "1/(alpha p(0)) = Gamma(1 - 1/alpha)",
                float(model.density(0.0)) * alpha * special.gamma(1.0 - 1.0 / alpha),
                1.0,
                1e-6,
                kind="abs",
            )
        )
        report.add(
            CaseResult(
                f"P(L <= 0) at alpha={alpha}",
                "positivity 1 - 1/alpha",
                float(model.cdf(0.0)),
                1.0 / alpha,
                1e-6,
                kind="abs",
            )
        )
        for x in (-2.0, 0.5, 3.0):
            report.add(
                CaseResult(
                    f"grid density against adaptive oracle at x={x}, alpha={alpha}",
                    PLUMBING,
                    float(model.density(x)),
                    model.oracle_density(x),
                    1e-7,
                    kind="abs",
                )
            )
        report.add(
            CaseResult(
                f"power series at x=1, alpha={alpha}",
                PLUMBING,
                float(model.series_density(1.0)),
                float(model.density(1.0)),
                1e-7,
                kind="abs",
            )
        )
        # density_ratio goes through the spline: allow 1e-4 relative
        peak = float(model.density(model.mode())) / float(model.density(0.0))
        report.add(
            CaseResult(
                f"grid sup of p(-x-y)/p(-x) on [0, 10]^2, alpha={alpha}",
                "p(-x-y)/p(-x) <= p(mode)/p(0)",
                model.density_ratio_bound(),
                peak,
                1.0,
                kind="upper",
                stderr=1e-4 * peak,
            )
        )
    report.add(
        CaseResult(
            "closed-form p(0) against quadrature",
            PLUMBING,
            density_at_zero(config.alpha),
            float(get_model(config.alpha).density(0.0)),
            1e-8,
            kind="abs",
        )
    )


# -- subordinator and martingale ----------------------------------------------------


@register("martingale-mean")
def _martingale_mean(
    config: SuiteConfig, rng: np.random.Generator, report: SuiteReport
) -> None:
    model = get_model(config.alpha)
    replicas = config.size(100_000, 20_000)
    for t in (0.25, 0.5, 1.0):
        estimate = importance_estimate(
            constant_statistic,
            model,
            t,
            replicas,
            _child_seed(rng),
            n_jobs=config.n_jobs,
        )
        report.add(
            _estimate_case(f"E[M_t] at t={t}", "mean-one martingale", estimate, 1.0)
        )


@register("martingale-key")
def _martingale_key(
    config: SuiteConfig, rng: np.random.Generator, report: SuiteReport
) -> None:
    model = get_model(config.alpha)
    replicas = config.size(100_000, 20_000)
    for c in (0.0, 0.5, 1.0):
        estimate, oracle = martingale_key_estimate(
            model, c, 0.5, replicas, _child_seed(rng), n_jobs=config.n_jobs
        )
        report.add(
            _estimate_case(
                f"E[exp(int (c + sigma)) p(-c - sigma_t)] at c={c}, t=0.5",
                "key functional equals p(-c)",
                estimate,
                oracle,
            )
        )


@register("sigma-laplace")
def _sigma_laplace(
    config: SuiteConfig, rng: np.random.Generator, report: SuiteReport
) -> None:
    model = get_model(config.alpha)
    alpha = config.alpha
    replicas = config.size(100_000, 20_000)
    for t in (0.5, 1.0):
        statistics = {
            f"laplace:{lam}": partial(laplace_statistic, lam=lam) for lam in (0.5, 1.0)
        }
        statistics["mean"] = value_statistic
        estimates = importance_estimates(
            statistics, model, t, replicas, _child_seed(rng), n_jobs=config.n_jobs
        )
        for lam in (0.5, 1.0):
            report.add(
                _estimate_case(
                    f"E[exp(-lam sigma-tilde_t)] at lam={lam}, t={t}",
                    "contour Laplace transform of sigma-tilde",
                    estimates[f"laplace:{lam}"],
                    sigma_tilde_laplace(model, lam, t),
                )
            )
        report.add(
            _estimate_case(
                f"E[sigma-tilde_t] at t={t}",
                "Levy-measure mean of sigma-tilde",
                estimates["mean"],
                sigma_tilde_mean(model, t),
            )
        )
    report.add(
        CaseResult(
            "-d/dlam Laplace at 0 against the mean, t=1",
            PLUMBING,
            -sigma_tilde_laplace_slope(model, 1.0),
            sigma_tilde_mean(model, 1.0),
            1e-3,
            kind="rel",
        )
    )
    horizon = 50.0
    report.add(
        CaseResult(
            "E[sigma-tilde_50] / (alpha 50^(alpha-1))",
            "E[sigma-tilde_t] ~ alpha t^(alpha-1)",
            sigma_tilde_mean(model, horizon) / (alpha * horizon ** (alpha - 1.0)),
            1.0,
            0.05,
            kind="abs",
        )
    )


@register("quadvar-lemma")
def _quadvar_lemma(
    config: SuiteConfig, rng: np.random.Generator, report: SuiteReport
) -> None:
    model = get_model(config.alpha)
    replicas = config.size(100_000, 20_000)
    for t in (0.5, 1.0):
        for x in (0.5, 1.0, 2.0):
            estimate, oracle = quadvar_lemma_estimate(
                model, t, x, replicas, _child_seed(rng), n_jobs=config.n_jobs
            )
            report.add(
                _estimate_case(
                    f"E[p(-sigma-tilde_t - x)/p(-sigma-tilde_t)] at t={t}, x={x}",
                    "exp(-tx) p(-x)/p(0)",
                    estimate,
                    oracle,
                )
            )


@register("quadvar-bound")
def _quadvar_bound(
    config: SuiteConfig, rng: np.random.Generator, report: SuiteReport
) -> None:
    model = get_model(config.alpha)
    estimate = importance_estimate(
        quadratic_variation_statistic,
        model,
        5.0,
        config.size(100_000, 20_000),
        _child_seed(rng),
        n_jobs=config.n_jobs,
    )
    report.add(
        _estimate_case(
            "E[Q_5] below the quadratic-variation bound",
            "E[Q_inf] <= C_alpha int x^(1-alpha) p(-x)/p(0) dx",
            estimate,
            quadratic_variation_bound(model),
            kind="upper",
        )
    )


# -- line-breaking ------------------------------------------------------------------


@register("first-cut-law")
def _first_cut_law(
    config: SuiteConfig, rng: np.random.Generator, report: SuiteReport
) -> None:
    alpha = config.alpha
    model = get_model(alpha)
    horizon = 12.0
    replicas = config.size(100_000, 4_000)
    ensemble = sample_stable_tree_ensemble(
        model, 1, horizon, replicas, _child_seed(rng), n_jobs=config.n_jobs
    )
    missing = ensemble.missing_mass()
    theta = 1.0 - 1.0 / alpha
    for power in (1, 2):
        estimate = ensemble.estimate(lambda tree, p=power: (alpha * tree.cuts[0]) ** p)
        slack = (alpha * horizon) ** power * (missing.mean + 3.0 * missing.stderr)
        report.add(
            CaseResult(
                f"E[(alpha Y_1)^{power}]",
                "alpha Y_1 ~ ML(1 - 1/alpha, 1 - 1/alpha)",
                estimate.mean,
                mittag_leffler_moment(theta, theta, power),
                3.0 * estimate.stderr + slack,
                kind="abs",
                stderr=estimate.stderr,
            )
        )
    report.add(
        CaseResult(
            "first-cut moment formula against Mittag-Leffler moment",
            PLUMBING,
            first_cut_moment(alpha, 1),
            mittag_leffler_moment(theta, theta, 1) / alpha,
            1e-12,
            kind="rel",
        )
    )
    for t in (0.5, 1.0, 2.0):
        tree_side = ensemble.first_cut_survival(t)
        marginal_side = first_cut_survival(
            model, t, replicas, _child_seed(rng), n_jobs=config.n_jobs
        )
        report.add(
            CaseResult(
                f"P(Y_1 >= t) at t={t}",
                "P(Y_1 >= t) = E[p(-sigma_t)]/p(0)",
                tree_side.mean,
                marginal_side.mean,
                3.0,
                stderr=math.hypot(tree_side.stderr, marginal_side.stderr),
            )
        )


@register("crt-sanity")
def _crt_sanity(
    config: SuiteConfig, rng: np.random.Generator, report: SuiteReport
) -> None:
    ensemble = sample_tree_ensemble(
        crt_intensity,
        2,
        config.size(100_000, 10_000),
        _child_seed(rng),
        n_jobs=config.n_jobs,
    )
    trees = [s.payload for s in ensemble.samples if s.indicator]
    first_cuts = np.array([tree.cuts[0] for tree in trees])
    ratios = np.array([tree.attachments[0] / tree.cuts[1] for tree in trees])
    report.add(
        CaseResult(
            "KS of Y_1^2/2 against Exp(1)",
            "Brownian line-breaking",
            float(stats.kstest(first_cuts**2 / 2.0, "expon").pvalue),
            0.01,
            0.01,
            kind="pvalue",
        )
    )
    report.add(
        CaseResult(
            "KS of Z/Y against Uniform(0, 1)",
            "attachment uniform on the existing tree",
            float(stats.kstest(ratios, "uniform").pvalue),
            0.01,
            0.01,
            kind="pvalue",
        )
    )
    report.add(
        CaseResult(
            "incomplete CRT replicas",
            PLUMBING,
            float(len(ensemble) - len(trees)),
            0.0,
            0.0,
            kind="abs",
        )
    )


ICRT_THETA0 = 1.0
ICRT_THETAS = (0.8, 0.5, 0.3)


def icrt_first_cut_survival(t: float, theta0: float, thetas) -> float:
    """P(Y_1 > t) = exp(-theta0^2 t^2 / 2) prod exp(-theta_i t)(1 + theta_i t)."""

    theta = np.asarray(thetas, dtype=float)
    return float(
        math.exp(-0.5 * theta0**2 * t * t)
        * np.prod(np.exp(-theta * t) * (1.0 + theta * t))
    )


@register("icrt-sanity")
def _icrt_sanity(
    config: SuiteConfig, rng: np.random.Generator, report: SuiteReport
) -> None:
    factory = partial(icrt_intensity, ICRT_THETA0, ICRT_THETAS)
    replicas = config.size(50_000, 5_000)
    ensemble = sample_tree_ensemble(
        factory, 6, replicas, _child_seed(rng), n_jobs=config.n_jobs
    )
    for t in (0.5, 1.0, 2.0):
        hits = sum(
            s.payload is None or s.payload.cuts[0] > t for s in ensemble.samples
        )
        report.add(
            _estimate_case(
                f"P(Y_1 > t) at t={t}",
                "P(Y_1 > t) = E[exp(-int tau)]",
                _proportion(hits, replicas),
                icrt_first_cut_survival(t, ICRT_THETA0, ICRT_THETAS),
            )
        )
    checked = [s.payload for s in ensemble.samples[:200] if s.indicator]
    violations = sum(
        not satisfies_four_point(with_root(*empirical_measure_distances(tree)))
        for tree in checked
    )
    report.add(
        CaseResult(
            "four-point condition on sampled trees",
            "line-breaking yields an R-tree",
            float(violations),
            0.0,
            0.0,
            kind="abs",
        )
    )


# -- discrete trees -------------------------------------------------------------------


@register("prufer-exhaustive")
def _prufer_exhaustive(
    config: SuiteConfig, rng: np.random.Generator, report: SuiteReport
) -> None:
    for n in (3, 4):
        words = list(itertools.product(range(1, n + 1), repeat=n - 1))
        trees = [dt.prufer_decode(word) for word in words]
        round_trip = sum(
            dt.prufer_encode(tree).entries != tuple(word)
            for tree, word in zip(trees, words)
        )
        degree_mismatch = sum(
            not np.array_equal(
                dt.Codeword(tuple(word)).multiplicities(), tree.out_degrees()
            )
            for tree, word in zip(trees, words)
        )
        distinct = len({(tree.root, tree.parents) for tree in trees})
        report.add(
            CaseResult(
                f"distinct rooted trees from [{n}]^{n - 1}",
                "codewords biject with rooted labelled trees",
                float(distinct),
                float(n ** (n - 1)),
                0.0,
                kind="abs",
            )
        )
        report.add(
            CaseResult(
                f"encode(decode(w)) != w on [{n}]^{n - 1}",
                "revealing the tree one edge at a time",
                float(round_trip),
                0.0,
                0.0,
                kind="abs",
            )
        )
        report.add(
            CaseResult(
                f"label multiplicity != out-degree on [{n}]^{n - 1}",
                "multiplicity of a label is its out-degree",
                float(degree_mismatch),
                0.0,
                0.0,
                kind="abs",
            )
        )
    failures = 0
    draws = config.size(10_000, 1_000)
    for _ in range(draws):
        n = int(rng.integers(2, 201))
        word = dt.Codeword.of(rng.integers(1, n + 1, size=n - 1))
        tree = dt.prufer_decode(word)
        failures += dt.prufer_encode(tree) != word
    report.add(
        CaseResult(
            f"round-trip failures on {draws} random codewords, n <= 200",
            "revealing the tree one edge at a time",
            float(failures),
            0.0,
            0.0,
            kind="abs",
        )
    )


BIENAYME_N = 4


def _bienayme_chunk(count: int, rng: np.random.Generator, *, route: str) -> Counter:
    law = dt.uniform_offspring()
    counts: Counter = Counter()
    for _ in range(count):
        if route == "codeword":
            tree = dt.sample_bienayme_via_codeword(law, BIENAYME_N, rng)
        else:
            labelled, _, _ = dt.sample_growth_tree(law, BIENAYME_N, rng)
            tree = dt.randomize_order(labelled, rng)
        counts[tree] += 1
    return counts


def _total_variation(counts: Counter, exact: dict, total: int) -> float:
    support = set(counts) | set(exact)
    return 0.5 * sum(abs(counts.get(t, 0) / total - exact.get(t, 0.0)) for t in support)


@register("bienayme-law")
def _bienayme_law(
    config: SuiteConfig, rng: np.random.Generator, report: SuiteReport
) -> None:
    law = dt.uniform_offspring()
    exact = enumerate_conditioned_gw(law, BIENAYME_N)
    replicas = config.size(1_000_000, 20_000)
    for route in ("codeword", "growth"):
        chunks = run_chunked(
            partial(_bienayme_chunk, route=route),
            replicas,
            _child_seed(rng),
            n_jobs=config.n_jobs,
            chunk_size=50_000,
        )
        counts = sum(chunks, Counter())
        report.add(
            CaseResult(
                f"total variation of the {route} pipeline at n={BIENAYME_N}",
                "conditioned Bienayme law",
                _total_variation(counts, exact, replicas),
                0.0,
                0.02,
                kind="abs",
            )
        )
    report.add(
        CaseResult(
            "enumerated tree mass against (1/n) P(Xi_n = n - 1)",
            "cycle lemma",
            unnormalised_tree_mass(law, BIENAYME_N),
            dt.conditioning_probability(law, BIENAYME_N) / BIENAYME_N,
            1e-12,
            kind="abs",
        )
    )


def half_edge_identity_failures(trace: dt.GrowthTrace, d_hat: np.ndarray) -> int:
    """Steps where #H_k != sum_{j <= k - #Z_k} (D-hat_j - 1) - #Z_k."""

    k = np.arange(trace.n)
    revealed = k - trace.dormant
    excess = np.concatenate([[0], np.cumsum(np.asarray(d_hat) - 1)])
    expected = excess[revealed] - trace.dormant
    return int(np.count_nonzero(expected != trace.half_edges))


@register("growth-invariants")
def _growth_invariants(
    config: SuiteConfig, rng: np.random.Generator, report: SuiteReport
) -> None:
    law = dt.stable_offspring(config.alpha)
    n = config.size(1_000, 200)
    runs = config.size(1_000, 100)
    raised = identity = wrong_size = leftover = 0
    for _ in range(runs):
        degrees = dt.sample_conditioned_degrees(law, n, rng)
        d_hat, _ = dt.size_biased_reorder(degrees, rng)
        try:
            tree, trace = dt.grow_tree(n, d_hat, rng)
        except InvariantViolationError:
            raised += 1
            continue
        identity += half_edge_identity_failures(trace, d_hat) > 0
        wrong_size += tree.n != n
        leftover += trace.half_edges[-1] != 0
    for label, value in (
        ("runs raising an invariant violation", raised),
        ("runs breaking the half-edge identity", identity),
        ("trees without n vertices", wrong_size),
        ("runs ending with half-edges", leftover),
    ):
        report.add(
            CaseResult(
                f"{label} ({runs} runs, n={n})",
                "#H_k = sum (D-hat_j - 1) - #Z_k",
                float(value),
                0.0,
                0.0,
                kind="abs",
            )
        )
    activation_runs = config.size(300, 50)
    fractions = {}
    for size in (config.size(1_000, 200), config.size(10_000, 1_000)):
        cutoff = int(math.floor(law.m_n(size)))
        hits = 0
        for _ in range(activation_runs):
            degrees = dt.sample_conditioned_degrees(law, size, rng)
            d_hat, _ = dt.size_biased_reorder(degrees, rng)
            _, trace = dt.grow_tree(size, d_hat, rng, check_invariants=False)
            hits += trace.activated_before(cutoff)
        fractions[size] = hits / activation_runs
    (small, p_small), (large, p_large) = fractions.items()
    variance = p_small * (1 - p_small) + p_large * (1 - p_large)
    spread = math.sqrt(variance / activation_runs)
    anchor = "no activation before step m_n with high probability"
    report.add(
        CaseResult(
            f"fraction of runs activating before floor(m_n), n={large}",
            anchor,
            p_large,
            0.05,
            0.0,
            kind="upper",
            qualitative=True,
        )
    )
    report.add(
        CaseResult(
            f"activation fraction at n={large} against n={small}",
            anchor,
            p_large,
            p_small,
            3.0,
            kind="upper",
            stderr=spread,
            qualitative=True,
        )
    )


@register("theta-consistency")
def _theta_consistency(
    config: SuiteConfig, rng: np.random.Generator, report: SuiteReport
) -> None:
    finite = dt.uniform_offspring()
    report.add(
        CaseResult(
            "E[Theta_2^8] by enumeration, uniform{0,1,2}",
            "E[Theta_m^n] = P(N^n >= m)",
            enumerate_theta_expectation(finite, 8, 2),
            dt.prob_internal_at_least(finite, 8, 2),
            1e-10,
            kind="abs",
        )
    )
    law = dt.stable_offspring(config.alpha)
    n = config.size(2_000, 500)
    m = 10
    _, weights = dt.sample_theta_prefixes(
        law, n, m, config.size(200_000, 20_000), rng
    )
    report.add(
        _estimate_case(
            f"E[Theta_{m}^{n}] with stable offspring",
            "E[Theta_m^n] = P(N^n >= m)",
            _sample_mean(weights),
            dt.prob_internal_at_least(law, n, m),
        )
    )


def stick_profile(n: int, head: tuple[int, ...]) -> np.ndarray:
    """D-hat starting with ``head``, padded with ones then zeros to sum n - 1."""

    ones = n - 1 - sum(head)
    zeros = n - len(head) - ones
    if ones < 0 or zeros < 0 or min(head) < 1:
        raise ParameterError(f"cannot complete {head} to a sequence of size {n}.")
    return np.array([*head, *([1] * ones), *([0] * zeros)], dtype=np.int64)


STICK_HEADS = ((5, 3, 2), (2,) * 10, (10, 1, 1, 4))


@register("first-stick")
def _first_stick(
    config: SuiteConfig, rng: np.random.Generator, report: SuiteReport
) -> None:
    n, k = 100, 5
    runs = config.size(20_000, 2_000)
    for head in STICK_HEADS:
        d_hat = stick_profile(n, head)
        hits = sum(
            dt.grow_tree(n, d_hat, rng, check_invariants=False)[1].branch_time(1) > k
            for _ in range(runs)
        )
        report.add(
            _estimate_case(
                f"P(C_1 > {k}) for D-hat head {head}",
                "first k steps are all growth events",
                _proportion(hits, runs),
                dt.first_stick_survival(d_hat, k, n),
            )
        )


@register("beta-components")
def _beta_components(
    config: SuiteConfig, rng: np.random.Generator, report: SuiteReport
) -> None:
    law = dt.stable_offspring(config.alpha)
    n, k = config.size(10_000, 2_000), 3
    means = []
    for _ in range(config.size(200, 40)):
        tree, trace, _ = dt.sample_growth_tree(law, n, rng)
        mean = dt.tree_statistics(tree, trace, k).size_biased_mean
        means.append(mean if mean is not None else 0.0)
    report.add(
        CaseResult(
            f"E[F_*(k)/n] at n={n}, k={k}",
            "F_*(k) ~ Beta(1 - 1/alpha, k)",
            float(np.mean(means)),
            dt.beta_component_mean(config.alpha, k),
            0.10,
            kind="rel",
            qualitative=True,
        )
    )


CUMULATIVE_TIMES = (0.5, 1.0)


def discrete_to_continuous_suite(
    alpha: float,
    n: int,
    k: int,
    rng: np.random.Generator,
    replicas: int = 200,
    report: SuiteReport | None = None,
) -> SuiteReport:
    """Finite-n checks of the scaling limits of the growth algorithm.

    The survival of C_1/m_n uses the exact conditional probability given
    D-hat, so only degree sequences are sampled for it.
    """

    if n < 10_000:
        raise ParameterError("the discrete-to-continuous comparison needs n >= 10^4.")
    report = report or SuiteReport("discrete-to-continuous", alpha, -1, "custom")
    law = dt.stable_offspring(alpha)
    model = get_model(alpha)
    m_n = law.m_n(n)
    times = (0.5, 1.0, 2.0)
    survival = {t: [] for t in times}
    cumulative = {t: [] for t in CUMULATIVE_TIMES}
    components = []
    top_mismatches = 0
    for index in range(replicas):
        degrees = dt.sample_conditioned_degrees(law, n, rng)
        d_hat, _ = dt.size_biased_reorder(degrees, rng)
        for t in times:
            steps = min(int(math.floor(m_n * t)), n - 1)
            survival[t].append(dt.first_stick_survival(d_hat, steps, n))
        for t in CUMULATIVE_TIMES:
            cumulative[t].append(dt.rescaled_cumulative_degrees(d_hat, law, n, t))
        if index < max(replicas // 4, 10):
            tree, trace = dt.grow_tree(n, d_hat, rng, check_invariants=False)
            statistics = dt.tree_statistics(tree, trace, k)
            top = np.sort(degrees.entries)[::-1][:k]
            top_mismatches += not np.array_equal(statistics.top_degrees, top)
            mean = statistics.size_biased_mean
            components.append(mean if mean is not None else 0.0)
    for t in times:
        report.add(
            CaseResult(
                f"P(C_1/m_n >= t) against P(Y_1 >= t) at t={t}, n={n}",
                "first branch time converges to Y_1",
                float(np.mean(survival[t])),
                first_cut_survival(model, t, 50_000, _child_seed(rng)).mean,
                0.05,
                kind="abs",
                qualitative=True,
            )
        )
    report.add(
        CaseResult(
            f"E[F_*(k)/n] at n={n}, k={k}",
            "F_*(k) ~ Beta(1 - 1/alpha, k)",
            float(np.mean(components)),
            dt.beta_component_mean(alpha, k),
            0.10,
            kind="rel",
            qualitative=True,
        )
    )
    for t in CUMULATIVE_TIMES:
        report.add(
            CaseResult(
                f"mean rescaled cumulative degrees at t={t}, n={n}",
                "(1/a_n) sum_{i <= m_n t} D-hat_i converges to sigma-tilde_t",
                float(np.mean(cumulative[t])),
                sigma_tilde_mean(model, t),
                0.10,
                kind="rel",
                qualitative=True,
            )
        )
    sizes = (n // 10, 3 * n // 10, n)
    maxima = {
        size: [
            dt.sample_conditioned_degrees(law, size, rng).entries.max()
            / law.a_n(size)
            for _ in range(replicas)
        ]
        for size in sizes
    }
    for size in sizes[:-1]:
        report.add(
            CaseResult(
                f"KS of D_(1)/a_n between n={size} and n={n}",
                "rescaled top degrees are stable in n",
                float(stats.ks_2samp(maxima[size], maxima[n]).pvalue),
                0.01,
                0.01,
                kind="pvalue",
                qualitative=True,
            )
        )
    report.add(
        CaseResult(
            f"grown trees whose top-{k} degrees differ from D",
            PLUMBING,
            float(top_mismatches),
            0.0,
            0.0,
            kind="abs",
        )
    )
    report.add(
        CaseResult(
            "m_n = n / a_n",
            PLUMBING,
            m_n,
            n / law.a_n(n),
            1e-12,
            kind="rel",
        )
    )
    return report


@register("discrete-to-continuous")
def _discrete_to_continuous(
    config: SuiteConfig, rng: np.random.Generator, report: SuiteReport
) -> None:
    discrete_to_continuous_suite(
        config.alpha,
        config.size(100_000, 10_000),
        3,
        rng,
        replicas=config.size(200, 40),
        report=report,
    )


SIZE_BIASED_VALUES = (5.0, 3.0, 2.0, 1.0, 1.0)


@register("size-biased-point-process")
def _size_biased_point_process(
    config: SuiteConfig, rng: np.random.Generator, report: SuiteReport
) -> None:
    values = np.array(SIZE_BIASED_VALUES)
    runs = config.size(100_000, 10_000)
    first = np.zeros(values.size, dtype=np.int64)
    at_half = np.empty(runs)
    for index in range(runs):
        process = dt.size_biased_point_process(values, rng)
        first[process.indices[0]] += 1
        at_half[index] = process.cumulative(0.5)
    for label in range(3):
        report.add(
            _estimate_case(
                f"first pick is index {label}",
                "first pick is size-biased",
                _proportion(int(first[label]), runs),
                values[label] / values.sum(),
            )
        )
    report.add(
        _estimate_case(
            "E[S(1/2)]",
            "S(t) = sum Y 1{E <= Y t}",
            _sample_mean(at_half),
            float(np.sum(values * -np.expm1(-0.5 * values))),
        )
    )
    reordered = np.zeros(values.size, dtype=np.int64)
    degrees = values.astype(np.int64)
    for _ in range(runs):
        _, sigma = dt.size_biased_reorder(degrees, rng)
        reordered[sigma[0] - 1] += 1
    report.add(
        _estimate_case(
            "size-biased reorder puts index 0 first",
            "first pick is size-biased",
            _proportion(int(reordered[0]), runs),
            values[0] / values.sum(),
        )
    )


@register("polya-urn")
def _polya_urn(
    config: SuiteConfig, rng: np.random.Generator, report: SuiteReport
) -> None:
    steps = config.size(10_000, 2_000)
    replicas = config.size(10_000, 2_000)
    fractions, frequencies = polya_urn_terminal(1.0, 2.0, 1.0, steps, replicas, rng)
    report.add(
        CaseResult(
            "KS of the classical urn fraction against Uniform(0, 1)",
            "urn fraction converges almost surely",
            float(stats.kstest(fractions, "uniform").pvalue),
            0.01,
            0.01,
            kind="pvalue",
        )
    )
    report.add(
        CaseResult(
            "median |A_n/M_n - acceptance frequency|, classical urn",
            "fraction and frequency share the limit",
            float(np.median(np.abs(fractions - frequencies))),
            0.0,
            0.02,
            kind="abs",
        )
    )
    schedule = 1.0 + (np.arange(steps) % 3)
    fractions, frequencies = polya_urn_terminal(
        0.5, 2.0, schedule, steps, replicas, rng
    )
    report.add(
        CaseResult(
            "median |A_n/M_n - acceptance frequency|, periodic increments",
            "fraction and frequency share the limit",
            float(np.median(np.abs(fractions - frequencies))),
            0.0,
            0.02,
            kind="abs",
        )
    )
