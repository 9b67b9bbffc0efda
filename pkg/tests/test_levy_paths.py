import math
from functools import partial

import numpy as np
import pytest
from scipy import stats

from stable_trees.errors import ParameterError
from stable_trees.levy_paths import (
    Estimate,
    JumpPath,
    WeightedAccumulator,
    WeightedSample,
    compensation_drift,
    constant_statistic,
    exact_marginal_sample,
    first_cut_survival,
    importance_estimate,
    importance_estimates,
    integral_of_path,
    laplace_statistic,
    log_martingale_weight,
    log_martingale_weights,
    martingale_key_estimate,
    quadratic_variation,
    quadratic_variation_bound,
    quadvar_lemma_estimate,
    sample_subordinator_batch,
    sample_subordinator_path,
    sigma_tilde_laplace,
    sigma_tilde_laplace_slope,
    sigma_tilde_mean,
    sigma_tilde_variance_estimate,
    truncation_bias,
    value_statistic,
)
from stable_trees.stable_density import get_model


@pytest.fixture(scope="module")
def model():
    return get_model(1.5)


def _build_path(**kwargs):
    return JumpPath.from_jumps(1.0, [(0.5, 2.0), (0.2, 1.0)], drift=0.1, **kwargs)


def test_jump_path_evaluates_value_integral_and_quadratic_variation():
    path = _build_path()

    assert path.jumps == [(0.2, 1.0), (0.5, 2.0)]
    assert path.value(0.6) == pytest.approx(3.06)
    assert integral_of_path(path, 0.6) == pytest.approx(0.018 + 0.4 + 0.2)
    assert quadratic_variation(path, 1.0) == pytest.approx(5.0)
    assert path.value(0.0) == 0.0


@pytest.mark.parametrize(
    "kwargs, message",
    [
        ({"horizon": 1.0, "times": [0.5, 0.2], "sizes": [1.0, 1.0]}, "increasing"),
        ({"horizon": 1.0, "times": [1.5], "sizes": [1.0]}, "lie in"),
        ({"horizon": 1.0, "times": [0.5], "sizes": [1.0, 2.0]}, "same length"),
        ({"horizon": 0.0, "times": [], "sizes": []}, "horizon"),
    ],
)
def test_jump_path_rejects_malformed_input(kwargs, message):
    with pytest.raises(ParameterError, match=message):
        JumpPath(**kwargs)


def test_jump_path_rejects_jumps_below_truncation():
    with pytest.raises(ParameterError, match="truncation"):
        JumpPath(1.0, [0.5], [0.01], truncation=0.1)


def test_jump_path_rejects_times_outside_horizon():
    with pytest.raises(ParameterError):
        _build_path().value(1.5)


def test_batch_evaluation_matches_single_paths(model):
    rng = np.random.default_rng(3)
    batch = sample_subordinator_batch(model, 2.0, 1e-2, 5, rng)

    values = batch.value(1.3)
    integrals = batch.integral(1.3)
    variations = batch.quadratic_variation(1.3)
    for index in range(5):
        path = batch.path(index)
        assert values[index] == pytest.approx(path.value(1.3))
        assert integrals[index] == pytest.approx(integral_of_path(path, 1.3))
        assert variations[index] == pytest.approx(quadratic_variation(path, 1.3))


def test_batch_weights_match_single_path_weights(model):
    rng = np.random.default_rng(4)
    batch = sample_subordinator_batch(model, 1.0, 1e-2, 3, rng)

    weights = log_martingale_weights(batch, 1.0, model)
    for index in range(3):
        single = log_martingale_weight(batch.path(index), 1.0, model)
        assert weights[index] == pytest.approx(single)


def test_batch_rejects_unknown_replica(model):
    batch = sample_subordinator_batch(model, 1.0, 1e-2, 2, np.random.default_rng(0))

    with pytest.raises(ParameterError):
        batch.path(2)


def test_drift_mode_compensates_small_jumps(model):
    rng = np.random.default_rng(1)
    kept = sample_subordinator_path(model, 1.0, 1e-2, rng)
    dropped = sample_subordinator_path(model, 1.0, 1e-2, rng, small_jumps="drop")

    assert kept.drift == pytest.approx(compensation_drift(model, 1e-2))
    assert dropped.drift == 0.0
    assert truncation_bias(model, 2.0, 1e-2) == pytest.approx(2.0 * kept.drift)
    assert np.all(kept.sizes > 1e-2)


def test_unknown_small_jump_mode_is_rejected(model):
    with pytest.raises(ParameterError, match="small_jumps"):
        sample_subordinator_batch(
            model, 1.0, 1e-2, 2, np.random.default_rng(0), small_jumps="keep"
        )


def test_exact_marginal_matches_laplace_transform(model):
    rng = np.random.default_rng(11)
    t, lam = 0.5, 1.0
    values = np.exp(-lam * exact_marginal_sample(model, t, rng, size=40_000))

    target = math.exp(-t * model.alpha * lam ** (model.alpha - 1.0))
    stderr = values.std(ddof=1) / math.sqrt(values.size)
    assert abs(values.mean() - target) < 4 * stderr


def test_truncated_paths_match_laplace_transform(model):
    rng = np.random.default_rng(12)
    t, lam = 0.5, 1.0
    batch = sample_subordinator_batch(model, t, 1e-3, 20_000, rng)
    values = np.exp(-lam * batch.value(t))

    target = math.exp(-t * model.alpha * lam ** (model.alpha - 1.0))
    stderr = values.std(ddof=1) / math.sqrt(values.size)
    assert abs(values.mean() - target) < 4 * stderr


def test_exact_marginal_rejects_non_positive_time(model):
    with pytest.raises(ParameterError):
        exact_marginal_sample(model, 0.0, np.random.default_rng(0))


def test_truncated_path_values_follow_the_exact_marginal(model):
    rng = np.random.default_rng(13)
    t = 0.5
    paths = sample_subordinator_batch(model, t, 1e-3, 5_000, rng).value(t)
    exact = exact_marginal_sample(model, t, rng, size=5_000)

    assert stats.ks_2samp(paths, exact).pvalue > 0.01


def test_refining_the_truncation_keeps_the_tilted_mean(model):
    coarse = importance_estimate(value_statistic, model, 0.5, 20_000, 41, epsilon=1e-3)
    fine = importance_estimate(value_statistic, model, 0.5, 20_000, 42, epsilon=1e-4)

    assert abs(coarse.mean - fine.mean) <= 3 * math.hypot(coarse.stderr, fine.stderr)


def test_estimate_z_score_and_within():
    estimate = Estimate(1.1, 0.05, 100)

    assert estimate.z_score(1.0) == pytest.approx(2.0)
    assert estimate.within(1.0)
    assert not estimate.within(1.0, standard_errors=1.0)
    assert Estimate(1.0, 0.0, 10).z_score(1.0) == 0.0
    assert Estimate(1.0, 0.0, 10).z_score(2.0) == math.inf


def test_accumulator_merge_equals_single_pass():
    rng = np.random.default_rng(5)
    log_weights = rng.normal(size=50)
    values = rng.random(50)
    whole = WeightedAccumulator()
    whole.add(log_weights, values)
    left, right = WeightedAccumulator(), WeightedAccumulator()
    left.add(log_weights[:20], values[:20])
    right.add(log_weights[20:], values[20:])

    merged = left.merge(right)

    assert merged.count == 50
    assert merged.estimate().mean == pytest.approx(whole.estimate().mean)
    assert merged.estimate().stderr == pytest.approx(whole.estimate().stderr)
    expected = np.mean(np.exp(log_weights) * values)
    assert whole.estimate().mean == pytest.approx(expected)


def test_accumulator_needs_two_replicas():
    accumulator = WeightedAccumulator()
    accumulator.add([0.0], [1.0])

    with pytest.raises(ParameterError, match="at least two"):
        accumulator.estimate()


def test_weighted_sample_rejects_negative_weight():
    with pytest.raises(ParameterError):
        WeightedSample(None, -0.5)


def test_martingale_has_mean_one(model):
    estimate = importance_estimate(
        constant_statistic, model, 0.5, 20_000, seed=21, epsilon=1e-3
    )

    assert estimate.within(1.0, standard_errors=4.0)


def test_importance_estimates_share_paths_and_are_reproducible(model):
    statistics = {
        "one": constant_statistic,
        "laplace": partial(laplace_statistic, lam=1.0),
    }
    first = importance_estimates(statistics, model, 0.5, 500, seed=8, epsilon=1e-2)
    second = importance_estimates(statistics, model, 0.5, 500, seed=8, epsilon=1e-2)

    assert first == second
    assert set(first) == {"one", "laplace"}


def test_importance_estimate_validates_arguments(model):
    with pytest.raises(ParameterError, match="replicas"):
        importance_estimate(value_statistic, model, 0.5, 1, seed=0)
    with pytest.raises(ParameterError, match="epsilon"):
        importance_estimate(value_statistic, model, 0.5, 10, seed=0, epsilon=0.0)


def test_weighted_laplace_matches_quadrature(model):
    estimate = importance_estimate(
        partial(laplace_statistic, lam=1.0), model, 0.5, 20_000, seed=31, epsilon=1e-3
    )

    assert estimate.within(sigma_tilde_laplace(model, 1.0, 0.5), standard_errors=4.0)


def test_laplace_transform_is_one_at_zero(model):
    assert sigma_tilde_laplace(model, 0.0, 1.0) == pytest.approx(1.0, abs=1e-7)


def test_laplace_slope_is_minus_the_mean(model):
    slope = sigma_tilde_laplace_slope(model, 1.0)

    assert -slope == pytest.approx(sigma_tilde_mean(model, 1.0), rel=1e-2)


def test_laplace_transform_validates_arguments(model):
    with pytest.raises(ParameterError):
        sigma_tilde_laplace(model, -1.0, 1.0)
    with pytest.raises(ParameterError):
        sigma_tilde_laplace(model, 1.0, 0.0)


def test_laplace_transform_is_decreasing_and_log_convex(model):
    grid = np.arange(0.0, 4.0 + 1e-9, 0.25)
    log_values = np.log([sigma_tilde_laplace(model, lam, 1.0) for lam in grid])

    assert np.all(np.diff(log_values) < 0)
    assert np.all(np.diff(log_values, 2) >= -1e-8)


def test_tilted_mean_grows_like_alpha_t_to_alpha_minus_one(model):
    t = 50.0
    ratio = sigma_tilde_mean(model, t) / (model.alpha * t ** (model.alpha - 1.0))

    assert 0.95 <= ratio <= 1.05


def test_tilted_mean_is_increasing(model):
    means = [sigma_tilde_mean(model, t) for t in (0.25, 0.5, 1.0, 2.0)]

    assert all(left < right for left, right in zip(means, means[1:]))


def test_quadratic_variation_bound_is_finite_and_positive(model):
    bound = quadratic_variation_bound(model)

    assert math.isfinite(bound)
    assert bound > 0.0


def test_martingale_key_identity(model):
    estimate, oracle = martingale_key_estimate(
        model, 0.5, 0.5, 20_000, seed=41, epsilon=1e-3
    )

    assert oracle == pytest.approx(float(model.density(-0.5)))
    assert estimate.within(oracle, standard_errors=4.0)


def test_martingale_key_rejects_negative_shift(model):
    with pytest.raises(ParameterError):
        martingale_key_estimate(model, -1.0, 0.5, 10, seed=0)


def test_quadvar_lemma_identity(model):
    estimate, oracle = quadvar_lemma_estimate(
        model, 0.5, 0.5, 20_000, seed=51, epsilon=1e-3
    )

    assert 0.0 < oracle < 1.0
    assert estimate.within(oracle, standard_errors=4.0)


def test_variance_report_scales_by_time_power(model):
    report = sigma_tilde_variance_estimate(model, 1.0, 2_000, seed=61, epsilon=1e-2)

    assert report.variance == pytest.approx(
        report.second_moment.mean - report.mean.mean**2
    )
    assert report.scaled(model.alpha) == pytest.approx(report.variance)


def test_first_cut_survival_decreases_in_time(model):
    values = [
        first_cut_survival(model, t, 5_000, seed=71).mean for t in (0.25, 1.0, 3.0)
    ]

    assert all(0.0 < value < 1.0 for value in values)
    assert values[0] > values[1] > values[2]
