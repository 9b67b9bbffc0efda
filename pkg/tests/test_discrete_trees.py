import itertools
import math

import numpy as np
import pytest

from stable_trees import discrete_trees as dt
from stable_trees.errors import (
    CodewordError,
    ParameterError,
    SupportCapError,
    TreeStructureError,
)
from stable_trees.stable_density import get_model


@pytest.fixture(scope="module")
def stable_law():
    return dt.stable_offspring(1.5)


@pytest.fixture(scope="module")
def uniform_law():
    return dt.uniform_offspring()


def _build_tree(parents, root=1):
    return dt.RootedLabelledTree(tuple(parents), root)


# -- offspring laws ---------------------------------------------------------------


def test_stable_tail_starts_with_extinction_mass(stable_law):
    tails = stable_law.tail(np.arange(4))

    assert tails[0] == 1.0
    assert tails[1] == pytest.approx(1.0 - 1.0 / 1.5)
    assert tails[2] == pytest.approx(tails[1])
    assert stable_law.pmf(3)[1] == 0.0
    assert stable_law.p_zero == pytest.approx(2.0 / 3.0)


def test_stable_pmf_has_unit_mass_and_mean_one(stable_law):
    pmf = stable_law.pmf(200_000)

    assert pmf.sum() == pytest.approx(1.0, abs=1e-3)
    support = np.arange(pmf.size)
    # mean 1 up to the tail beyond the cap, which is of order cap**(1-alpha)
    assert support @ pmf == pytest.approx(1.0, abs=1e-2)


def test_stable_size_biased_tail_matches_pmf(stable_law):
    pmf = stable_law.pmf(2)

    tails = stable_law.size_biased_tail(np.array([2.0, 3.0]))

    assert tails[0] == 1.0
    assert tails[1] == pytest.approx(1.0 - 2.0 * pmf[2])


def test_stable_draws_have_extinction_frequency(stable_law):
    draws = stable_law.sample(np.random.default_rng(1), 50_000)
    zeros = np.mean(draws == 0)
    stderr = math.sqrt(zeros * (1 - zeros) / draws.size)

    assert abs(zeros - 1.0 / 1.5) < 4 * stderr
    assert not np.any(draws == 1)
    assert draws.min() >= 0


def test_size_biased_draws_are_at_least_two(stable_law):
    draws = stable_law.sample_size_biased(np.random.default_rng(2), 10_000)

    assert draws.min() >= 2


def test_finite_law_draws_follow_pmf(uniform_law):
    draws = uniform_law.sample(np.random.default_rng(3), 30_000)
    counts = np.bincount(draws, minlength=3) / draws.size

    assert draws.max() <= 2
    assert np.allclose(counts, 1.0 / 3.0, atol=0.02)


def test_normalisation_of_stable_family(stable_law):
    assert stable_law.a_n(1.5) == pytest.approx(1.0)
    assert stable_law.m_n(100.0) == pytest.approx(100.0 / stable_law.a_n(100.0))


def test_offspring_from_pmf_validates_law():
    with pytest.raises(ParameterError, match="mean 1"):
        dt.offspring_from_pmf([0.5, 0.5])
    with pytest.raises(ParameterError, match="probability vector"):
        dt.offspring_from_pmf([0.5, 0.6])
    with pytest.raises(ParameterError, match="degenerate"):
        dt.offspring_from_pmf([0.0, 1.0])


def test_offspring_by_name(uniform_law):
    assert dt.offspring_by_name("stable", 1.4).alpha == 1.4
    assert dt.offspring_by_name("uniform012", 1.4).max_degree == 2.0
    with pytest.raises(ParameterError, match="unknown offspring law"):
        dt.offspring_by_name("poisson", 1.5)


def test_size_biased_pmf_for_finite_law(uniform_law):
    assert np.allclose(dt.size_biased_pmf(uniform_law), [0.0, 1 / 3, 2 / 3])


def test_size_biased_pmf_needs_cap_for_stable_family(stable_law):
    with pytest.raises(ParameterError):
        dt.size_biased_pmf(stable_law)


# -- walks and conditioning ---------------------------------------------------------


def test_walk_pmf_is_a_convolution_power(uniform_law):
    assert np.allclose(dt.walk_pmf(uniform_law, 2, 4), np.array([1, 2, 3, 2, 1]) / 9)
    assert np.allclose(dt.walk_pmf(uniform_law, 0, 2), [1.0, 0.0, 0.0])


def test_walk_pmf_validates_arguments(uniform_law):
    with pytest.raises(ParameterError):
        dt.walk_pmf(uniform_law, -1, 4)
    with pytest.raises(SupportCapError):
        dt.walk_pmf(uniform_law, 2, 2**25)


def test_conditioning_probability_small_case(uniform_law):
    assert dt.conditioning_probability(uniform_law, 3) == pytest.approx(2.0 / 9.0)


def test_walk_local_limit_at_the_conditioning_point(stable_law):
    n = 100_000
    rescaled = stable_law.a_n(n) * dt.conditioning_probability(stable_law, n)

    assert rescaled == pytest.approx(get_model(1.5).p_zero, rel=0.02)


def test_walk_cdf_matches_the_stable_limit(stable_law):
    n = 100_000
    a_n = stable_law.a_n(n)
    walk = np.cumsum(dt.walk_pmf(stable_law, n, n + int(3 * a_n)))
    model = get_model(1.5)

    for x in (-1.0, 0.0, 1.0, 2.0):
        empirical = walk[int(math.floor(n + a_n * x))]
        assert abs(empirical - float(model.cdf(x))) < 0.01


def test_scaling_sequence_matches_the_tail_constant(stable_law):
    n = 10**8
    a_n = stable_law.a_n(n)
    c_alpha = get_model(1.5).c_alpha

    assert a_n == pytest.approx((n / 1.5) ** (1 / 1.5))
    assert stable_law.m_n(n) == pytest.approx(n / a_n)
    for x in (0.5, 1.0, 2.0):
        expected = c_alpha * x**-1.5 / 1.5
        tail = float(stable_law.tail([a_n * x])[0])
        assert n * tail == pytest.approx(expected, rel=1e-3)


def test_conditioned_degrees_sum_to_n_minus_one(stable_law):
    rng = np.random.default_rng(4)
    for n in (1, 5, 40):
        degrees = dt.sample_conditioned_degrees(stable_law, n, rng)
        assert degrees.n == n
        assert degrees.entries.sum() == n - 1
        assert degrees.trials >= 1


def test_conditioned_degrees_reject_impossible_sizes(stable_law):
    # p_1 = 0 and p_0 = 1/alpha: two copies can never sum to one
    with pytest.raises(ParameterError, match="vanishes"):
        dt.sample_conditioned_degrees(stable_law, 2, np.random.default_rng(0))


def test_degree_sequence_validates_sum():
    with pytest.raises(ParameterError):
        dt.DegreeSequence(np.array([1, 1, 1]))


def test_size_biased_reorder_keeps_entries_and_puts_zeros_last():
    degrees = dt.DegreeSequence(np.array([0, 3, 0, 1, 0]))

    d_hat, sigma = dt.size_biased_reorder(degrees, np.random.default_rng(5))

    assert sorted(d_hat.tolist()) == [0, 0, 0, 1, 3]
    assert d_hat[2:].tolist() == [0, 0, 0]
    assert np.array_equal(degrees.entries[sigma - 1], d_hat)
    assert sorted(sigma.tolist()) == [1, 2, 3, 4, 5]


def test_size_biased_reorder_picks_first_proportionally_to_degree():
    rng = np.random.default_rng(6)
    firsts = [
        dt.size_biased_reorder(np.array([3, 1, 0, 0]), rng)[0][0] for _ in range(8_000)
    ]
    frequency = np.mean(np.array(firsts) == 3)
    stderr = math.sqrt(0.75 * 0.25 / len(firsts))

    assert abs(frequency - 0.75) < 4 * stderr


# -- reverse Prufer codec ----------------------------------------------------------


def test_decode_repeated_root_gives_a_cherry():
    tree = dt.prufer_decode((1, 1))

    assert tree.root == 1
    assert tree.parents == (0, 1, 1)
    assert tree.children()[0] == [2, 3]


def test_decode_distinct_entries_give_a_path():
    tree = dt.prufer_decode((1, 2))

    assert tree.parents == (0, 1, 2)
    assert tree.height == 2


def test_decode_single_entry_codewords():
    assert dt.prufer_decode((1,)).parents == (0, 1)
    assert dt.prufer_decode((2,)).parents == (2, 0)


def test_codeword_rejects_out_of_range_entries():
    with pytest.raises(CodewordError):
        dt.Codeword((1, 4))
    with pytest.raises(CodewordError):
        dt.prufer_decode(())


@pytest.mark.parametrize("n", [3, 4, 5])
def test_codec_is_a_bijection_on_small_sizes(n):
    trees = set()
    for word in itertools.product(range(1, n + 1), repeat=n - 1):
        tree = dt.prufer_decode(word)
        assert dt.prufer_encode(tree).entries == word
        assert np.array_equal(tree.out_degrees(), dt.Codeword(word).multiplicities())
        trees.add((tree.parents, tree.root))

    assert len(trees) == n ** (n - 1)


def test_codec_round_trips_random_trees():
    rng = np.random.default_rng(7)
    for _ in range(200):
        n = int(rng.integers(2, 200))
        word = tuple(int(v) for v in rng.integers(1, n + 1, size=n - 1))
        tree = dt.prufer_decode(word)
        assert tree.n == n
        assert dt.prufer_encode(tree).entries == word


def test_rooted_tree_rejects_cycles_and_bad_roots():
    with pytest.raises(TreeStructureError):
        _build_tree([0, 3, 2])
    with pytest.raises(TreeStructureError):
        _build_tree([2, 1, 1], root=1)
    with pytest.raises(TreeStructureError):
        _build_tree([0, 5, 1])


def test_tree_shape_helpers():
    tree = _build_tree([0, 1, 1, 2])

    assert tree.out_degrees().tolist() == [2, 1, 0, 0]
    assert tree.depths().tolist() == [0, 1, 1, 2]
    assert dt.subtree_sizes(tree).tolist() == [4, 2, 1, 1]


def test_codeword_from_degrees_has_requested_multiplicities():
    degrees = dt.DegreeSequence(np.array([2, 0, 1, 0]))

    word = dt.codeword_from_degrees(degrees, np.random.default_rng(8))

    assert word.multiplicities().tolist() == [2, 0, 1, 0]
    assert dt.prufer_decode(word).out_degrees().tolist() == [2, 0, 1, 0]


def test_first_appearance_reorder():
    word = dt.Codeword((3, 3, 1))

    d_hat, sigma = dt.first_appearance_reorder(word, word.multiplicities())

    assert sigma.tolist() == [3, 1]
    assert d_hat.tolist() == [2, 1, 0]


def test_randomize_order_keeps_the_degree_multiset():
    tree = _build_tree([0, 1, 1, 2, 2, 2])

    ordered = dt.randomize_order(tree, np.random.default_rng(9))

    assert ordered.n == 6
    assert ordered.degrees[0] == 2
    assert sorted(ordered.degrees) == sorted(tree.out_degrees().tolist())


def test_ordered_tree_validates_lukasiewicz_path():
    assert dt.OrderedTree((2, 0, 0)).n == 3
    with pytest.raises(TreeStructureError):
        dt.OrderedTree((0, 1))
    with pytest.raises(TreeStructureError):
        dt.OrderedTree((1, 1))


def test_bienayme_via_codeword_returns_trees_of_requested_size(uniform_law):
    tree = dt.sample_bienayme_via_codeword(uniform_law, 12, np.random.default_rng(10))

    assert tree.n == 12


# -- growth algorithm ----------------------------------------------------------------


def test_growth_builds_tree_with_revealed_degrees():
    d_hat = np.array([3, 2, 1, 1, 0, 0, 0, 0])
    for seed in range(20):
        tree, trace = dt.grow_tree(8, d_hat, np.random.default_rng(seed))
        assert tree.n == 8
        assert tree.root == 1
        assert sorted(tree.out_degrees().tolist()) == sorted(d_hat.tolist())
        assert trace.half_edges[0] == 0
        assert trace.half_edges[-1] == 0
        assert trace.events[0] == dt.GROWTH


def test_growth_trace_records_events_consistently():
    tree, trace = dt.grow_tree(
        30,
        np.array([5, 4, 3, 3, 2, 2, 2, 2, 2, 2, 2] + [0] * 19),
        np.random.default_rng(3),
    )

    branchings = np.flatnonzero(trace.events == dt.BRANCHING) + 1
    assert trace.branch_steps.tolist() == branchings.tolist()
    assert trace.attach_steps.size == trace.branch_steps.size
    assert np.all(trace.attach_steps < trace.attach_revealed)
    assert np.all(trace.attach_revealed < trace.branch_steps)
    assert trace.branch_time(trace.branch_steps.size + 1) == math.inf
    assert trace.activations == int(np.sum(trace.events == dt.ACTIVATION))
    assert trace.activated_before(30) == (trace.activations > 0)


def test_activated_before_looks_at_earlier_steps_only():
    empty = np.zeros(0, dtype=np.int64)
    trace = dt.GrowthTrace(
        n=5,
        events=np.array(
            [dt.GROWTH, dt.BRANCHING, dt.ACTIVATION, dt.GROWTH], dtype=np.int8
        ),
        half_edges=np.zeros(5, dtype=np.int64),
        dormant=np.zeros(5, dtype=np.int64),
        active=np.arange(1, 5),
        branch_steps=np.array([2]),
        attach_steps=np.array([0]),
        attach_revealed=np.array([1]),
        reveal_step=empty,
    )

    assert trace.first_activation() == 3
    assert not trace.activated_before(3)
    assert trace.activated_before(4)
    assert not trace.activated_before(0)


def test_growth_rejects_inconsistent_degrees():
    with pytest.raises(ParameterError):
        dt.grow_tree(4, [1, 1, 1, 1], np.random.default_rng(0))


def test_sample_growth_tree_from_stable_law(stable_law):
    tree, trace, d_hat = dt.sample_growth_tree(
        stable_law, 200, np.random.default_rng(11)
    )

    assert tree.n == 200
    assert d_hat.sum() == 199
    assert trace.half_edges[-1] == 0
    assert sorted(tree.out_degrees().tolist()) == sorted(d_hat.tolist())


def test_first_stick_survival_formula():
    d_hat = [3, 1] + [1] * 5 + [0] * 3

    assert dt.first_stick_survival(d_hat, 1, 10) == 1.0
    assert dt.first_stick_survival(d_hat, 2, 10) == pytest.approx(0.75)
    assert dt.first_stick_survival(d_hat, 0, 10) == 1.0
    with pytest.raises(ParameterError):
        dt.first_stick_survival(d_hat, 10, 10)


def test_first_stick_survival_matches_simulation():
    d_hat = np.array([4, 3, 2] + [1] * 5 + [0] * 7)
    n, k = d_hat.size, 4
    rng = np.random.default_rng(12)
    hits = 0
    trials = 4_000
    for _ in range(trials):
        _, trace = dt.grow_tree(n, d_hat, rng, check_invariants=False)
        hits += trace.branch_time(1) > k
    frequency = hits / trials
    exact = dt.first_stick_survival(d_hat, k, n)

    assert abs(frequency - exact) < 4 * math.sqrt(exact * (1 - exact) / trials)


def test_rescaled_cumulative_degrees(stable_law):
    n = 10_000
    d_hat = np.ones(n, dtype=np.int64)
    d_hat[0] = 5
    a_n = stable_law.a_n(n)

    for t in (0.5, 1.0):
        steps = int(math.floor(stable_law.m_n(n) * t))
        assert steps > 1
        assert dt.rescaled_cumulative_degrees(d_hat, stable_law, n, t) == (
            pytest.approx((steps + 4.0) / a_n)
        )
    assert dt.rescaled_cumulative_degrees(d_hat, stable_law, n, 0.0) == 0.0
    with pytest.raises(ParameterError):
        dt.rescaled_cumulative_degrees(d_hat, stable_law, n, -1.0)


# -- measure change ------------------------------------------------------------------


def test_empty_prefix_has_unit_weight(uniform_law):
    assert dt.theta_weight([], 6, uniform_law) == pytest.approx(1.0)


def test_theta_vanishes_on_infeasible_prefixes(uniform_law):
    assert dt.theta_weight([2, 2, 2], 5, uniform_law) == 0.0


def test_theta_weights_validate_prefix_shape(uniform_law):
    weights = dt.ThetaWeights(uniform_law, 6, 2)

    with pytest.raises(ParameterError, match="length 2"):
        weights.log_theta([[1, 1, 1]])
    with pytest.raises(ParameterError, match="at least 1"):
        weights.log_theta([[0, 1]])
    with pytest.raises(ParameterError):
        dt.ThetaWeights(uniform_law, 4, 4)


def test_theta_weights_handle_huge_stable_prefixes(stable_law):
    weights = dt.ThetaWeights(stable_law, 50, 2)

    values = weights.theta(np.array([[2, 3], [10**15, 2]]))

    assert np.all(np.isfinite(values))
    assert values[1] == 0.0


def test_prob_internal_at_least_small_case(uniform_law):
    assert dt.prob_internal_at_least(uniform_law, 3, 1) == pytest.approx(1.0)
    assert dt.prob_internal_at_least(uniform_law, 3, 2) == pytest.approx(0.5)
    assert dt.prob_internal_at_least(uniform_law, 3, 3) == pytest.approx(0.0)


def test_theta_expectation_matches_internal_count(uniform_law):
    n, m = 40, 3
    rng = np.random.default_rng(13)
    _, weights = dt.sample_theta_prefixes(uniform_law, n, m, 40_000, rng)
    mean = weights.mean()
    stderr = weights.std(ddof=1) / math.sqrt(weights.size)

    assert abs(mean - dt.prob_internal_at_least(uniform_law, n, m)) < 4 * stderr


# -- statistics ----------------------------------------------------------------------


def test_tree_statistics_of_a_grown_tree(stable_law):
    rng = np.random.default_rng(14)
    tree, trace, _ = dt.sample_growth_tree(stable_law, 300, rng)

    statistics = dt.tree_statistics(tree, trace, 2, rng)

    assert statistics.height == tree.height
    assert len(statistics.branch_steps) == 2
    assert statistics.top_degrees.size == 2
    assert statistics.top_degrees[0] >= statistics.top_degrees[1]
    assert statistics.spanned_size + statistics.components.sum() == 300
    if statistics.components.size:
        assert 0.0 < statistics.size_biased_pick <= 1.0


def test_tree_statistics_requires_positive_k():
    tree, trace = dt.grow_tree(3, [2, 0, 0], np.random.default_rng(0))

    with pytest.raises(ParameterError):
        dt.tree_statistics(tree, trace, 0)


def test_beta_component_mean():
    assert dt.beta_component_mean(1.5, 3) == pytest.approx(0.1)


def test_size_biased_point_process_accumulates_values():
    process = dt.size_biased_point_process(
        [5.0, 3.0, 0.0, 2.0], np.random.default_rng(0)
    )

    assert sorted(process.indices.tolist()) == [0, 1, 3]
    assert process.cumulative(0.0) == 0.0
    assert process.cumulative(np.inf) == pytest.approx(10.0)
    assert np.all(np.diff(process.times) >= 0)


def test_size_biased_point_process_first_pick_is_size_biased():
    rng = np.random.default_rng(15)
    firsts = [
        dt.size_biased_point_process([5.0, 3.0, 2.0], rng).indices[0]
        for _ in range(6_000)
    ]
    frequency = np.mean(np.array(firsts) == 0)
    stderr = math.sqrt(0.25 / len(firsts))

    assert abs(frequency - 0.5) < 4 * stderr
