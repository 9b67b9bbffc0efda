import numpy as np
import pytest

from stable_trees import discrete_trees as dt
from stable_trees.errors import ParameterError
from stable_trees.verify.oracles import (
    enumerate_conditioned_gw,
    enumerate_theta_expectation,
    polya_urn_simulate,
    polya_urn_terminal,
    unnormalised_tree_mass,
)


@pytest.fixture(scope="module")
def uniform_law():
    return dt.uniform_offspring()


def test_enumeration_of_three_vertex_trees(uniform_law):
    law = enumerate_conditioned_gw(uniform_law, 3)

    assert set(law) == {dt.OrderedTree((1, 1, 0)), dt.OrderedTree((2, 0, 0))}
    assert all(p == pytest.approx(0.5) for p in law.values())


def test_enumeration_counts_motzkin_trees(uniform_law):
    # uniform{0,1,2} weights every tree of size n by 3^-n
    for n, count in ((4, 4), (5, 9), (6, 21)):
        law = enumerate_conditioned_gw(uniform_law, n)

        assert len(law) == count
        assert sum(law.values()) == pytest.approx(1.0)
        assert max(law.values()) == pytest.approx(1.0 / count)


def test_enumeration_matches_cycle_lemma(uniform_law):
    for n in range(1, 8):
        mass = unnormalised_tree_mass(uniform_law, n)

        assert mass == pytest.approx(dt.conditioning_probability(uniform_law, n) / n)


def test_enumeration_rejects_stable_law_and_large_n(uniform_law):
    with pytest.raises(ParameterError):
        enumerate_conditioned_gw(dt.stable_offspring(1.5), 3)
    with pytest.raises(ParameterError, match="between 1 and 8"):
        enumerate_conditioned_gw(uniform_law, 9)


def test_theta_expectation_matches_internal_vertex_probability(uniform_law):
    for m in (1, 2):
        exact = enumerate_theta_expectation(uniform_law, 3, m)

        assert exact == pytest.approx(dt.prob_internal_at_least(uniform_law, 3, m))


def test_urn_always_accepts_when_full():
    urn = polya_urn_simulate(2.0, 2.0, 1.0, 50, np.random.default_rng(0))

    assert np.all(urn.fractions == 1.0)
    assert np.all(urn.frequencies == 1.0)
    assert urn.terminal_gap == 0.0


def test_urn_never_accepts_when_empty():
    urn = polya_urn_simulate(0.0, 1.0, [0.5, 1.0, 2.0], 3, np.random.default_rng(0))

    assert urn.terminal_fraction == 0.0
    assert np.all(urn.frequencies == 0.0)
    assert urn.increments.tolist() == [0.5, 1.0, 2.0]


def test_urn_trajectory_is_a_fraction():
    urn = polya_urn_simulate(1.0, 2.0, 1.0, 500, np.random.default_rng(3))

    assert urn.fractions.shape == (500,)
    assert np.all((urn.fractions > 0) & (urn.fractions < 1))
    assert np.all((urn.frequencies >= 0) & (urn.frequencies <= 1))


def test_urn_validation():
    rng = np.random.default_rng(0)

    with pytest.raises(ParameterError):
        polya_urn_simulate(3.0, 2.0, 1.0, 10, rng)
    with pytest.raises(ParameterError, match="positive"):
        polya_urn_simulate(1.0, 2.0, [1.0, -1.0], 2, rng)
    with pytest.raises(ParameterError, match="at least 5"):
        polya_urn_simulate(1.0, 2.0, [1.0, 1.0], 5, rng)


def test_terminal_urns_have_uniform_mean():
    fractions, frequencies = polya_urn_terminal(
        1.0, 2.0, 1.0, 400, 4_000, np.random.default_rng(11)
    )

    assert fractions.shape == frequencies.shape == (4_000,)
    # Uniform(0, 1) limit: mean 1/2, standard error about 0.0046
    assert fractions.mean() == pytest.approx(0.5, abs=0.025)
    assert np.median(np.abs(fractions - frequencies)) < 0.05
