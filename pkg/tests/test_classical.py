import numpy as np
import pytest

from cekit import channels as chn
from cekit.cause import (binary_entropy, capacity_lower_bound, ce_max, ce_min,
                         classical_ace, classical_ce_min)

from oracles import ratio_sup_sampling


def test_bsc():
    assert classical_ace(chn.binary_symmetric(0.1)) == pytest.approx(0.8)


def test_ii_d_example():
    q = chn.ii_d_example()
    assert classical_ace(q) == pytest.approx(1)
    res = classical_ce_min(q)
    assert res.value < 1e-12
    p, p2 = res.pair
    assert np.all(p * p2 == 0)
    assert p.sum() == pytest.approx(1) and p2.sum() == pytest.approx(1)


@pytest.mark.parametrize("seed", range(5))
def test_ace_equals_quantum_ce_max(seed, quick):
    rng = np.random.default_rng(seed)
    q = chn.StochasticChannel(rng.dirichlet(np.ones(3), size=4).T)
    assert ce_max(chn.embed_classical(q), quick).value == pytest.approx(classical_ace(q), abs=1e-6)


@pytest.mark.parametrize("seed", range(5))
def test_ace_is_ratio_sup(seed):
    rng = np.random.default_rng(seed)
    q = rng.dirichlet(np.ones(3), size=3).T
    sampled = ratio_sup_sampling(q, 200, seed)
    assert sampled <= classical_ace(q) + 1e-12
    assert sampled >= classical_ace(q) - 0.1


@pytest.mark.parametrize("seed", range(3))
def test_classical_ce_min_matches_embedding(seed, quick):
    rng = np.random.default_rng(seed + 100)
    q = chn.StochasticChannel(rng.dirichlet(np.ones(4), size=3).T)
    lp = classical_ce_min(q).value
    # the quantum embedding can only do better (it has the classical pairs)
    assert ce_min(chn.embed_classical(q), quick).value <= lp + 1e-6


def test_classical_ce_min_permutation():
    q = chn.StochasticChannel(np.eye(3)[[2, 0, 1]])
    assert classical_ce_min(q).value == pytest.approx(1)


@pytest.mark.parametrize("v, expect", [(1.0, 1.0), (0.0, 0.0), (0.5, 1 - binary_entropy(0.25))])
def test_capacity_bound(v, expect):
    assert capacity_lower_bound(v) == pytest.approx(expect, abs=1e-12)


def test_capacity_bound_value():
    assert capacity_lower_bound(0.5) == pytest.approx(0.18872187554, abs=1e-10)
    with pytest.raises(ValueError):
        capacity_lower_bound(1.5)
