import numpy as np
import pytest
from hypothesis import given

from modehunt.kolmsig import kolmogorov_signatures
from modehunt.persistence1d import (PersistencePair, persistence_pairs, persistence_signatures,
                                    persistence_values, sup_mode_estimate)
from modehunt.signal import SignatureSequence, mode_count, sup_distance
from oracles import brute_persistence
from strategies import real_signals, same_grid_pairs


def test_examples():
    assert sorted(persistence_pairs([0, 2, 1, 3, 0])) == [PersistencePair(0, 3), PersistencePair(1, 2)]
    assert persistence_values([0, 2, 1, 3, 0]).tolist() == [3.0, 1.0]
    assert persistence_pairs([4, 4, 4]) == []
    assert persistence_pairs([0, 1, 0]) == [PersistencePair(0, 1)]


def test_signature_examples():
    assert persistence_signatures([0, 2, 1, 3, 0]).positives == (1.5, 0.5)
    assert persistence_signatures([0, 1, 0]).positives == (0.5,)
    assert persistence_signatures([0, 1, 2]).positives == ()


def test_pair_validation():
    with pytest.raises(ValueError):
        PersistencePair(1.0, 1.0)
    assert PersistencePair(0.5, 2.0).persistence == 1.5


@pytest.mark.parametrize("q, k", [(1.0, 1), (0.4, 2), (2.0, 0), (1.5, 1), (0.5, 2)])
def test_sup_mode_estimate(q, k):
    assert sup_mode_estimate(SignatureSequence((1.5, 0.5)), q) == k


def test_sup_mode_estimate_rejects_nonpositive():
    with pytest.raises(ValueError):
        sup_mode_estimate(SignatureSequence((1.0,)), 0.0)


def test_boundary_maximum_is_not_a_mode():
    # the right end is the highest run but has only one neighbour
    assert persistence_pairs([0, 2, 1, 5]) == [PersistencePair(1, 2)]


def test_matches_component_tracking_oracle():
    rng = np.random.default_rng(3)
    for _ in range(500):
        n = int(rng.integers(1, 11))
        v = rng.integers(0, 5, n).astype(float)
        got = sorted((p.birth, p.death) for p in persistence_pairs(v))
        assert got == sorted(brute_persistence(v)), v


@given(real_signals)
def test_pair_count_is_mode_count(v):
    assert len(persistence_pairs(v)) == mode_count(v)
    assert len(persistence_signatures(v)) == mode_count(v)


@given(same_grid_pairs())
def test_stability(p):
    f, g = p
    d = sup_distance(f, g)
    pf, pg = persistence_values(f), persistence_values(g)
    m = max(pf.size, pg.size)
    pf = np.pad(pf, (0, m - pf.size))
    pg = np.pad(pg, (0, m - pg.size))
    assert np.all(np.abs(pf - pg) <= 2 * d + 1e-12 * max(1.0, d))


@given(real_signals)
def test_sup_signatures_dominate_kolmogorov(v):
    # d_K <= d_inf on [0, 1], so the distance to any set shrinks
    ks, ss = kolmogorov_signatures(v), persistence_signatures(v)
    for k in range(len(ss)):
        assert ks[k] <= ss[k] * (1 + 1e-12) + 1e-12
