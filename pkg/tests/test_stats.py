import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from modehunt.kolmsig import kolmogorov_signatures
from modehunt.signal import SignatureSequence, mode_count
from modehunt.stats import (GaussianModel, ModeCI, MomentModel, band_covers, confidence_band,
                            detection_bound, deviation_bound, difference_sigma, gevl_constants,
                            holder_bound, mode_ci, mode_estimate, monotone_sup_fit, sample_moments,
                            tau, tau_gauss, threshold)
from oracles import brute_monotone_fit
from strategies import small_ints

UNIT = MomentModel(1.0, 1.0)
S3 = SignatureSequence((0.5, 0.2, 0.05))


def test_models_validate():
    with pytest.raises(ValueError):
        MomentModel(0.0, 1.0)
    with pytest.raises(ValueError):
        MomentModel(1.0, -1.0)
    with pytest.raises(ValueError):
        GaussianModel(0.0)
    assert GaussianModel(2.0).as_moments() == MomentModel(2.0, 4.0)
    with pytest.raises(ValueError):
        ModeCI(3, 2)


def test_deviation_bound():
    assert deviation_bound(1e6, 10, UNIT) == 0.0
    assert deviation_bound(1e-9, 10, UNIT) == 1.0
    assert deviation_bound(0.311003, 100, UNIT) == pytest.approx(0.05, abs=1e-5)
    with pytest.raises(ValueError):
        deviation_bound(0.0, 10, UNIT)


def test_tau_spot_values():
    assert tau(100, 0.05, UNIT) == pytest.approx(0.311003, abs=1e-5)
    assert tau_gauss(100, 0.05, GaussianModel(1.0)) == pytest.approx(0.271620, abs=1e-5)
    with pytest.raises(ValueError):
        tau(100, 1.0, UNIT)
    with pytest.raises(ValueError):
        tau_gauss(100, 0.0, GaussianModel(1.0))


def test_tau_root_n_scaling():
    r = tau(40000, 0.05, UNIT) / tau(10000, 0.05, UNIT)
    assert abs(r - 0.5) <= 0.01


@pytest.mark.parametrize("n", [1, 10, 100, 10**4, 10**6])
@pytest.mark.parametrize("alpha", [1e-6, 0.01, 0.05, 0.5, 0.99])
@pytest.mark.parametrize("kappa, v", [(0.1, 0.01), (1, 1), (3, 0.5), (0.5, 4)])
def test_tau_inverts_deviation_bound(n, alpha, kappa, v):
    m = MomentModel(kappa, v)
    assert deviation_bound(tau(n, alpha, m), n, m) == pytest.approx(alpha, rel=1e-12, abs=1e-12)


@pytest.mark.parametrize("n", [10, 1000])
@pytest.mark.parametrize("alpha", [0.01, 0.1, 0.5])
@pytest.mark.parametrize("sigma", [0.1, 1.0, 7.0])
def test_gaussian_threshold_is_sharper(n, alpha, sigma):
    g = GaussianModel(sigma)
    assert tau_gauss(n, alpha, g) <= tau(n, alpha, g.as_moments())
    assert threshold(n, alpha, g) == tau_gauss(n, alpha, g)


def test_confidence_band():
    rows, tail = confidence_band(SignatureSequence((0.24, 0.05)), 0.1)
    np.testing.assert_allclose(rows, [[0.14, 0.34], [0.0, 0.15]])
    assert tail == (0.0, 0.1)
    rows, tail = confidence_band(SignatureSequence(), 0.3)
    assert rows.shape == (0, 2) and tail == (0.0, 0.3)
    with pytest.raises(ValueError):
        confidence_band(S3, 0.0)
    assert band_covers(confidence_band(S3, 0.1), SignatureSequence((0.45, 0.25, 0.01, 0.02 / 3)))
    assert not band_covers(confidence_band(S3, 0.1), SignatureSequence((0.45, 0.25, 0.2)))


@pytest.mark.parametrize("eps, k", [(0.1, 2), (0.6, 0), (0.01, 3), (0.5, 1), (0.2, 2)])
def test_mode_estimate(eps, k):
    assert mode_estimate(S3, eps) == k


def test_mode_estimate_rejects_nonpositive():
    with pytest.raises(ValueError):
        mode_estimate(S3, 0.0)


@given(small_ints, st.lists(st.floats(1e-6, 5.0), min_size=2, max_size=8))
def test_mode_estimate_monotone_and_exact_on_clean_input(v, eps):
    s = kolmogorov_signatures(v)
    eps = sorted(eps)
    ks = [mode_estimate(s, e) for e in eps]
    assert all(a >= b for a, b in zip(ks, ks[1:]))
    if len(s):
        assert mode_estimate(s, s.positives[-1]) == mode_count(v)


def test_mode_ci_cases():
    ci = mode_ci(S3, 0.05, 0.1, 100, UNIT, radius=0.04)
    assert (ci.lower, ci.upper) == (1, 2)
    ci = mode_ci(S3, 0.05, 0.03, 100, UNIT, radius=0.04)
    assert ci.upper == math.inf
    ci = mode_ci(S3, 0.05, 0.7, 100, UNIT, radius=0.04)
    assert ci.lower == 0
    # upper bound falls into the zero tail
    ci = mode_ci(S3, 0.05, 0.05, 100, UNIT, radius=0.01)
    assert (ci.lower, ci.upper) == (1, 3)
    assert 2 in ci


def test_mode_ci_default_radius():
    t = tau(100, 0.05, UNIT)
    assert mode_ci(S3, 0.05, 0.1, 100, UNIT) == mode_ci(S3, 0.05, 0.1, 100, UNIT, radius=t)


def test_detection_bound():
    assert detection_bound(1e6, 10, UNIT) == 1.0
    assert detection_bound(0.5, 10**9, UNIT) == 1.0
    assert detection_bound(0.5, 1000, UNIT) == pytest.approx(1 - 2 * math.exp(-25), rel=1e-15)
    assert detection_bound(1e-3, 10, UNIT) == 0.0
    with pytest.raises(ValueError):
        detection_bound(-1.0, 10, UNIT)


def test_holder_bound():
    assert holder_bound(1.0, 1.0, 10) == pytest.approx(0.05)
    assert holder_bound(1.0, 1.0, 20) == pytest.approx(holder_bound(1.0, 1.0, 10) / 2)
    assert holder_bound(2.0, 0.5, 10**12) < 1e-5
    with pytest.raises(ValueError):
        holder_bound(0.0, 1.0, 10)


def test_holder_bound_covers_quantisation_of_linear_signal():
    # f(t) = t is 1-Hölder with C = 1; sampling at i/n costs at most C/(2n)
    from modehunt.signal import kolmogorov_distance
    n = 50
    fine = np.arange(n * 200) / (n * 200) + 0.5 / (n * 200)
    coarse = np.repeat(np.arange(n) / n, 200)
    assert kolmogorov_distance(fine, coarse) <= holder_bound(1.0, 1.0, n) + 1e-12


def test_gevl_constants():
    a, b = gevl_constants(100)
    assert a == pytest.approx(2.366255, abs=1e-5)
    assert b == pytest.approx(0.329505, abs=1e-5)
    bs = [gevl_constants(n)[1] for n in (3, 10, 100, 10**4, 10**8)]
    assert all(x > y for x, y in zip(bs, bs[1:]))
    a, _ = gevl_constants(10**300)
    assert a / math.sqrt(2 * math.log(10**300)) == pytest.approx(1.0, abs=0.01)
    with pytest.raises(ValueError):
        gevl_constants(1)


@pytest.mark.parametrize("x, d", [([1, 0], 0.5), ([0, 1, 2], 0.0), ([0, 2, 1], 0.5), ([3], 0.0),
                                  ([5, 0, 5, 0], 2.5)])
def test_monotone_sup_fit(x, d):
    assert monotone_sup_fit(x) == d


def test_monotone_sup_fit_rejects_empty():
    with pytest.raises(ValueError):
        monotone_sup_fit([])


@given(st.lists(st.floats(-3, 3), min_size=1, max_size=5))
def test_monotone_sup_fit_matches_grid_search(x):
    pitch = 0.01
    grid = np.arange(-3.5, 3.5 + pitch, pitch)
    brute = brute_monotone_fit(np.asarray(x), grid)
    fit = monotone_sup_fit(x)
    assert fit <= brute + 1e-12
    assert brute <= fit + pitch


def test_plug_in_estimates():
    e = np.random.default_rng(0).normal(0, 2.0, 100000)
    m = sample_moments(e)
    assert m.kappa == pytest.approx(2.0, rel=0.02)
    y = np.repeat([0.0, 10.0], 50000) + e
    assert difference_sigma(y) == pytest.approx(2.0, rel=0.03)
    with pytest.raises(ValueError):
        sample_moments([1.0])
