import numpy as np
import pytest
from hypothesis import given, strategies as st

from modehunt.signal import antiderivative, kolmogorov_distance, mode_count
from modehunt.tautstring import (BOTTOM, TOP, Tube, chord_gap, min_modes_in_ball, signature_oracle,
                                 taut_derivative, taut_string)
from strategies import real_signals, small_ints

radii = st.floats(0.0, 3.0, allow_nan=False)


def test_tube_bounds():
    t = Tube(np.array([0.0, 1.0]), 0.5)
    np.testing.assert_array_equal(t.top, [0.5, 1.5])
    np.testing.assert_array_equal(t.bottom, [-0.5, 0.5])
    with pytest.raises(ValueError):
        Tube(np.zeros(2), -1.0)


def test_negative_radius_rejected():
    with pytest.raises(ValueError):
        taut_string([0, 1, 0], -0.1)


@pytest.mark.parametrize("alpha", [1 / 9, 0.2, 10.0])
def test_straight_line_once_tube_is_wide(alpha):
    ts = taut_string([0, 1, 0], alpha)
    np.testing.assert_allclose(ts.derivative().values, [1 / 3] * 3, atol=1e-15)
    assert ts.knots.tolist() == [0.0, 1.0]


def test_bent_string_at_small_radius():
    ts = taut_string([0, 1, 0], 1 / 18)
    np.testing.assert_allclose(ts.derivative().values, [1 / 6, 2 / 3, 1 / 6], atol=1e-15)
    assert ts.contacts.tolist() == [0, TOP, BOTTOM, 0]


def test_zero_radius_is_identity():
    f = [3.0, -1.0, 2.0, 2.0]
    assert taut_derivative(f, 0.0).values.tolist() == f
    ts = taut_string(f, 0.0)
    np.testing.assert_allclose(ts.values, antiderivative(f).F)


@pytest.mark.parametrize("alpha, modes", [(0.05, 1), (1 / 9, 0), (0.0, 1), (1.0, 0)])
def test_min_modes_examples(alpha, modes):
    assert min_modes_in_ball([0, 1, 0], alpha) == modes


def test_oracle_examples():
    assert signature_oracle([0, 1, 0], 0, 1e-10) == pytest.approx(1 / 9, abs=1e-10)
    assert signature_oracle([0, 2, 1, 3, 0], 1, 1e-10) == pytest.approx(0.05, abs=1e-10)
    assert signature_oracle([0, 2, 1, 3, 0], 0, 1e-10) == pytest.approx(0.24, abs=1e-10)
    assert signature_oracle([0, 1, 2], 0) == 0.0
    with pytest.raises(ValueError):
        signature_oracle([0, 1, 0], 0, tol=0.0)


def test_chord_gap():
    assert chord_gap([0, 1, 0]) == pytest.approx(1 / 9)
    assert chord_gap([2, 2]) == 0.0


@given(real_signals, radii)
def test_string_structure(v, alpha):
    ts = taut_string(v, alpha)
    F = antiderivative(v).F
    assert ts.values[0] == pytest.approx(F[0], abs=1e-12)
    assert ts.values[-1] == pytest.approx(F[-1], abs=1e-12)
    assert np.all(np.diff(ts.knot_index) > 0)
    # inside the tube at every breakpoint
    G = ts(np.arange(len(v) + 1) / len(v))
    scale = 1e-12 * max(1.0, np.abs(F).max())
    assert np.all(np.abs(G - F) <= alpha + scale)
    # inner knots touch the tube on the side the slope bends towards; a
    # radius below the resolution of F leaves the side undetermined
    if alpha > 1e-6:
        bend = np.diff(ts.slopes)
        inner = ts.contacts[1:-1]
        assert np.all(inner[bend > 1e-9] == TOP)
        assert np.all(inner[bend < -1e-9] == BOTTOM)


@given(real_signals, radii)
def test_derivative_stays_in_kolmogorov_ball(v, alpha):
    g = taut_derivative(v, alpha)
    assert kolmogorov_distance(v, g) <= alpha + 1e-12 * max(1.0, np.abs(v).max())


@given(small_ints)
def test_mode_count_nonincreasing_in_radius(v):
    prev = mode_count(v)
    for alpha in np.linspace(0.0, 1.5, 31):
        m = min_modes_in_ball(v, alpha)
        assert m <= prev
        prev = m


def _polyline_length(n, G):
    return float(np.sum(np.hypot(1.0 / n, np.diff(G))))


def test_string_is_shortest_among_random_competitors():
    rng = np.random.default_rng(11)
    for _ in range(20):
        n = int(rng.integers(2, 15))
        v = rng.integers(0, 6, n).astype(float)
        alpha = float(rng.uniform(0.01, 0.5))
        ts = taut_string(v, alpha)
        F = antiderivative(v).F
        best = ts.length()
        for _ in range(100):
            G = F + rng.uniform(-alpha, alpha, n + 1)
            G[0], G[-1] = F[0], F[-1]
            assert best <= _polyline_length(n, G) + 1e-12


def test_string_minimises_modes_over_sampled_ball():
    rng = np.random.default_rng(5)
    for _ in range(40):
        n = int(rng.integers(3, 14))
        v = rng.integers(0, 6, n).astype(float)
        alpha = float(rng.uniform(0.0, 0.4))
        F = antiderivative(v).F
        G0 = taut_string(v, alpha)(np.arange(n + 1) / n)
        best = mode_count(taut_derivative(v, alpha))
        for _ in range(100):
            G = G0 + rng.normal(0.0, alpha / 2 + 1e-3, n + 1)
            G = np.clip(G, F - alpha, F + alpha)
            G[0] = 0.0
            g = np.diff(G) * n
            assert best <= mode_count(g)
