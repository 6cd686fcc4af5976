import numpy as np
from hypothesis import strategies as st

small_ints = st.lists(st.integers(0, 5), min_size=1, max_size=12)
floats = st.floats(-10, 10, allow_nan=False, allow_infinity=False, width=64)
real_signals = st.lists(floats, min_size=1, max_size=30)


@st.composite
def signal_pairs(draw, max_n=20):
    """Two signals on possibly different grids."""
    a = draw(st.lists(floats, min_size=1, max_size=max_n))
    b = draw(st.lists(floats, min_size=1, max_size=max_n))
    return np.array(a), np.array(b)


@st.composite
def same_grid_pairs(draw, max_n=25):
    n = draw(st.integers(1, max_n))
    a = draw(st.lists(floats, min_size=n, max_size=n))
    b = draw(st.lists(floats, min_size=n, max_size=n))
    return np.array(a), np.array(b)
