"""Taut strings through the alpha-tube around the antiderivative of a step signal.

The string is computed by a single left-to-right funnel walk over the grid
breakpoints. The walk keeps the greatest convex minorant of the upper tube
boundary and the least concave majorant of the lower boundary, both anchored
at the current apex; whenever a new boundary point cuts through the opposite
chain, the string is forced to bend at that chain's vertices, which are then
emitted as knots. Working in cell-index units with unnormalised prefix sums
keeps the abscissae integral, so slope comparisons are done by exact
cross-multiplication.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from .signal import StepSignal, as_signal, compensated_cumsum, mode_count

TOP = 1
BOTTOM = -1
PINNED = 0


@dataclass(frozen=True)
class Tube:
    """The set of functions within sup-distance ``radius`` of ``center``."""

    center: np.ndarray
    radius: float

    def __post_init__(self):
        if not self.radius >= 0.0:
            raise ValueError("tube radius must be non-negative")

    @property
    def top(self) -> np.ndarray:
        return self.center + self.radius

    @property
    def bottom(self) -> np.ndarray:
        return self.center - self.radius


@dataclass(frozen=True)
class TautString:
    """Piecewise linear string through ``(knots[i], values[i])``.

    ``contacts[i]`` is +1 where the knot lies on the top of the tube, -1 on
    the bottom and 0 at the pinned endpoints (or everywhere when alpha = 0).
    ``knot_index`` holds the same knots as grid indices.
    """

    knot_index: np.ndarray
    values: np.ndarray
    contacts: np.ndarray
    n: int
    slopes: np.ndarray

    @property
    def knots(self) -> np.ndarray:
        return self.knot_index / self.n

    def __call__(self, t):
        return np.interp(t, self.knots, self.values)

    def derivative(self) -> StepSignal:
        return StepSignal(np.repeat(self.slopes, np.diff(self.knot_index)))

    def length(self) -> float:
        """Euclidean length of the graph over [0, 1]."""
        return float(np.sum(np.hypot(np.diff(self.knots), np.diff(self.values))))


def _le(a, b, c) -> bool:
    # slope(a -> b) <= slope(a -> c), with b and c strictly right of a
    return (b[1] - a[1]) * (c[0] - a[0]) <= (c[1] - a[1]) * (b[0] - a[0])


def _ge(a, b, c) -> bool:
    return (b[1] - a[1]) * (c[0] - a[0]) >= (c[1] - a[1]) * (b[0] - a[0])


def _funnel(S: np.ndarray, r: float) -> list[tuple[int, float, int]]:
    """Knots ``(index, value, contact)`` of the taut string in index units."""
    n = S.shape[0] - 1
    start = (0, float(S[0]), PINNED)
    knots = [start]
    upper = deque([start])
    lower = deque([start])
    for j in range(1, n + 1):
        p = (j, float(S[j]) + r, TOP) if j < n else (n, float(S[n]), PINNED)
        while len(upper) >= 2 and _le(upper[-2], p, upper[-1]):
            upper.pop()
        if len(upper) == 1:
            # new top point cuts the lower chain: string wraps around it
            while len(lower) >= 2 and _le(lower[0], p, lower[1]):
                lower.popleft()
                knots.append(lower[0])
            upper = deque([lower[0], p])
        else:
            upper.append(p)
        if j == n:
            break
        q = (j, float(S[j]) - r, BOTTOM)
        while len(lower) >= 2 and _ge(lower[-2], q, lower[-1]):
            lower.pop()
        if len(lower) == 1:
            while len(upper) >= 2 and _ge(upper[0], q, upper[1]):
                upper.popleft()
                knots.append(upper[0])
            lower = deque([upper[0], q])
        else:
            lower.append(q)
    knots.extend(list(upper)[1:])
    return knots


def taut_string(f, alpha: float) -> TautString:
    """Shortest path through the alpha-tube around ``F`` with pinned endpoints.

    ``alpha = 0`` degenerates the tube to ``F`` itself, which is returned with
    every breakpoint as a knot.
    """
    if not alpha >= 0.0:
        raise ValueError(f"tube radius must be non-negative, got {alpha}")
    f = as_signal(f)
    n = f.n
    S = compensated_cumsum(f.values)
    if alpha == 0.0:
        idx = np.arange(n + 1)
        return TautString(idx, S / n, np.zeros(n + 1, dtype=np.int64), n, f.values.copy())
    r = alpha * n
    idx, contacts = _tidy(_funnel(S, r), S, r)
    vals = (S[idx] + contacts * r) / n
    slopes = (np.diff(S[idx]) + np.diff(contacts) * r) / np.diff(idx)
    return TautString(idx, vals, contacts, n, slopes)


def _tidy(knots, S, r) -> tuple[np.ndarray, np.ndarray]:
    """Drop repeated and collinear knots.

    Slopes are taken from prefix sums and contact types, so the radius cancels
    exactly between knots of equal contact. A radius below the resolution of
    ``S`` can still put a top and a bottom knot on the same index, and a
    string that grazes the tube on both sides yields slopes that agree only up
    to rounding; both cases are merged so that no spurious mode appears.
    """
    tol = 16.0 * np.finfo(float).eps * (float(np.max(np.abs(S))) + 2.0 * r)

    def slope(a, b):
        return (S[b[0]] - S[a[0]] + (b[1] - a[1]) * r) / (b[0] - a[0])

    out: list[tuple[int, int]] = []
    for j, _, c in knots:
        k = (j, c)
        if out and out[-1][0] == j:
            continue
        while len(out) >= 2 and abs(slope(out[-2], out[-1]) - slope(out[-1], k)) <= tol:
            out.pop()
        out.append(k)
    return (np.array([k[0] for k in out], dtype=np.int64),
            np.array([k[1] for k in out], dtype=np.int64))


def taut_derivative(f, alpha: float) -> StepSignal:
    """Derivative of the taut string as a step signal on the original grid."""
    f = as_signal(f)
    if alpha == 0.0:
        return f
    return taut_string(f, alpha).derivative()


def min_modes_in_ball(f, alpha: float) -> int:
    """Fewest modes of any signal within Kolmogorov distance ``alpha`` of ``f``."""
    return mode_count(taut_derivative(f, alpha))


def chord_gap(f) -> float:
    """Kolmogorov distance from ``f`` to the constant with the same mass."""
    f = as_signal(f)
    S = compensated_cumsum(f.values)
    t = np.arange(f.n + 1) / f.n
    return float(np.max(np.abs(S - S[-1] * t))) / f.n


def signature_oracle(f, k: int, tol: float = 1e-10) -> float:
    """Smallest tube radius whose taut-string derivative has at most ``k`` modes.

    Bisection on ``alpha`` between 0 and the distance to the mass-preserving
    constant; an independent check on the merge sweep in :mod:`kolmsig`.
    """
    if not tol > 0.0:
        raise ValueError("tolerance must be positive")
    if k < 0:
        raise ValueError("k must be non-negative")
    f = as_signal(f)
    if mode_count(f) <= k:
        return 0.0
    lo = 0.0
    hi = chord_gap(f) * (1.0 + 1e-12) + 1e-300
    while min_modes_in_ball(f, hi) > k:
        hi *= 2.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if min_modes_in_ball(f, mid) <= k:
            hi = mid
        else:
            lo = mid
    return hi
