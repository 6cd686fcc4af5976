"""Step signals on equipartitions of [0, 1], their antiderivatives, distances and modes."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numba
import numpy as np


@numba.njit(cache=True, nogil=True)
def _compensated_cumsum(x):
    # Neumaier summation; out[0] = 0, out[i] = x[0] + ... + x[i-1]
    out = np.empty(x.shape[0] + 1)
    out[0] = 0.0
    s = 0.0
    c = 0.0
    for i in range(x.shape[0]):
        v = x[i]
        t = s + v
        if abs(s) >= abs(v):
            c += (s - t) + v
        else:
            c += (v - t) + s
        s = t
        out[i + 1] = s + c
    return out


def compensated_cumsum(x: np.ndarray) -> np.ndarray:
    """Prefix sums ``[0, x0, x0+x1, ...]`` with Neumaier error compensation."""
    return _compensated_cumsum(np.ascontiguousarray(x, dtype=np.float64))


@dataclass(frozen=True)
class StepSignal:
    """Piecewise constant function taking ``values[i]`` on ``[i/n, (i+1)/n)``.

    The cell values fully determine the signal; values at jump points are
    never stored.
    """

    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=np.float64).ravel()
        if v.size == 0:
            raise ValueError("a step signal needs at least one cell")
        if not np.all(np.isfinite(v)):
            raise ValueError("step signal values must be finite")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def n(self) -> int:
        return int(self.values.shape[0])

    def __len__(self) -> int:
        return self.n

    def refine(self, factor: int) -> "StepSignal":
        """Split every cell into ``factor`` equal cells carrying the same value."""
        if factor < 1:
            raise ValueError("refinement factor must be >= 1")
        return StepSignal(np.repeat(self.values, factor))

    def __eq__(self, other):
        if not isinstance(other, StepSignal):
            return NotImplemented
        return np.array_equal(self.values, other.values)

    def __hash__(self):
        return hash(self.values.tobytes())


def as_signal(f) -> StepSignal:
    return f if isinstance(f, StepSignal) else StepSignal(f)


@dataclass(frozen=True)
class Antiderivative:
    """Values of ``F(t) = int_0^t f`` at the breakpoints ``t_i = i/n``."""

    F: np.ndarray
    n: int = field(init=False)

    def __post_init__(self):
        F = np.array(self.F, dtype=np.float64).ravel()
        if F.size < 2:
            raise ValueError("antiderivative needs at least two breakpoints")
        if F[0] != 0.0:
            raise ValueError("antiderivative must vanish at t = 0")
        F.setflags(write=False)
        object.__setattr__(self, "F", F)
        object.__setattr__(self, "n", F.size - 1)

    @property
    def breakpoints(self) -> np.ndarray:
        return np.arange(self.n + 1) / self.n

    def __call__(self, t):
        return np.interp(t, self.breakpoints, self.F)


def antiderivative(f) -> Antiderivative:
    f = as_signal(f)
    return Antiderivative(compensated_cumsum(f.values) / f.n)


def _union_breakpoints(n: int, m: int) -> np.ndarray:
    if n == m:
        return np.arange(n + 1) / n
    return np.union1d(np.arange(n + 1) / n, np.arange(m + 1) / m)


def kolmogorov_distance(f, g) -> float:
    """Sup-norm distance between the antiderivatives of two step signals.

    Both antiderivatives are piecewise linear, so the supremum is attained at a
    breakpoint of the union grid.
    """
    f, g = as_signal(f), as_signal(g)
    F, G = antiderivative(f), antiderivative(g)
    if f.n == g.n:
        return float(np.max(np.abs(F.F - G.F)))
    t = _union_breakpoints(f.n, g.n)
    return float(np.max(np.abs(F(t) - G(t))))


def _values_on_cells(f: StepSignal, mids: np.ndarray) -> np.ndarray:
    idx = np.minimum((mids * f.n).astype(np.int64), f.n - 1)
    return f.values[idx]


def sup_distance(f, g) -> float:
    """Largest absolute difference of cell values over the union grid."""
    f, g = as_signal(f), as_signal(g)
    if f.n == g.n:
        return float(np.max(np.abs(f.values - g.values)))
    t = _union_breakpoints(f.n, g.n)
    mids = 0.5 * (t[:-1] + t[1:])
    return float(np.max(np.abs(_values_on_cells(f, mids) - _values_on_cells(g, mids))))


def runs(values: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Coalesce equal adjacent values.

    Returns ``(starts, run_values)`` where ``starts`` holds the first cell index
    of every maximal constant run.
    """
    v = np.asarray(values, dtype=np.float64)
    keep = np.empty(v.shape[0], dtype=bool)
    keep[0] = True
    np.not_equal(v[1:], v[:-1], out=keep[1:])
    starts = np.flatnonzero(keep)
    return starts, v[starts]


def mode_count(f) -> int:
    """Number of inner strict local maxima, plateaus counted once.

    The first and last constant runs are never counted.
    """
    _, r = runs(as_signal(f).values)
    if r.size < 3:
        return 0
    mid = r[1:-1]
    return int(np.count_nonzero((mid > r[:-2]) & (mid > r[2:])))


@dataclass(frozen=True)
class SignatureSequence:
    """Descending signatures ``s_0 >= s_1 >= ...``.

    Only the strictly positive entries are stored. Indexing past the end
    yields 0 and ``s[-1]`` is ``+inf`` by convention (it is *not* the last
    element).
    """

    positives: tuple[float, ...] = ()

    def __post_init__(self):
        p = tuple(float(x) for x in self.positives)
        if any(not (x > 0.0) or not np.isfinite(x) for x in p):
            raise ValueError("signatures must be finite and strictly positive")
        if any(a < b for a, b in zip(p, p[1:])):
            raise ValueError("signatures must be non-increasing")
        object.__setattr__(self, "positives", p)

    @classmethod
    def from_values(cls, values: Iterable[float]) -> "SignatureSequence":
        """Sort descending and drop non-positive entries."""
        return cls(tuple(sorted((float(v) for v in values if v > 0.0), reverse=True)))

    def __len__(self) -> int:
        return len(self.positives)

    def __getitem__(self, k: int) -> float:
        return signature_at(self, k)

    def as_array(self) -> np.ndarray:
        return np.array(self.positives, dtype=np.float64)

    def padded(self, length: int) -> np.ndarray:
        out = np.zeros(length)
        m = min(length, len(self.positives))
        out[:m] = self.positives[:m]
        return out


def signature_at(s: SignatureSequence | Sequence[float], k: int) -> float:
    if k < -1:
        raise ValueError("signature index must be >= -1")
    if k == -1:
        return float("inf")
    p = s.positives if isinstance(s, SignatureSequence) else s
    return float(p[k]) if k < len(p) else 0.0
