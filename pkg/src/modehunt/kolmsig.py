"""Kolmogorov signatures by sweeping merge events of the taut-string derivative.

Starting at alpha = 0 the constant intervals of ``f_alpha`` are the plateaus of
``f``. As alpha grows, maximal intervals sink, minimal ones rise, boundary
intervals move towards their neighbour and regular ones stay put, each with a
closed-form value. Two adjacent intervals coalesce at a *merge value*; the
sweep pops merge values from a priority queue in increasing order and records
alpha whenever a maximum disappears (a maximum meeting a minimum or a boundary
interval). Reading the recorded values backwards gives ``s_0 >= s_1 >= ...``.

Jump directions never change between merges, so an interval's class is a
function of the directions of the jumps at its two ends. Candidates carry the
versions of both nodes and are discarded lazily once either node changes.

Two implementations share these rules: :func:`merge_sweep` is a readable
reference over :class:`IntervalNode` objects that can record every event, and
:func:`kolmogorov_signatures` runs the same sweep in a compiled kernel.
"""

from __future__ import annotations

import enum
import heapq
import math
from dataclasses import dataclass, field
from typing import Optional

import numba
import numpy as np

from .signal import SignatureSequence, as_signal, runs

INF = math.inf


class Classification(enum.Enum):
    REGULAR = "regular"
    MAXIMAL = "maximal"
    MINIMAL = "minimal"
    BOUNDARY_LEFT = "boundary_left"
    BOUNDARY_RIGHT = "boundary_right"
    GLOBAL = "global"

    @property
    def is_critical(self) -> bool:
        return self in (Classification.MAXIMAL, Classification.MINIMAL)

    @property
    def is_boundary(self) -> bool:
        return self in (Classification.BOUNDARY_LEFT, Classification.BOUNDARY_RIGHT)


def _sign(x: float) -> int:
    return int(x > 0) - int(x < 0)


def classify_jumps(left_jump: int, right_jump: int) -> Classification:
    """Class of an interval from the jump directions at its ends.

    A jump is +1 if ``f_alpha`` increases across it, -1 if it decreases and 0
    at an end of [0, 1].
    """
    if left_jump == 0 and right_jump == 0:
        return Classification.GLOBAL
    if left_jump == 0:
        return Classification.BOUNDARY_LEFT
    if right_jump == 0:
        return Classification.BOUNDARY_RIGHT
    if left_jump > 0 and right_jump < 0:
        return Classification.MAXIMAL
    if left_jump < 0 and right_jump > 0:
        return Classification.MINIMAL
    return Classification.REGULAR


def classify(value: float, left_value: Optional[float] = None,
             right_value: Optional[float] = None) -> Classification:
    """Classify a constant interval against its neighbours' values.

    ``None`` marks a missing neighbour, i.e. the interval touches 0 or 1.
    Neighbour values must differ from ``value``.
    """
    lj = 0 if left_value is None else _sign(value - left_value)
    rj = 0 if right_value is None else _sign(right_value - value)
    if (left_value is not None and lj == 0) or (right_value is not None and rj == 0):
        raise ValueError("adjacent constant intervals must have different values")
    return classify_jumps(lj, rj)


@dataclass(eq=False)
class IntervalNode:
    """Constant interval ``[a/n, b/n)`` of the taut-string derivative.

    ``mass`` is the integral of the *original* signal over the interval.
    """

    a: int
    b: int
    n: int
    mass: float
    left_jump: int = 0
    right_jump: int = 0
    left: Optional["IntervalNode"] = field(default=None, repr=False)
    right: Optional["IntervalNode"] = field(default=None, repr=False)
    version: int = 0
    alive: bool = True

    @property
    def length(self) -> float:
        return (self.b - self.a) / self.n

    @property
    def classification(self) -> Classification:
        return classify_jumps(self.left_jump, self.right_jump)

    @property
    def drift(self) -> int:
        """Coefficient of alpha in ``length * value``: -2 max, +2 min, +-1 boundary."""
        return self.right_jump - self.left_jump

    def value(self, alpha: float) -> float:
        return (self.mass + self.drift * alpha) / self.length


@dataclass(frozen=True, order=True)
class MergeCandidate:
    """Queue entry: the pair (node, node.right) may coalesce at ``value``."""

    value: float
    position: int
    left_version: int = field(compare=False)
    right_version: int = field(compare=False)
    node: IntervalNode = field(compare=False, repr=False)

    def is_stale(self) -> bool:
        right = self.node.right
        return (not self.node.alive or right is None or not right.alive
                or self.node.version != self.left_version
                or right.version != self.right_version)


def _merge_formula(li: float, fi: float, ci: Classification,
                   lj: float, fj: float, cj: Classification) -> float:
    """Merge radius of adjacent intervals I (left) and J (right).

    Lengths ``li, lj`` and masses ``fi, fj`` may be in any consistent units;
    the result is homogeneous of degree one in the masses and zero in the
    lengths.
    """
    if ci is Classification.GLOBAL or cj is Classification.GLOBAL:
        return INF
    if ci.is_critical and cj.is_critical:
        return abs(li * fj - lj * fi) / (2.0 * (li + lj))
    if ci.is_critical or cj.is_critical:
        if ci.is_critical:
            lc, fc, lo, fo, co = li, fi, lj, fj, cj
        else:
            lc, fc, lo, fo, co = lj, fj, li, fi, ci
        if co.is_boundary:
            return abs(lc * fo - lo * fc) / (lc + 2.0 * lo)
        return 0.5 * abs(fc - (lc / lo) * fo)
    if ci.is_boundary and cj.is_boundary:
        return abs(li * fj - lj * fi) / (li + lj)
    if ci.is_boundary or cj.is_boundary:
        if ci.is_boundary:
            return abs(fi - (li / lj) * fj)
        return abs(fj - (lj / li) * fi)
    return INF


def merge_value(I: IntervalNode, J: IntervalNode) -> float:
    """Smallest radius at which the adjacent intervals I and J coalesce.

    Regular-regular pairs never merge and yield ``inf``.
    """
    if I.right is not J or J.left is not I:
        raise RuntimeError("merge value requested for non-adjacent intervals")
    return _merge_formula(I.length, I.mass, I.classification,
                          J.length, J.mass, J.classification)


def removes_mode(ci: Classification, cj: Classification) -> bool:
    """True when merging intervals of these classes eliminates a maximum."""
    if ci is Classification.MAXIMAL:
        return cj is Classification.MINIMAL or cj.is_boundary
    if cj is Classification.MAXIMAL:
        return ci is Classification.MINIMAL or ci.is_boundary
    return False


@dataclass(frozen=True)
class MergeEvent:
    alpha: float
    position: int
    left: Classification
    right: Classification
    emitted: bool
    maxima_after: int


def build_nodes(f) -> list[IntervalNode]:
    """Linked list of the plateaus of ``f`` with their masses and jumps."""
    f = as_signal(f)
    n = f.n
    starts, vals = runs(f.values)
    ends = np.append(starts[1:], n)
    nodes = [IntervalNode(int(a), int(b), n, float(v) * (b - a) / n)
             for a, b, v in zip(starts, ends, vals)]
    for k in range(1, len(nodes)):
        jump = _sign(vals[k] - vals[k - 1])
        nodes[k - 1].right_jump = jump
        nodes[k].left_jump = jump
        nodes[k - 1].right = nodes[k]
        nodes[k].left = nodes[k - 1]
    return nodes


def merge_sweep(f, record: bool = False):
    """Reference sweep. Returns ``(signatures, events)``.

    ``events`` is empty unless ``record`` is set.
    """
    nodes = build_nodes(f)
    events: list[MergeEvent] = []
    if len(nodes) == 1:
        return SignatureSequence(), events
    maxima = sum(nd.classification is Classification.MAXIMAL for nd in nodes)
    heap: list[MergeCandidate] = []

    def push(node: Optional[IntervalNode]):
        if node is None or node.right is None:
            return
        v = merge_value(node, node.right)
        if v < INF:
            heapq.heappush(heap, MergeCandidate(v, node.a, node.version, node.right.version, node))

    for nd in nodes:
        push(nd)

    emitted: list[float] = []
    while heap:
        cand = heapq.heappop(heap)
        if cand.is_stale():
            continue
        I, J = cand.node, cand.node.right
        ci, cj = I.classification, J.classification
        hit = removes_mode(ci, cj)
        if hit:
            emitted.append(cand.value)
        # splice J into I; the merged node keeps I's identity
        I.b = J.b
        I.mass += J.mass
        I.right_jump = J.right_jump
        I.right = J.right
        if J.right is not None:
            J.right.left = I
        J.alive = False
        I.version += 1
        if record:
            maxima += ((I.classification is Classification.MAXIMAL)
                       - (ci is Classification.MAXIMAL) - (cj is Classification.MAXIMAL))
            events.append(MergeEvent(cand.value, cand.position, ci, cj, hit, maxima))
        if I.left is None and I.right is None:
            break
        push(I.left)
        push(I)
    # a merge can only land at zero through rounding
    return SignatureSequence.from_values(emitted), events


# ---------------------------------------------------------------------------
# compiled sweep

_REG, _MAX, _MIN, _BND, _GLOBAL = 0, 1, 2, 3, 4


@numba.njit(cache=True, nogil=True, inline="always")
def _cls(lj, rj):
    if lj == 0 and rj == 0:
        return _GLOBAL
    if lj == 0 or rj == 0:
        return _BND
    if lj > 0 and rj < 0:
        return _MAX
    if lj < 0 and rj > 0:
        return _MIN
    return _REG


@numba.njit(cache=True, nogil=True)
def _mv(li, fi, ci, lj, fj, cj):
    crit_i = ci == _MAX or ci == _MIN
    crit_j = cj == _MAX or cj == _MIN
    if ci == _GLOBAL or cj == _GLOBAL:
        return np.inf
    if crit_i and crit_j:
        return abs(li * fj - lj * fi) / (2.0 * (li + lj))
    if crit_i or crit_j:
        if crit_i:
            lc, fc, lo, fo, co = li, fi, lj, fj, cj
        else:
            lc, fc, lo, fo, co = lj, fj, li, fi, ci
        if co == _BND:
            return abs(lc * fo - lo * fc) / (lc + 2.0 * lo)
        return 0.5 * abs(fc - (lc / lo) * fo)
    if ci == _BND and cj == _BND:
        return abs(li * fj - lj * fi) / (li + lj)
    if ci == _BND:
        return abs(fi - (li / lj) * fj)
    if cj == _BND:
        return abs(fj - (lj / li) * fi)
    return np.inf


@numba.njit(cache=True, nogil=True, inline="always")
def _before(hv, hp, x, px, k):
    return x < hv[k] or (x == hv[k] and px < hp[k])


@numba.njit(cache=True, nogil=True)
def _sift_down(hv, hp, k, size):
    x = hv[k]
    px = hp[k]
    while True:
        c = 2 * k + 1
        if c >= size:
            break
        if c + 1 < size and (hv[c + 1] < hv[c] or (hv[c + 1] == hv[c] and hp[c + 1] < hp[c])):
            c += 1
        if _before(hv, hp, x, px, c):
            break
        hv[k] = hv[c]
        hp[k] = hp[c]
        k = c
    hv[k] = x
    hp[k] = px


@numba.njit(cache=True, nogil=True)
def _push(hv, hp, size, x, px):
    k = size
    while k > 0:
        parent = (k - 1) >> 1
        if _before(hv, hp, x, px, parent):
            hv[k] = hv[parent]
            hp[k] = hp[parent]
            k = parent
        else:
            break
    hv[k] = x
    hp[k] = px
    return size + 1


@numba.njit(cache=True, nogil=True)
def _pair_value(hi, lo, end, lj, rj, a, b):
    return _mv(end[a] - a, hi[a] + lo[a], _cls(lj[a], rj[a]),
               end[b] - b, hi[b] + lo[b], _cls(lj[b], rj[b]))


@numba.njit(cache=True, nogil=True)
def _sweep_kernel(values):
    """Emitted merge radii in index units (multiply by 1/n), in pop order.

    Heap entries are ``(value, left node)`` kept inline for locality. Each node
    registers the value of its current candidate with its right neighbour in
    ``cand``; an entry is stale unless it still matches that registration.
    Node masses are carried as unevaluated sums ``hi + lo`` so that small runs
    keep their mass next to large prefix sums.
    """
    n = values.shape[0]
    out = np.empty(0)
    if n < 2:
        return out
    # nodes are identified by their first cell
    right = np.full(n, -1, np.int32)
    left = np.full(n, -1, np.int32)
    end = np.zeros(n, np.int32)
    lj = np.zeros(n, np.int8)
    rj = np.zeros(n, np.int8)
    alive = np.zeros(n, np.bool_)
    cand = np.full(n, np.nan)
    prev = 0
    alive[0] = True
    nodes = 1
    for i in range(1, n):
        if values[i] != values[i - 1]:
            jump = 1 if values[i] > values[i - 1] else -1
            end[prev] = i
            right[prev] = i
            left[i] = prev
            rj[prev] = jump
            lj[i] = jump
            alive[i] = True
            prev = i
            nodes += 1
    end[prev] = n
    if nodes == 1:
        return out
    hi = np.zeros(n)
    lo = np.zeros(n)
    i = 0
    while i != -1:
        hi[i] = values[i] * (end[i] - i)
        i = right[i]
    cap = 3 * nodes + 8
    hv = np.empty(cap)
    hp = np.empty(cap, np.int32)
    size = 0
    i = 0
    while right[i] != -1:
        j = right[i]
        v = _pair_value(hi, lo, end, lj, rj, i, j)
        if v < np.inf:
            cand[i] = v
            hv[size] = v
            hp[size] = i
            size += 1
        i = j
    for k in range(size // 2 - 1, -1, -1):
        _sift_down(hv, hp, k, size)
    emitted = np.empty(nodes)
    m = 0
    while size > 0:
        v = hv[0]
        a = hp[0]
        size -= 1
        if size > 0:
            hv[0] = hv[size]
            hp[0] = hp[size]
            _sift_down(hv, hp, 0, size)
        if not alive[a] or cand[a] != v:
            continue
        b = right[a]
        ca = _cls(lj[a], rj[a])
        cb = _cls(lj[b], rj[b])
        if (ca == _MAX and (cb == _MIN or cb == _BND)) or (cb == _MAX and (ca == _MIN or ca == _BND)):
            emitted[m] = v
            m += 1
        # splice b into a
        x = hi[a] + hi[b]
        z = x - hi[a]
        lo[a] += lo[b] + ((hi[a] - (x - z)) + (hi[b] - z))
        hi[a] = x
        end[a] = end[b]
        rj[a] = rj[b]
        c = right[b]
        right[a] = c
        if c != -1:
            left[c] = a
        alive[b] = False
        cand[a] = np.nan
        p = left[a]
        if p == -1 and c == -1:
            break
        if p != -1:
            w = _pair_value(hi, lo, end, lj, rj, p, a)
            cand[p] = w
            if w < np.inf:
                size = _push(hv, hp, size, w, p)
        if c != -1:
            w = _pair_value(hi, lo, end, lj, rj, a, c)
            cand[a] = w
            if w < np.inf:
                size = _push(hv, hp, size, w, a)
    return emitted[:m]


def signature_array(values) -> np.ndarray:
    """Positive Kolmogorov signatures of a raw value array, descending."""
    v = np.ascontiguousarray(values, dtype=np.float64)
    if v.shape[0] >= 2**31 - 1:
        raise ValueError("signals longer than 2**31 - 2 cells are not supported")
    raw = _sweep_kernel(v)
    out = np.sort(raw)[::-1] / v.shape[0]
    return out[out > 0.0]


def kolmogorov_signatures(f) -> SignatureSequence:
    """Full Kolmogorov signature sequence of a step signal in O(n log n)."""
    f = as_signal(f)
    return SignatureSequence(tuple(signature_array(f.values).tolist()))
