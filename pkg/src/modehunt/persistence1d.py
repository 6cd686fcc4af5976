"""Sublevel-set persistence (degree 0) of step signals and sup-norm signatures."""

from __future__ import annotations

from dataclasses import dataclass

import numba
import numpy as np

from .signal import SignatureSequence, as_signal, runs


@dataclass(frozen=True, order=True)
class PersistencePair:
    """A finite bar: a component born at ``birth`` that dies at ``death``."""

    birth: float
    death: float

    def __post_init__(self):
        if not self.death > self.birth:
            raise ValueError("death must exceed birth")

    @property
    def persistence(self) -> float:
        return self.death - self.birth


@numba.njit(cache=True, nogil=True)
def _find(parent, i):
    while parent[i] != i:
        parent[i] = parent[parent[i]]
        i = parent[i]
    return i


@numba.njit(cache=True, nogil=True)
def _elder_pairs(vals):
    # vals: coalesced run values (no two neighbours equal)
    m = vals.shape[0]
    order = np.argsort(vals, kind="mergesort")  # stable: ties go leftmost first
    parent = np.full(m, -1, np.int64)
    # birth value and birth rank of each root; lower rank means older
    birth = np.empty(m)
    rank = np.empty(m, np.int64)
    births = np.empty(m)
    deaths = np.empty(m)
    k = 0
    for step in range(m):
        i = order[step]
        has_left = i > 0 and parent[i - 1] != -1
        has_right = i + 1 < m and parent[i + 1] != -1
        if has_left and has_right:
            # inner maximum: two components meet and the younger one dies
            a = _find(parent, i - 1)
            b = _find(parent, i + 1)
            if rank[a] < rank[b]:
                old, young = a, b
            else:
                old, young = b, a
            births[k] = birth[young]
            deaths[k] = vals[i]
            k += 1
            parent[young] = old
            parent[i] = old
        elif has_left:
            parent[i] = _find(parent, i - 1)
        elif has_right:
            parent[i] = _find(parent, i + 1)
        else:
            parent[i] = i
            birth[i] = vals[i]
            rank[i] = step
    return births[:k], deaths[:k]


def persistence_arrays(f) -> tuple[np.ndarray, np.ndarray]:
    """Births and deaths of all finite bars, in order of death."""
    _, r = runs(as_signal(f).values)
    return _elder_pairs(r)


def persistence_pairs(f) -> list[PersistencePair]:
    """Finite bars of the sublevel filtration, pairing by the elder rule.

    The component of the global minimum never dies and is left out.
    """
    b, d = persistence_arrays(f)
    return [PersistencePair(float(x), float(y)) for x, y in zip(b, d)]


def persistence_values(f) -> np.ndarray:
    """Finite persistences ``death - birth`` in descending order."""
    b, d = persistence_arrays(f)
    return np.sort(d - b)[::-1]


def persistence_signatures(f) -> SignatureSequence:
    """Sup-norm distances to the sets of signals with at most k modes (half the bars)."""
    return SignatureSequence(tuple(persistence_values(f) / 2.0))


def sup_mode_estimate(s: SignatureSequence, q: float) -> int:
    """Largest ``j`` with ``s[j-1] >= q``: the thresholded mode count for sup-norm signatures."""
    if not q > 0.0:
        raise ValueError(f"threshold must be positive, got {q}")
    return int(np.count_nonzero(np.asarray(s.positives) >= q))
