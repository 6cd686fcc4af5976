"""Closed-form quantities for inference on the number of modes.

Noise is described either by Bernstein-type moment parameters ``(kappa, v)``
with ``E|e|^m <= v m! kappa^(m-2) / 2`` or, for Gaussian noise, by its
standard deviation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .signal import SignatureSequence


def _check_level(alpha: float) -> None:
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"level must lie in (0, 1), got {alpha}")


def _check_n(n: int) -> None:
    if int(n) != n or n < 1:
        raise ValueError(f"sample size must be a positive integer, got {n}")


@dataclass(frozen=True)
class MomentModel:
    """Moment parameters of centred noise; both must be positive."""

    kappa: float
    v: float

    def __post_init__(self):
        if not (self.kappa > 0.0 and self.v > 0.0):
            raise ValueError("kappa and v must be positive")
        if not (math.isfinite(self.kappa) and math.isfinite(self.v)):
            raise ValueError("kappa and v must be finite")

    def moment_bound(self, m: int) -> float:
        """Allowed ceiling on ``E|e|^m``."""
        return self.v * math.factorial(m) * self.kappa ** (m - 2) / 2.0


@dataclass(frozen=True)
class GaussianModel:
    sigma: float

    def __post_init__(self):
        if not (self.sigma > 0.0 and math.isfinite(self.sigma)):
            raise ValueError("sigma must be positive and finite")

    def as_moments(self) -> MomentModel:
        """Moment parameters valid for N(0, sigma^2): v = sigma^2, kappa = sigma."""
        return MomentModel(kappa=self.sigma, v=self.sigma**2)


@dataclass(frozen=True)
class ModeCI:
    """Interval ``[lower, upper]`` for a mode count; ``upper`` may be ``inf``."""

    lower: int
    upper: float

    def __post_init__(self):
        if self.lower < 0 or not self.lower <= self.upper:
            raise ValueError("need 0 <= lower <= upper")

    def __contains__(self, k) -> bool:
        return self.lower <= k <= self.upper


def deviation_bound(delta: float, n: int, m: MomentModel) -> float:
    """Tail bound on the Kolmogorov norm of averaged noise exceeding ``delta``."""
    if not delta > 0.0:
        raise ValueError(f"delta must be positive, got {delta}")
    _check_n(n)
    return min(1.0, 2.0 * math.exp(-(delta**2) * n / (2.0 * m.v + 2.0 * m.kappa * delta)))


def tau(n: int, alpha: float, m: MomentModel) -> float:
    """Threshold at which :func:`deviation_bound` equals ``alpha``."""
    _check_level(alpha)
    _check_n(n)
    L = math.log(alpha / 2.0)
    k = m.kappa
    return (math.sqrt(L * (L * k * k - 2.0 * n * m.v)) - k * L) / n


def tau_gauss(n: int, alpha: float, g: GaussianModel) -> float:
    """Sharper threshold for Gaussian noise."""
    _check_level(alpha)
    _check_n(n)
    return math.sqrt(-2.0 * g.sigma**2 / n * math.log(alpha / 2.0))


def threshold(n: int, alpha: float, model: MomentModel | GaussianModel) -> float:
    """Gaussian threshold for a :class:`GaussianModel`, the moment threshold otherwise."""
    if isinstance(model, GaussianModel):
        return tau_gauss(n, alpha, model)
    return tau(n, alpha, model)


def confidence_band(s: SignatureSequence, radius: float) -> tuple[np.ndarray, tuple[float, float]]:
    """Simultaneous intervals ``[(s_j - radius)_+, s_j + radius]``.

    Returns an array of shape ``(len(s), 2)`` for the stored signatures and
    the interval ``(0, radius)`` shared by every later (zero) signature.
    """
    if not radius > 0.0:
        raise ValueError(f"band radius must be positive, got {radius}")
    p = s.as_array()
    band = np.column_stack([np.maximum(p - radius, 0.0), p + radius]) if p.size else np.empty((0, 2))
    return band, (0.0, float(radius))


def band_covers(band: tuple[np.ndarray, tuple[float, float]], truth: SignatureSequence) -> bool:
    """Whether every signature of ``truth`` lies in its interval of ``band``."""
    rows, tail = band
    m = max(rows.shape[0], len(truth))
    for j in range(m):
        lo, hi = rows[j] if j < rows.shape[0] else tail
        if not lo <= truth[j] <= hi:
            return False
    return True


def mode_estimate(s: SignatureSequence, epsilon: float) -> int:
    """Number of signatures at or above ``epsilon``."""
    if not epsilon > 0.0:
        raise ValueError(f"threshold must be positive, got {epsilon}")
    return int(np.count_nonzero(s.as_array() >= epsilon))


def mode_ci(s: SignatureSequence, alpha: float, epsilon: float, n: int,
            model: MomentModel | GaussianModel, radius: float | None = None) -> ModeCI:
    """Confidence interval for the number of true modes whose signature is at least ``epsilon``.

    ``radius`` overrides the threshold derived from ``(n, alpha, model)``.
    """
    _check_level(alpha)
    if not epsilon > 0.0:
        raise ValueError(f"threshold must be positive, got {epsilon}")
    t = threshold(n, alpha, model) if radius is None else float(radius)
    p = s.as_array()
    lower = 0
    if epsilon < s[0] - t:
        lower = int(np.flatnonzero(p > epsilon + t).max())
    upper: float = math.inf
    if epsilon > t:
        # entries past the stored ones are zero, which is below epsilon - t
        below = np.flatnonzero(p < epsilon - t)
        upper = int(below[0]) if below.size else len(p)
    return ModeCI(lower, upper)


def detection_bound(epsilon: float, n: int, m: MomentModel) -> float:
    """Lower bound on the probability that thresholding at ``epsilon/2`` finds all modes.

    Valid when the smallest positive true signature is at least ``epsilon``.
    """
    if not epsilon > 0.0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    _check_n(n)
    raw = 1.0 - 2.0 * math.exp(-(epsilon**2) * n / (8.0 * m.v + 4.0 * m.kappa * epsilon))
    return min(1.0, max(0.0, raw))


def holder_bound(C: float, gamma: float, n: int) -> float:
    """Kolmogorov quantisation error of a gamma-Hölder signal with constant ``C`` on n cells."""
    if not (C > 0.0 and gamma > 0.0):
        raise ValueError("C and gamma must be positive")
    _check_n(n)
    return C / (gamma + 1.0) * n ** (-gamma)


def gevl_constants(n: int) -> tuple[float, float]:
    """Centring and scaling ``(a_n, b_n)`` of the Gumbel limit for Gaussian maxima."""
    if n < 2:
        raise ValueError("need n >= 2")
    r = math.sqrt(2.0 * math.log(n))
    a = r - (0.5 * math.log(math.log(n)) + math.log(2.0 * math.sqrt(math.pi))) / r
    return a, 1.0 / r


def monotone_sup_fit(x: Sequence[float]) -> float:
    """Sup-norm distance from ``x`` to the nearest nondecreasing vector.

    Equals half the largest drop ``x_i - x_j`` with ``i <= j``.
    """
    a = np.asarray(x, dtype=np.float64).ravel()
    if a.size == 0:
        raise ValueError("need a nonempty vector")
    drop = np.maximum.accumulate(a) - a
    return 0.5 * float(drop.max())


def sample_moments(noise: np.ndarray) -> MomentModel:
    """Rough ``(kappa, v)`` from residuals, taking kappa = standard deviation.

    A plug-in convenience with no coverage guarantee.
    """
    e = np.asarray(noise, dtype=np.float64)
    if e.size < 2:
        raise ValueError("need at least two residuals")
    sd = float(np.std(e, ddof=1))
    if not sd > 0.0:
        raise ValueError("residuals are constant")
    return MomentModel(kappa=sd, v=sd * sd)


def difference_sigma(y: np.ndarray) -> float:
    """Noise standard deviation from first differences (median absolute deviation)."""
    d = np.diff(np.asarray(y, dtype=np.float64))
    if d.size == 0:
        raise ValueError("need at least two observations")
    return float(np.median(np.abs(d - np.median(d))) * 1.4826 / math.sqrt(2.0))
