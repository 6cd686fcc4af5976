"""Test signals, noise models and Monte Carlo experiments.

Every replication draws from its own generator seeded by ``(seed, rep)``, so a
report depends only on its configuration and never on scheduling. Worker
threads are capped by the ``MODEHUNT_THREADS`` environment variable.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.stats import spearmanr

from .kolmsig import kolmogorov_signatures, signature_array
from .persistence1d import persistence_values
from .signal import SignatureSequence, StepSignal, as_signal, mode_count
from .stats import (GaussianModel, MomentModel, band_covers, confidence_band, detection_bound,
                    mode_estimate, tau_gauss)

# ---------------------------------------------------------------- signals

_DJ_POSITIONS = np.array([0.10, 0.13, 0.15, 0.23, 0.25, 0.40, 0.44, 0.65, 0.76, 0.78, 0.81])
_BLOCK_HEIGHTS = np.array([4.0, -5.0, 3.0, -4.0, 5.0, -4.2, 2.1, 4.3, -3.1, 2.1, -4.2])
_BUMP_HEIGHTS = np.array([4.0, 5.0, 3.0, 4.0, 5.0, 4.2, 2.1, 4.3, 3.1, 5.1, 4.2])
_BUMP_WIDTHS = np.array([0.005, 0.005, 0.006, 0.01, 0.01, 0.03, 0.01, 0.01, 0.005, 0.008, 0.005])


def _grid(n: int) -> np.ndarray:
    if int(n) != n or n < 1:
        raise ValueError(f"n must be a positive integer, got {n}")
    return np.arange(n) / n


@dataclass(frozen=True)
class Blocks:
    """Piecewise constant Donoho-Johnstone benchmark with five inner maxima."""

    amplitude: float = 1.0
    true_modes = 5

    def sample(self, n: int) -> np.ndarray:
        t = _grid(n)
        steps = (1.0 + np.sign(t[:, None] - _DJ_POSITIONS)) / 2.0
        return self.amplitude * (steps @ _BLOCK_HEIGHTS)


@dataclass(frozen=True)
class Bumps:
    """Sum of eleven sharp peaks (Donoho-Johnstone)."""

    amplitude: float = 1.0
    true_modes = 11

    def sample(self, n: int) -> np.ndarray:
        t = _grid(n)
        kern = (1.0 + np.abs((t[:, None] - _DJ_POSITIONS) / _BUMP_WIDTHS)) ** -4
        return self.amplitude * (kern @ _BUMP_HEIGHTS)


@dataclass(frozen=True)
class Spike:
    """A single cell of height ``(1 + spike_excess) * sqrt(2 log n)``, zero elsewhere.

    ``position`` is a fraction of the unit interval; the spike sits in the
    cell containing it.
    """

    spike_excess: float = 0.5
    position: float = 0.5
    true_modes = 1

    def __post_init__(self):
        if not self.spike_excess > -1.0:
            raise ValueError("spike_excess must exceed -1")
        if not 0.0 < self.position < 1.0:
            raise ValueError("position must lie strictly inside (0, 1)")

    def height(self, n: int) -> float:
        return (1.0 + self.spike_excess) * math.sqrt(2.0 * math.log(n))

    def sample(self, n: int) -> np.ndarray:
        if n < 3:
            raise ValueError("a spike needs n >= 3 to be an inner maximum")
        out = np.zeros(n)
        j = min(max(int(self.position * n), 1), n - 2)
        out[j] = self.height(n)
        return out


@dataclass(frozen=True)
class Plateau:
    """Height ``delta`` on [1/3, 2/3), zero elsewhere."""

    delta: float
    true_modes = 1

    def __post_init__(self):
        if not self.delta > 0.0:
            raise ValueError("plateau height must be positive")

    def sample(self, n: int) -> np.ndarray:
        if n < 3:
            raise ValueError("a plateau needs n >= 3")
        # integer test avoids rounding at 1/3 and 2/3
        i = np.arange(n)
        inside = (3 * i >= n) & (3 * i < 2 * n)
        return np.where(inside, self.delta, 0.0)


@dataclass(frozen=True)
class Custom:
    """Fixed cell values; only sampled at their own length."""

    values: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(float(x) for x in self.values))
        if not self.values:
            raise ValueError("custom signal needs values")

    @property
    def true_modes(self) -> int:
        return mode_count(self.values)

    def sample(self, n: int) -> np.ndarray:
        if n != len(self.values):
            raise ValueError(f"custom signal has {len(self.values)} cells, asked for {n}")
        return np.array(self.values)


TestSignal = Blocks | Bumps | Spike | Plateau | Custom


def generate_signal(kind: TestSignal, n: int) -> StepSignal:
    """Sample ``kind`` at ``t_i = i / n``."""
    return StepSignal(kind.sample(n))


# ---------------------------------------------------------------- noise


@dataclass(frozen=True)
class Gaussian:
    sigma: float = 1.0

    def __post_init__(self):
        if not self.sigma >= 0.0:
            raise ValueError("sigma must be non-negative")

    def moments(self) -> MomentModel:
        return MomentModel(kappa=self.sigma, v=self.sigma**2)

    def draw(self, rng: np.random.Generator, n: int) -> np.ndarray:
        return self.sigma * rng.standard_normal(n)


@dataclass(frozen=True)
class Laplace:
    scale: float = 1.0

    def __post_init__(self):
        if not self.scale >= 0.0:
            raise ValueError("scale must be non-negative")

    def moments(self) -> MomentModel:
        # E|e|^m = m! b^m, attained with equality
        return MomentModel(kappa=self.scale, v=2.0 * self.scale**2)

    def draw(self, rng, n):
        return rng.laplace(0.0, self.scale, n) if self.scale > 0 else np.zeros(n)


@dataclass(frozen=True)
class Uniform:
    """Uniform on ``[-bound, bound]``."""

    bound: float = 1.0

    def __post_init__(self):
        if not self.bound >= 0.0:
            raise ValueError("bound must be non-negative")

    def moments(self) -> MomentModel:
        return MomentModel(kappa=self.bound / 3.0, v=self.bound**2 / 3.0)

    def draw(self, rng, n):
        return rng.uniform(-self.bound, self.bound, n)


@dataclass(frozen=True)
class CenteredPoisson:
    """``Poisson(lam) - lam``."""

    lam: float = 1.0

    def __post_init__(self):
        if not self.lam > 0.0:
            raise ValueError("lam must be positive")

    def moments(self) -> MomentModel:
        return MomentModel(kappa=max(1.0, math.sqrt(self.lam)), v=self.lam)

    def draw(self, rng, n):
        return rng.poisson(self.lam, n) - self.lam


NoiseKind = Gaussian | Laplace | Uniform | CenteredPoisson


def replication_rng(seed: int, rep: int) -> np.random.Generator:
    """Generator for replication ``rep``, independent of any other replication."""
    return np.random.default_rng(np.random.SeedSequence((int(seed), int(rep))))


def observe(f, noise: NoiseKind, seed: int, rep: int = 0) -> StepSignal:
    """``f`` plus one independent noise draw per cell."""
    f = as_signal(f)
    return StepSignal(f.values + noise.draw(replication_rng(seed, rep), f.n))


def delta_ratio(Y, k: int) -> float:
    """Ratio ``s[k-1] / s[k]`` of consecutive Kolmogorov signatures of ``Y``."""
    if k < 1:
        raise ValueError("k must be >= 1")
    s = signature_array(as_signal(Y).values)
    return _ratio(s, k)


def _ratio(s: np.ndarray, k: int) -> float:
    if s.size <= k:
        raise ZeroDivisionError(f"signature {k} vanishes; the ratio is undefined")
    return float(s[k - 1] / s[k])


# ---------------------------------------------------------------- reports


def _threads() -> int:
    raw = os.environ.get("MODEHUNT_THREADS")
    cap = os.cpu_count() or 1
    if raw:
        try:
            cap = max(1, int(raw))
        except ValueError:
            raise ValueError(f"MODEHUNT_THREADS must be an integer, got {raw!r}") from None
    return cap


def _map_reps(fn: Callable[[int], dict], reps: int) -> list[dict]:
    threads = min(_threads(), reps)
    if threads <= 1:
        return [fn(r) for r in range(reps)]
    with ThreadPoolExecutor(threads) as pool:
        return list(pool.map(fn, range(reps)))


def _summarise(rows: list[dict], keys: Sequence[str]) -> tuple[dict, dict]:
    metrics, se = {}, {}
    for key in keys:
        x = np.array([r[key] for r in rows], dtype=np.float64)
        metrics[key] = float(np.mean(x))
        se[key] = float(np.std(x, ddof=1) / math.sqrt(x.size)) if x.size > 1 else None
    return metrics, se


@dataclass
class ExperimentRecord:
    """Summary of one configuration: means of per-replication metrics and their standard errors."""

    experiment: str
    n: int
    reps: int
    seed: int
    metrics: dict
    se: dict
    wall_ms: float
    config: dict = field(default_factory=dict)
    rows: list = field(default_factory=list, repr=False)

    def to_dict(self) -> dict:
        return {"experiment": self.experiment, "n": self.n, "reps": self.reps, "seed": self.seed,
                "config": self.config, "metrics": self.metrics, "se": self.se,
                "wall_ms": self.wall_ms}


@dataclass
class ExperimentReport:
    """All records of one experiment run."""

    experiment: str
    reps: int
    seed: int
    records: list[ExperimentRecord]
    summary: dict = field(default_factory=dict)

    def find(self, **config) -> ExperimentRecord:
        for rec in self.records:
            merged = {"n": rec.n, **rec.config}
            if all(merged.get(k) == v for k, v in config.items()):
                return rec
        raise KeyError(config)

    def to_dict(self, timings: bool = True) -> dict:
        recs = [r.to_dict() for r in self.records]
        if not timings:
            for r in recs:
                r["wall_ms"] = None
        return {"schema": 1, "experiment": self.experiment, "reps": self.reps, "seed": self.seed,
                "summary": self.summary, "records": recs}

    def to_json(self, timings: bool = True) -> str:
        return json.dumps(self.to_dict(timings), indent=2, sort_keys=True)

    def rows_csv(self) -> str:
        """Per-replication metrics as CSV, one line per (record, replication)."""
        buf = io.StringIO()
        keys: list[str] = []
        for rec in self.records:
            for row in rec.rows:
                keys.extend(k for k in row if k not in keys)
        cfg_keys: list[str] = []
        for rec in self.records:
            cfg_keys.extend(k for k in rec.config if k not in cfg_keys)
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["experiment", "n", *cfg_keys, *keys])
        for rec in self.records:
            for row in rec.rows:
                w.writerow([rec.experiment, rec.n, *(rec.config.get(k, "") for k in cfg_keys),
                            *(_fmt(row.get(k, "")) for k in keys)])
        return buf.getvalue()


def _fmt(x):
    return repr(float(x)) if isinstance(x, (float, np.floating)) else x


def _record(experiment, n, reps, seed, config, fn, keys) -> ExperimentRecord:
    start = time.perf_counter()
    rows = _map_reps(fn, reps)
    wall = (time.perf_counter() - start) * 1e3
    metrics, se = _summarise(rows, keys)
    for i, row in enumerate(rows):
        row["rep"] = i
    return ExperimentRecord(experiment, int(n), int(reps), int(seed), metrics, se, wall,
                            dict(config), rows)


def _check_reps(reps: int) -> None:
    if int(reps) != reps or reps < 1:
        raise ValueError("reps must be a positive integer")


# ---------------------------------------------------------------- experiments

TABLE1_SIZES = (256, 1024, 4096, 16384, 65536)


def run_table1(reps: int = 1000, seed: int = 0, sizes: Sequence[int] = TABLE1_SIZES,
               signals: Sequence[str] = ("blocks", "bumps")) -> ExperimentReport:
    """Mean separation ratio of the true-mode signature over the largest noise signature.

    Blocks get noise level ``sqrt(n)/16`` and bumps ``sqrt(n)/256``, which keeps
    the noise fixed on the Kolmogorov scale as ``n`` grows.
    """
    _check_reps(reps)
    setup = {"blocks": (Blocks(), 16.0), "bumps": (Bumps(), 256.0)}
    records = []
    for name in signals:
        kind, div = setup[name]
        k = kind.true_modes
        for n in sizes:
            f = kind.sample(n)
            noise = Gaussian(math.sqrt(n) / div)
            sub = _sub_seed(seed, name, n)

            def one(rep, f=f, noise=noise, sub=sub, k=k, n=n):
                y = f + noise.draw(replication_rng(sub, rep), n)
                s = signature_array(y)
                return {"delta": _ratio(s, k), "s_km1": float(s[k - 1]), "s_k": float(s[k])}

            records.append(_record("table1", n, reps, seed,
                                   {"signal": name, "sigma": noise.sigma, "k": k}, one,
                                   ("delta", "s_km1", "s_k")))
    return ExperimentReport("table1", reps, seed, records)


def _sub_seed(seed: int, *labels) -> int:
    # stable across runs: derived from the labels' text, not Python's hash
    data = ":".join(str(x) for x in labels).encode()
    ss = np.random.SeedSequence([int(seed), *data])
    return int(ss.generate_state(1, np.uint64)[0] >> np.uint64(1))


def run_error_control(f, k: int, noise: NoiseKind, alpha: float, reps: int, seed: int = 0,
                      radius: float | None = None) -> ExperimentReport:
    """Frequencies of over- and underestimation and of band coverage at threshold tau.

    ``tau`` is the Gaussian threshold for :class:`Gaussian` noise and the
    moment threshold otherwise, unless ``radius`` is given.
    """
    from .stats import tau as tau_moments

    _check_reps(reps)
    f = as_signal(f)
    n = f.n
    if radius is None:
        if isinstance(noise, Gaussian):
            radius = tau_gauss(n, alpha, GaussianModel(noise.sigma)) if noise.sigma > 0 else 0.0
        else:
            radius = tau_moments(n, alpha, noise.moments())
    truth = kolmogorov_signatures(f)
    k2 = mode_estimate(truth, 2.0 * radius) if radius > 0 else mode_count(f)
    sub = _sub_seed(seed, "error-control", n)

    def one(rep):
        y = f.values + noise.draw(replication_rng(sub, rep), n)
        s = kolmogorov_signatures(y)
        if radius > 0:
            k_hat = mode_estimate(s, radius)
            covered = band_covers(confidence_band(s, radius), truth)
        else:
            k_hat = mode_count(y)
            covered = s == truth
        return {"k_hat": k_hat, "over": float(k_hat > k), "under": float(k_hat < k2),
                "covered": float(covered)}

    rec = _record("error-control", n, reps, seed,
                  {"k": k, "alpha": alpha, "tau": radius, "k_2tau_f": k2, "noise": repr(noise)},
                  one, ("over", "under", "covered", "k_hat"))
    return ExperimentReport("error-control", reps, seed, [rec])


def sup_success_curve(persistence_rows: list[np.ndarray], q_grid: np.ndarray, k: int = 1) -> np.ndarray:
    """Fraction of replications with exactly ``k`` sup-norm signatures at or above each ``q``."""
    hits = np.zeros(q_grid.size)
    for sig in persistence_rows:
        counts = np.searchsorted(-sig, -q_grid, side="right")  # sig is descending
        hits += counts == k
    return hits / max(1, len(persistence_rows))


SPIKE_SIZES = tuple(2**p for p in range(8, 17))
PLATEAU_SIZES = (1024, 4096, 16384, 65536)


def plateau_height(n: int, scale: float = 10.0) -> float:
    """Plateau schedule ``scale * n**(-1/3)``: vanishes faster than 1/sqrt(log n) but slower than 1/sqrt(n)."""
    return scale * n ** (-1.0 / 3.0)


def run_detection_comparison(reps: int = 500, seed: int = 0, alpha: float = 0.1,
                             spike_excess: float = 0.5,
                             spike_sizes: Sequence[int] = SPIKE_SIZES,
                             plateau_sizes: Sequence[int] = PLATEAU_SIZES,
                             plateau_scale: float = 10.0,
                             kolmogorov_threshold: str = "signature",
                             q_grid_size: int = 200) -> ExperimentReport:
    """Spike and plateau detection under standard Gaussian noise.

    Spikes: fraction of replications with at least one mode at the Gaussian
    threshold. Plateaus: fraction recovering exactly one mode with Kolmogorov
    thresholding versus the best sup-norm threshold on a log grid.

    ``kolmogorov_threshold`` picks the plateau cut: ``"signature"`` is half the
    noiseless Kolmogorov signature, ``"height"`` is half the plateau height.
    """
    _check_reps(reps)
    if kolmogorov_threshold not in ("signature", "height"):
        raise ValueError("kolmogorov_threshold must be 'signature' or 'height'")
    noise = Gaussian(1.0)
    records = []
    spike = Spike(spike_excess)
    for n in spike_sizes:
        f = spike.sample(n)
        t = tau_gauss(n, alpha, GaussianModel(1.0))
        sub = _sub_seed(seed, "spike", n)

        def one(rep, f=f, t=t, sub=sub, n=n):
            s = signature_array(f + noise.draw(replication_rng(sub, rep), n))
            return {"detected": float(s.size > 0 and s[0] >= t), "s0": float(s[0]) if s.size else 0.0}

        records.append(_record("detection", n, reps, seed,
                               {"signal": "spike", "tau": t, "spike_excess": spike_excess},
                               one, ("detected", "s0")))
    spike_rates = [r.metrics["detected"] for r in records]
    # a constant rate sequence carries no rank information
    rho = float("nan")
    if len(spike_sizes) > 1 and np.ptp(spike_rates) > 0:
        rho = float(spearmanr(list(spike_sizes), spike_rates).statistic)

    plateau_rows = []
    for n in plateau_sizes:
        delta = plateau_height(n, plateau_scale)
        f = Plateau(delta).sample(n)
        s0 = signature_array(f)[0]
        cut = 0.5 * s0 if kolmogorov_threshold == "signature" else 0.5 * delta
        sub = _sub_seed(seed, "plateau", n)
        pers: list[np.ndarray] = [None] * reps  # type: ignore[list-item]

        def one(rep, f=f, cut=cut, sub=sub, n=n, pers=pers):
            y = f + noise.draw(replication_rng(sub, rep), n)
            s = signature_array(y)
            pers[rep] = persistence_values(y) / 2.0
            return {"kolmogorov_success": float(int(np.count_nonzero(s >= cut)) == 1)}

        rec = _record("detection", n, reps, seed,
                      {"signal": "plateau", "delta": delta, "threshold": cut,
                       "threshold_rule": kolmogorov_threshold, "s0_f": float(s0)},
                      one, ("kolmogorov_success",))
        hi = max(float(p[0]) for p in pers if p.size) if any(p.size for p in pers) else 1.0
        q_grid = np.geomspace(1e-3, 2.0 * hi, q_grid_size)
        curve = sup_success_curve(pers, q_grid)
        best = int(np.argmax(curve))
        p = float(curve[best])
        rec.metrics["sup_best_success"] = p
        rec.se["sup_best_success"] = math.sqrt(p * (1 - p) / reps) if reps > 1 else None
        rec.config["sup_best_q"] = float(q_grid[best])
        rec.config["detection_bound"] = detection_bound(float(s0), n, noise.moments())
        for row, pv in zip(rec.rows, pers):
            row["sup_count_at_best_q"] = int(np.count_nonzero(pv >= q_grid[best]))
        records.append(rec)
        plateau_rows.append(rec)

    summary = {"spike_spearman": rho}
    if plateau_rows:
        last = plateau_rows[-1]
        summary["plateau_gap_at_largest_n"] = (last.metrics["kolmogorov_success"]
                                               - last.metrics["sup_best_success"])
    return ExperimentReport("detection", reps, seed, records, summary)
