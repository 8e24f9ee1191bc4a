"""Monte Carlo trial loops, sweep bookkeeping and threshold estimation.

Trial ``t`` of a point draws its erasure from ``RngStream(point_seed, t)``.
Trials are tallied in index order and a point stops at the first trial index
where the failure target is met, so results do not depend on how many
worker processes ran them.
"""

from __future__ import annotations

import csv
import json
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy.stats import binomtest

from . import __version__
from .code import TsccCode, build_code
from .correctability import tscc_correctable
from .decoders import decode_fails
from .erasure import RngStream, sample_erasure

SWEEP_MODES = ("partial", "maximal", "correctability")
WORKERS_ENV = "TSCC_WORKERS"
CHUNK = 250


def default_workers() -> int:
    try:
        return max(1, int(os.environ.get(WORKERS_ENV, "1")))
    except ValueError:
        return 1


@dataclass
class SweepConfig:
    mode: str
    distances: list[int]
    eps_grid: list[float]
    max_trials: int = 10_000
    target_failures: int = 2_000
    seed: int = 0
    workers: int = field(default_factory=default_workers)

    def __post_init__(self) -> None:
        if self.mode not in SWEEP_MODES:
            raise ValueError(f"mode must be one of {SWEEP_MODES}")
        if list(self.eps_grid) != sorted(self.eps_grid):
            raise ValueError("eps_grid must be sorted ascending")
        if any(not 0 <= e <= 1 for e in self.eps_grid):
            raise ValueError("erasure probabilities must lie in [0, 1]")
        if self.max_trials < 1 or self.target_failures < 1:
            raise ValueError("max_trials and target_failures must be positive")
        if any(d <= 0 or d % 2 for d in self.distances):
            raise ValueError("distances must be positive and even")
        if self.workers < 1:
            raise ValueError("workers must be positive")

    @classmethod
    def from_dict(cls, data: dict) -> SweepConfig:
        return cls(**{k: data[k] for k in data if k in cls.__dataclass_fields__})


@dataclass(frozen=True)
class PointResult:
    d: int
    eps: float
    trials: int
    failures: int
    rate: float
    ci_lo: float
    ci_hi: float
    mode: str
    seed: int


@dataclass
class SweepResult:
    config: SweepConfig
    points: list[PointResult]
    wall_time: float = 0.0
    version: str = __version__

    def curve(self, d: int) -> list[PointResult]:
        return sorted((p for p in self.points if p.d == d), key=lambda p: p.eps)

    @property
    def distances(self) -> list[int]:
        return sorted({p.d for p in self.points})

    def jsonl(self) -> str:
        return "".join(json.dumps(asdict(p), sort_keys=True) + "\n" for p in self.points)

    def write(self, path: str | Path, csv_path: str | Path | None = None) -> None:
        """Write JSON lines, a ``.meta.json`` sidecar and optionally a CSV mirror."""
        path = Path(path)
        path.write_text(self.jsonl())
        meta = {"config": asdict(self.config), "wall_time": self.wall_time, "version": self.version}
        path.with_suffix(".meta.json").write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
        if csv_path is not None:
            with open(csv_path, "w", newline="") as fh:
                writer = csv.DictWriter(fh, fieldnames=list(PointResult.__dataclass_fields__))
                writer.writeheader()
                for p in self.points:
                    writer.writerow(asdict(p))

    @classmethod
    def read(cls, path: str | Path) -> SweepResult:
        path = Path(path)
        points = [PointResult(**json.loads(line)) for line in path.read_text().splitlines() if line.strip()]
        meta_path = path.with_suffix(".meta.json")
        if meta_path.exists():
            meta = json.loads(meta_path.read_text())
            cfg = SweepConfig.from_dict(meta["config"])
            return cls(cfg, points, meta.get("wall_time", 0.0), meta.get("version", __version__))
        cfg = SweepConfig(points[0].mode, sorted({p.d for p in points}),
                          sorted({p.eps for p in points}), seed=points[0].seed)
        return cls(cfg, points)


def wilson_interval(failures: int, trials: int) -> tuple[float, float]:
    """95% Wilson score interval for a binomial proportion."""
    if trials == 0:
        return 0.0, 1.0
    ci = binomtest(failures, trials).proportion_ci(0.95, method="wilson")
    return float(ci.low), float(ci.high)


def point_seed(seed: int, d: int, eps: float) -> int:
    """Seed of one (d, eps) point; shared across decoder modes on purpose."""
    ss = np.random.SeedSequence([seed & 0xFFFFFFFFFFFFFFFF, d, int(round(eps * 1e9))])
    return int(ss.generate_state(1, np.uint64)[0])


def trial_function(code: TsccCode, mode: str) -> Callable[[float, RngStream], bool]:
    if mode == "correctability":
        return lambda eps, rng: not tscc_correctable(code, sample_erasure(code.n, eps, rng).erased).correctable
    if mode in ("partial", "maximal"):
        return lambda eps, rng: decode_fails(code, mode, sample_erasure(code.n, eps, rng))
    raise ValueError(f"unknown mode {mode!r}")


def run_trials(code: TsccCode, mode: str, eps: float, seed: int, start: int, stop: int) -> list[bool]:
    fn = trial_function(code, mode)
    base = RngStream(seed)
    return [fn(eps, base.substream(t)) for t in range(start, stop)]


_WORKER_CODES: dict[int, TsccCode] = {}


def _worker_chunk(d: int, mode: str, eps: float, seed: int, start: int, stop: int) -> list[bool]:
    code = _WORKER_CODES.get(d)
    if code is None:
        code = _WORKER_CODES[d] = build_code(d, check=False)
    return run_trials(code, mode, eps, seed, start, stop)


def _tally(flags: Iterable[bool], trials: int, failures: int, target: int) -> tuple[int, int, bool]:
    for f in flags:
        trials += 1
        failures += bool(f)
        if failures >= target:
            return trials, failures, True
    return trials, failures, False


def run_point(code: TsccCode, mode: str, eps: float, max_trials: int = 10_000,
              target_failures: int = 2_000, seed: int = 0, workers: int = 1,
              executor: ProcessPoolExecutor | None = None) -> tuple[int, int]:
    """Run trials until ``target_failures`` failures or ``max_trials`` trials.

    Returns ``(trials, failures)``. The counts are identical for any worker
    count because trials are tallied strictly in index order.
    """
    if max_trials < 1:
        raise ValueError("max_trials must be positive")
    trials = failures = 0
    if workers <= 1 and executor is None:
        for start in range(0, max_trials, CHUNK):
            flags = run_trials(code, mode, eps, seed, start, min(start + CHUNK, max_trials))
            trials, failures, done = _tally(flags, trials, failures, target_failures)
            if done:
                break
        return trials, failures

    own = executor is None
    pool = executor or ProcessPoolExecutor(max_workers=workers)
    try:
        starts = list(range(0, max_trials, CHUNK))
        futures = []
        nxt = 0
        in_flight = max(2 * workers, 2)
        while nxt < len(starts) and len(futures) < in_flight:
            s = starts[nxt]
            futures.append(pool.submit(_worker_chunk, code.d, mode, eps, seed, s, min(s + CHUNK, max_trials)))
            nxt += 1
        idx = 0
        while idx < len(futures):
            flags = futures[idx].result()
            idx += 1
            trials, failures, done = _tally(flags, trials, failures, target_failures)
            if done:
                break
            if nxt < len(starts):
                s = starts[nxt]
                futures.append(pool.submit(_worker_chunk, code.d, mode, eps, seed, s, min(s + CHUNK, max_trials)))
                nxt += 1
        for fut in futures[idx:]:
            fut.cancel()
    finally:
        if own:
            pool.shutdown(wait=True, cancel_futures=True)
    return trials, failures


def run_sweep(cfg: SweepConfig, progress: Callable[[PointResult], None] | None = None,
              codes: dict[int, TsccCode] | None = None) -> SweepResult:
    """Every (d, eps) point of ``cfg`` in order of distance then eps."""
    t0 = time.perf_counter()
    points = []
    pool = ProcessPoolExecutor(max_workers=cfg.workers) if cfg.workers > 1 else None
    try:
        for d in cfg.distances:
            code = (codes or {}).get(d) or build_code(d)
            for eps in cfg.eps_grid:
                trials, failures = run_point(
                    code, cfg.mode, eps, cfg.max_trials, cfg.target_failures,
                    point_seed(cfg.seed, d, eps), cfg.workers, executor=pool,
                )
                lo, hi = wilson_interval(failures, trials)
                pt = PointResult(d, float(eps), trials, failures, failures / trials, lo, hi, cfg.mode, cfg.seed)
                points.append(pt)
                if progress is not None:
                    progress(pt)
    finally:
        if pool is not None:
            pool.shutdown(wait=True, cancel_futures=True)
    return SweepResult(cfg, points, time.perf_counter() - t0)


# --------------------------------------------------------------- thresholds


@dataclass(frozen=True)
class ThresholdEstimate:
    crossed: bool
    value: float | None = None
    lo: float | None = None
    hi: float | None = None
    pairwise: dict = field(default_factory=dict)

    def __str__(self) -> str:
        if not self.crossed:
            return "no crossing"
        return f"{self.value:.4f} [{self.lo:.4f}, {self.hi:.4f}]"


def _logit(p: np.ndarray) -> np.ndarray:
    return np.log(p / (1 - p))


def _smoothed(f: np.ndarray, n: np.ndarray) -> np.ndarray:
    return (f + 0.5) / (n + 1.0)


def _pair_crossing(eps: np.ndarray, f1, n1, f2, n2, window: int) -> float | None:
    """Crossing of curve 2 (larger d) rising through curve 1, or ``None``."""
    p1, p2 = _smoothed(f1, n1), _smoothed(f2, n2)
    diff = _logit(p2) - _logit(p1)
    brackets = [i for i in range(len(eps) - 1) if diff[i] <= 0 < diff[i + 1]]
    if not brackets:
        return None
    i = max(brackets, key=lambda k: diff[k + 1] - diff[k])
    lo, hi = max(0, i - window + 1), min(len(eps), i + window + 1)
    xs = eps[lo:hi]
    fits = []
    for p, n in ((p1, n1), (p2, n2)):
        w = np.sqrt(n[lo:hi] * p[lo:hi] * (1 - p[lo:hi]))
        fits.append(np.polyfit(xs, _logit(p[lo:hi]), 1, w=w))
    (b1, a1), (b2, a2) = fits
    if b1 != b2:
        x = (a1 - a2) / (b2 - b1)
        if eps[i] <= x <= eps[i + 1]:
            return float(x)
    # Fall back to the bracket's linear interpolation of the log-odds gap.
    t = -diff[i] / (diff[i + 1] - diff[i])
    return float(eps[i] + t * (eps[i + 1] - eps[i]))


def _curves(points: Sequence[PointResult]) -> dict[int, dict[float, tuple[int, int]]]:
    out: dict[int, dict[float, tuple[int, int]]] = {}
    for p in points:
        out.setdefault(p.d, {})[p.eps] = (p.failures, p.trials)
    return out


def _estimate(curves: dict, window: int) -> tuple[float | None, dict]:
    ds = sorted(curves)
    pairwise = {}
    for a in range(len(ds)):
        for b in range(a + 1, len(ds)):
            d1, d2 = ds[a], ds[b]
            shared = sorted(set(curves[d1]) & set(curves[d2]))
            if len(shared) < 2:
                continue
            eps = np.array(shared, dtype=float)
            f1, n1 = (np.array(v, dtype=float) for v in zip(*(curves[d1][e] for e in shared)))
            f2, n2 = (np.array(v, dtype=float) for v in zip(*(curves[d2][e] for e in shared)))
            x = _pair_crossing(eps, f1, n1, f2, n2, window)
            if x is not None:
                pairwise[(d1, d2)] = x
    if not pairwise:
        return None, {}
    return float(np.mean(list(pairwise.values()))), pairwise


def estimate_threshold(results: SweepResult | Sequence[PointResult], window: int = 2,
                       bootstrap: int = 400, seed: int = 0) -> ThresholdEstimate:
    """Average pairwise crossing of the failure curves with a bootstrap interval.

    Each pair of distances is compared in log-odds; around the steepest sign
    change of the gap both curves get a weighted linear fit of logit(rate)
    against eps and the fitted lines are intersected. The interval comes from
    a parametric bootstrap that resamples every point's failure count.
    """
    points = results.points if isinstance(results, SweepResult) else list(results)
    curves = _curves(points)
    if len(curves) < 2:
        raise ValueError("threshold estimation needs at least two distances")
    value, pairwise = _estimate(curves, window)
    if value is None:
        return ThresholdEstimate(False)
    rng = np.random.default_rng(seed)
    samples = []
    for _ in range(bootstrap):
        resampled = {
            d: {e: (int(rng.binomial(n, f / n)), n) for e, (f, n) in c.items()}
            for d, c in curves.items()
        }
        v, _ = _estimate(resampled, window)
        if v is not None:
            samples.append(v)
    if samples:
        lo, hi = (float(x) for x in np.percentile(samples, [2.5, 97.5]))
    else:
        lo = hi = value
    return ThresholdEstimate(True, value, min(lo, value), max(hi, value), pairwise)
