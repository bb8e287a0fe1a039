"""Timing benchmarks: three reaction patterns with exact expected
quiescence times, and end-to-end scaling of compiled CRNs.

Trial ``t`` at size ``n`` draws from ``trial_rng(seed, n, t)``, so a report
is a pure function of ``(pattern, sizes, trials, seed)`` regardless of the
worker count.
"""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Union

import numpy as np
from scipy import stats

from . import __version__
from .compiler.top import CompiledCrn, compile_spec
from .corpus import load_crn
from .crn import Configuration, Crn
from .kernels import default_kernel
from .kinetics import NetworkArrays, StopRule, default_silence_window, simulate, trial_rng
from .semilinear import SemilinearFunctionSpec

__all__ = [
    "MIN_TRIALS",
    "ScalingReport",
    "BenchOutputError",
    "harmonic",
    "loglog_slope",
    "bench_unimolecular",
    "bench_leader_election",
    "bench_catalytic",
    "bench_double",
    "bench_compiled",
    "ray_input",
    "PATTERNS",
]

MIN_TRIALS = 30


class BenchOutputError(AssertionError):
    """A trial ended with an output that disagrees with the oracle."""


def harmonic(n: int) -> float:
    return float(np.sum(1.0 / np.arange(1, n + 1)))


def loglog_slope(
    sizes: Sequence[float], means: Sequence[float], sems: Optional[Sequence[float]] = None,
    level: float = 0.95,
) -> tuple[float, tuple[float, float]]:
    """Weighted least-squares slope of ``log mean`` on ``log n`` with a confidence interval.

    Weights come from the delta-method variance ``(sem / mean)^2`` of each
    log mean, so the interval reflects sampling noise even with two sizes.
    """
    x = np.log(np.asarray(sizes, dtype=float))
    y = np.log(np.asarray(means, dtype=float))
    if sems is None:
        fit = stats.linregress(x, y)
        half = stats.t.ppf(0.5 + level / 2, max(1, len(x) - 2)) * fit.stderr
        return float(fit.slope), (float(fit.slope - half), float(fit.slope + half))
    var = (np.asarray(sems, dtype=float) / np.asarray(means, dtype=float)) ** 2
    w = 1.0 / np.maximum(var, 1e-300)
    xm = np.sum(w * x) / np.sum(w)
    ym = np.sum(w * y) / np.sum(w)
    sxx = np.sum(w * (x - xm) ** 2)
    slope = float(np.sum(w * (x - xm) * (y - ym)) / sxx)
    half = float(stats.norm.ppf(0.5 + level / 2) / math.sqrt(sxx))
    return slope, (slope - half, slope + half)


@dataclass
class ScalingReport:
    pattern: str
    sizes: tuple[int, ...]
    trials: int
    samples: np.ndarray
    seed: int
    reference: Optional[tuple[float, ...]] = None
    tolerance: Optional[float] = None
    slope_band: Optional[tuple[float, float]] = None
    norms: Optional[tuple[int, ...]] = None
    measure: str = "quiescence"
    events: Optional[np.ndarray] = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.trials < MIN_TRIALS:
            raise ValueError(f"at least {MIN_TRIALS} trials per size are required")
        if any(b <= a for a, b in zip(self.sizes, self.sizes[1:])):
            raise ValueError("sizes must be strictly increasing")
        if self.samples.shape != (len(self.sizes), self.trials):
            raise ValueError("samples must have shape (sizes, trials)")
        if self.norms is None:
            self.norms = tuple(self.sizes)

    @property
    def means(self) -> np.ndarray:
        return self.samples.mean(axis=1)

    @property
    def stds(self) -> np.ndarray:
        return self.samples.std(axis=1, ddof=1)

    @property
    def sems(self) -> np.ndarray:
        return self.stds / math.sqrt(self.trials)

    @property
    def relative_errors(self) -> Optional[np.ndarray]:
        if self.reference is None:
            return None
        ref = np.asarray(self.reference)
        return (self.means - ref) / ref

    def slope(self, level: float = 0.95) -> tuple[float, tuple[float, float]]:
        if len(self.sizes) < 2:
            return math.nan, (math.nan, math.nan)
        return loglog_slope(self.norms, self.means, self.sems, level)

    def violations(self) -> list[str]:
        out = []
        if self.tolerance is not None and self.reference is not None:
            for n, err in zip(self.sizes, self.relative_errors):
                if abs(err) > self.tolerance:
                    out.append(f"n={n}: mean off reference by {100 * err:+.1f}% "
                               f"(tolerance {100 * self.tolerance:.0f}%)")
        if self.slope_band is not None:
            lo, hi = self.slope_band
            s, _ = self.slope()
            if not lo <= s <= hi:
                out.append(f"log-log slope {s:.3f} outside [{lo}, {hi}]")
        return out

    @property
    def ok(self) -> bool:
        return not self.violations()

    def header(self) -> list[str]:
        lines = [
            f"leaderless_crn {__version__}",
            f"pattern={self.pattern} seed={self.seed} trials={self.trials} "
            f"sizes={','.join(map(str, self.sizes))} measure={self.measure}",
        ]
        lines += [f"{k}={v}" for k, v in sorted(self.meta.items())]
        return lines

    def samples_csv(self) -> str:
        buf = io.StringIO()
        for line in self.header():
            buf.write(f"# {line}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["pattern", "n", "norm", "trial", "time", "events"])
        for i, n in enumerate(self.sizes):
            for t in range(self.trials):
                ev = "" if self.events is None else int(self.events[i, t])
                w.writerow([self.pattern, n, self.norms[i], t, repr(float(self.samples[i, t])), ev])
        return buf.getvalue()

    def summary(self) -> dict:
        slope, ci = self.slope()
        rel = self.relative_errors
        return {
            "tool": f"leaderless_crn {__version__}",
            "pattern": self.pattern,
            "seed": self.seed,
            "trials": self.trials,
            "measure": self.measure,
            "meta": dict(self.meta),
            "sizes": list(self.sizes),
            "norms": list(self.norms),
            "mean": self.means.tolist(),
            "std": self.stds.tolist(),
            "reference": None if self.reference is None else list(self.reference),
            "relative_error": None if rel is None else rel.tolist(),
            "tolerance": self.tolerance,
            "slope": slope,
            "slope_ci95": list(ci),
            "slope_band": None if self.slope_band is None else list(self.slope_band),
            "violations": self.violations(),
            "ok": self.ok,
        }

    def summary_json(self) -> str:
        return json.dumps(self.summary(), indent=2) + "\n"

    def gnuplot_data(self) -> str:
        lines = [f"# {h}" for h in self.header()]
        lines.append("# n norm mean std reference")
        ref = self.reference or (math.nan,) * len(self.sizes)
        for n, m, mu, sd, r in zip(self.sizes, self.norms, self.means, self.stds, ref):
            lines.append(f"{n} {m} {mu!r} {sd!r} {r!r}")
        return "\n".join(lines) + "\n"

    def text(self) -> str:
        slope, (lo, hi) = self.slope()
        rows = [f"pattern {self.pattern}: {self.trials} trials/size, seed {self.seed}"]
        rel = self.relative_errors
        for i, n in enumerate(self.sizes):
            row = f"  n={n:<6d} mean={self.means[i]:12.4f}  std={self.stds[i]:10.4f}"
            if rel is not None:
                row += f"  ref={self.reference[i]:12.4f}  err={100 * rel[i]:+6.2f}%"
            rows.append(row)
        if len(self.sizes) > 1:
            rows.append(f"  log-log slope {slope:.3f}  (95% CI {lo:.3f} .. {hi:.3f})")
        v = self.violations()
        rows.append("  acceptance: " + ("ok" if not v else "; ".join(v)))
        return "\n".join(rows) + "\n"


# One task is one size: picklable arguments in, raw samples out.
def _run_size(args) -> tuple[np.ndarray, np.ndarray]:
    crn, init, volume, stop, seed, n, trials, measure, expected, mass_bound, kernel = args
    net = NetworkArrays.from_crn(crn)
    times = np.empty(trials)
    events = np.empty(trials, dtype=np.int64)
    for t in range(trials):
        tr = simulate(crn, init, volume, stop, rng=trial_rng(seed, n, t), record=False,
                      mass_bound=mass_bound, kernel=kernel, network=net)
        if tr.status not in ("quiescent", "silent"):
            raise BenchOutputError(f"n={n} trial {t}: run ended by {tr.status}")
        if expected is not None and tr.outputs() != expected:
            raise BenchOutputError(
                f"n={n} trial {t}: output {tr.outputs()} differs from oracle {expected}"
            )
        times[t] = tr.time if measure == "quiescence" else tr.last_change
        events[t] = tr.n_events
    return times, events


def _collect(tasks: list, workers: int) -> tuple[np.ndarray, np.ndarray]:
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_size, tasks))
    else:
        results = [_run_size(t) for t in tasks]
    return np.vstack([r[0] for r in results]), np.vstack([r[1] for r in results])


def _pattern(
    name: str,
    crn: Crn,
    sizes: Sequence[int],
    trials: int,
    seed: int,
    init: Callable[[int], Configuration],
    volume: Callable[[int], float],
    reference: Callable[[int], float],
    expected: Callable[[int], Optional[tuple[int, ...]]],
    measure: str,
    tolerance: float,
    workers: int,
    kernel: Optional[str],
) -> ScalingReport:
    sizes = tuple(int(n) for n in sizes)
    if any(n < 1 for n in sizes):
        raise ValueError("sizes must be positive")
    kernel = kernel or default_kernel()
    tasks = [
        (crn, init(n), volume(n), StopRule(), seed, n, trials, measure, expected(n), None, kernel)
        for n in sizes
    ]
    if trials < MIN_TRIALS:
        raise ValueError(f"at least {MIN_TRIALS} trials per size are required")
    samples, events = _collect(tasks, workers)
    return ScalingReport(
        pattern=name, sizes=sizes, trials=trials, samples=samples, seed=seed,
        reference=tuple(reference(n) for n in sizes), tolerance=tolerance,
        measure=measure, events=events, meta={"kernel": kernel},
    )


def bench_unimolecular(sizes, trials=500, seed=0, workers=1, kernel=None, tolerance=0.10):
    """``X -> Y`` from ``{X: n}`` at ``v = n``; expected quiescence ``H_n``."""
    return _pattern(
        "unimolecular", load_crn("unimolecular"), sizes, trials, seed,
        init=lambda n: Configuration({"X": n}), volume=float, reference=harmonic,
        expected=lambda n: (n,), measure="quiescence", tolerance=tolerance,
        workers=workers, kernel=kernel,
    )


def bench_leader_election(sizes, trials=500, seed=0, workers=1, kernel=None, tolerance=0.10):
    """``L + L -> L`` from ``{L: n}`` at ``v = n``; expected quiescence ``2n(1 - 1/n)``."""
    return _pattern(
        "leader_election", load_crn("leader_election"), sizes, trials, seed,
        init=lambda n: Configuration({"L": n}), volume=float,
        reference=lambda n: 2.0 * n * (1.0 - 1.0 / n),
        expected=lambda n: (), measure="quiescence", tolerance=tolerance,
        workers=workers, kernel=kernel,
    )


def bench_catalytic(sizes, trials=500, seed=0, workers=1, kernel=None, tolerance=0.10):
    """``C + A -> C + B`` from ``{C: n, A: n}`` at ``v = 2n``; expected quiescence ``2 H_n``."""
    return _pattern(
        "catalytic", load_crn("catalytic"), sizes, trials, seed,
        init=lambda n: Configuration({"C": n, "A": n}), volume=lambda n: 2.0 * n,
        reference=lambda n: 2.0 * harmonic(n),
        expected=lambda n: (n,), measure="quiescence", tolerance=tolerance,
        workers=workers, kernel=kernel,
    )


def bench_double(sizes, trials=100, seed=0, workers=1, kernel=None, tolerance=0.10):
    """Uncompiled ``X -> 2Y`` baseline: output settles after ``H_n`` at ``v = n``."""
    return _pattern(
        "double", load_crn("double"), sizes, trials, seed,
        init=lambda n: Configuration({"X": n}), volume=float, reference=harmonic,
        expected=lambda n: (2 * n,), measure="stabilization", tolerance=tolerance,
        workers=workers, kernel=kernel,
    )


def ray_input(ray: Sequence[int], n: int) -> tuple[int, ...]:
    """Largest multiple of ``ray`` with norm at most ``n``."""
    total = sum(ray)
    if total <= 0 or any(r < 0 for r in ray):
        raise ValueError("ray must be nonnegative and nonzero")
    scale = n // total
    if scale < 1:
        raise ValueError(f"size {n} is smaller than the ray norm {total}")
    return tuple(scale * r for r in ray)


def bench_compiled(
    spec: Union[SemilinearFunctionSpec, CompiledCrn],
    sizes,
    trials=100,
    ray: Optional[Sequence[int]] = None,
    seed=0,
    workers=1,
    kernel=None,
    slope_band=(0.7, 1.3),
    silence: Optional[int] = None,
) -> ScalingReport:
    """Heuristic stabilization time of a compiled CRN along ``ray``.

    Each run stops at quiescence or after an output-silence window
    (default ``50 * ||x||`` events); the final output must equal the
    oracle and every visited configuration must respect the mass bound.
    """
    compiled = spec if isinstance(spec, CompiledCrn) else compile_spec(spec)
    ray = tuple(ray) if ray is not None else (1,) * compiled.k
    if len(ray) != compiled.k:
        raise ValueError(f"ray needs {compiled.k} components")
    kernel = kernel or default_kernel()
    sizes = tuple(int(n) for n in sizes)
    if trials < MIN_TRIALS:
        raise ValueError(f"at least {MIN_TRIALS} trials per size are required")
    tasks, norms = [], []
    for n in sizes:
        x = ray_input(ray, n)
        norms.append(sum(x))
        stop = StopRule(silence=silence or default_silence_window(sum(x)))
        tasks.append((compiled.crn, compiled.initial(x), compiled.volume(x), stop, seed, n,
                      trials, "stabilization", compiled.expected(x), float(compiled.gamma),
                      kernel))
    samples, events = _collect(tasks, workers)
    return ScalingReport(
        pattern=f"compiled:{compiled.spec.name or 'spec'}", sizes=sizes, trials=trials,
        samples=samples, seed=seed, slope_band=tuple(slope_band), norms=tuple(norms),
        measure="stabilization", events=events,
        meta={"kernel": kernel, "ray": ",".join(map(str, ray)), "gamma": compiled.gamma},
    )


PATTERNS = {
    "unimolecular": bench_unimolecular,
    "leader_election": bench_leader_election,
    "catalytic": bench_catalytic,
    "double": bench_double,
}
