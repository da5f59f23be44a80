"""Discrete-time simulation engine: drive one scheduler over one mobility trace.

The engine owns the clock and the measurement noise.  At every grid step it
asks the active scheduler for the node's reported position, compares it with
the ground truth, and logs one event row.  Localizations fire at the first
grid step at or after the scheduler's requested time (ceiling snap onto the
dt grid); the very first fix is forced at t=0.  A run is fully determined by
its config and seed -- the noise stream is the only randomness, and it is
seeded explicitly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .geometry import (
    LocalizationSample,
    NoiseModel,
    Position,
    localize,
    threshold_accuracy,
)
from .mobility import MobilityTrace
from .protocols import (
    DvmConfig,
    MadrdConfig,
    SchedulerState,
    SfrConfig,
    backtrack_correct,
    dvm_init,
    dvm_on_localize,
    madrd_init,
    madrd_on_localize,
    madrd_predict,
    sfr_init,
    sfr_on_localize,
)

__all__ = [
    "PROTOCOL_KINDS",
    "RunConfig",
    "RunMetrics",
    "EventRecord",
    "RunResult",
    "PairedResult",
    "run",
    "run_paired",
]

_SCHED_EPS = 1e-9

PROTOCOL_KINDS = ("sfr", "dvm", "madrd")

_CONFIG_TYPES = {"sfr": SfrConfig, "dvm": DvmConfig, "madrd": MadrdConfig}
_INIT = {"sfr": sfr_init, "dvm": dvm_init, "madrd": madrd_init}
_ON_LOCALIZE = {"sfr": sfr_on_localize, "dvm": dvm_on_localize, "madrd": madrd_on_localize}


@dataclass(frozen=True)
class RunConfig:
    trace: MobilityTrace
    protocol: str
    protocol_config: SfrConfig | DvmConfig | MadrdConfig
    noise: NoiseModel = field(default_factory=NoiseModel)
    dist_tolerance: float = 5.0
    seed: int = 0
    backtracking_enabled: bool = False

    def __post_init__(self) -> None:
        if self.protocol not in PROTOCOL_KINDS:
            raise ValueError(f"unknown protocol {self.protocol!r}, expected one of {PROTOCOL_KINDS}")
        expected = _CONFIG_TYPES[self.protocol]
        if not isinstance(self.protocol_config, expected):
            raise ValueError(
                f"protocol {self.protocol!r} needs a {expected.__name__}, "
                f"got {type(self.protocol_config).__name__}"
            )
        if not math.isfinite(self.dist_tolerance) or self.dist_tolerance < 0:
            raise ValueError(f"dist_tolerance must be >= 0, got {self.dist_tolerance}")


class EventRecord(NamedTuple):
    """One row per dt step of the run."""

    t: float
    true_x: float
    true_y: float
    reported_x: float
    reported_y: float
    error: float
    localized: int
    period: float
    confidence: str


@dataclass(frozen=True)
class RunMetrics:
    error_series: list[tuple[float, float]]
    localization_count: int
    accuracy: float
    mean_error: float
    max_error: float
    correction_count: int


@dataclass(frozen=True)
class RunResult:
    metrics: RunMetrics
    events: list[EventRecord]
    samples: list[LocalizationSample]


def run(cfg: RunConfig) -> RunResult:
    """Simulate one node/protocol pair over the full trace.

    Per grid step: fire a localization if one is due, then record the reported
    position, its error against ground truth, and the scheduler's period and
    confidence.  With backtracking enabled, each new fix rewrites the reported
    points of the interval it closes with the time-linear interpolation of its
    two bounding fixes (the correction is applied to the event log and the
    error series; corrections larger than the noise bound are counted).
    """
    trace = cfg.trace
    times = trace.times.tolist()
    true_xs = trace.xs.tolist()
    true_ys = trace.ys.tolist()
    rng = np.random.default_rng(cfg.seed)
    noise = cfg.noise
    init = _INIT[cfg.protocol]
    on_localize = _ON_LOCALIZE[cfg.protocol]
    pcfg = cfg.protocol_config
    predicts = cfg.protocol == "madrd"
    tracks_confidence = predicts

    state: SchedulerState | None = None
    events: list[EventRecord] = []
    samples: list[LocalizationSample] = []
    pending: list[int] = []  # event indices since the last fix (backtracking)
    correction_count = 0

    for k, t in enumerate(times):
        tx = true_xs[k]
        ty = true_ys[k]
        localized = 0
        if state is None or t + _SCHED_EPS >= state.next_localization_time:
            sample = localize(Position(tx, ty), noise, rng, t=t)
            if state is None:
                state = init(sample, pcfg)
            else:
                prev_fix = state.last_sample
                state = on_localize(state, sample, pcfg)
                if cfg.backtracking_enabled and pending:
                    series = [
                        (events[i].t, Position(events[i].reported_x, events[i].reported_y))
                        for i in pending
                    ]
                    corrected, moved = backtrack_correct(prev_fix, sample, series, noise.max_magnitude)
                    correction_count += moved
                    for i, (ct, cpos) in zip(pending, corrected):
                        old = events[i]
                        err = math.hypot(cpos.x - old.true_x, cpos.y - old.true_y)
                        events[i] = old._replace(reported_x=cpos.x, reported_y=cpos.y, error=err)
            samples.append(sample)
            pending = []
            localized = 1
        if predicts:
            reported = madrd_predict(state, t)
            rx, ry = reported.x, reported.y
        else:
            m = state.last_sample.measured
            rx, ry = m.x, m.y
        error = math.hypot(rx - tx, ry - ty)
        conf = state.confidence.name if tracks_confidence else ""
        events.append(EventRecord(t, tx, ty, rx, ry, error, localized, state.current_period, conf))
        if not localized:
            pending.append(len(events) - 1)

    errors = np.array([e.error for e in events])
    metrics = RunMetrics(
        error_series=[(e.t, e.error) for e in events],
        localization_count=len(samples),
        accuracy=threshold_accuracy(errors, cfg.dist_tolerance),
        mean_error=float(errors.mean()),
        max_error=float(errors.max()),
        correction_count=correction_count,
    )
    return RunResult(metrics=metrics, events=events, samples=samples)


# ---------------------------------------------------------------------------
# Paired runs: same ground truth, same noise seed, one run per protocol.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PairedResult:
    """Per-protocol results over a shared set of traces, plus SFR-normalized ratios."""

    metrics: dict[str, RunMetrics]
    results: dict[str, list[RunResult]]
    ratio_to_sfr: dict[str, float]
    trace_hashes: list[str]


def _pooled_metrics(results: Sequence[RunResult], dist_tolerance: float) -> RunMetrics:
    errors = np.concatenate([[e for _, e in r.metrics.error_series] for r in results])
    return RunMetrics(
        error_series=[pair for r in results for pair in r.metrics.error_series],
        localization_count=sum(r.metrics.localization_count for r in results),
        accuracy=threshold_accuracy(errors, dist_tolerance),
        mean_error=float(errors.mean()),
        max_error=float(errors.max()),
        correction_count=sum(r.metrics.correction_count for r in results),
    )


def run_paired(
    traces: Sequence[MobilityTrace],
    protocol_set: Sequence[tuple[str, str, SfrConfig | DvmConfig | MadrdConfig]],
    noise: NoiseModel = NoiseModel(),
    dist_tolerance: float = 5.0,
    seed: int = 0,
    backtracking_enabled: bool = False,
) -> PairedResult:
    """Run every protocol in the set over the *same* traces and noise seeds.

    ``protocol_set`` entries are ``(label, kind, config)``.  Each trace/label
    pair runs with a noise seed derived only from ``seed`` and the trace
    index, so every protocol sees an identical ground truth and an identically
    seeded noise stream (protocols that localize more often simply consume
    more of it).  Localization-count ratios are normalized to the first
    protocol of kind ``"sfr"``; an SFR baseline compared against itself is
    exactly 1.0.
    """
    if not traces:
        raise ValueError("run_paired needs at least one trace")
    if not protocol_set:
        raise ValueError("run_paired needs at least one protocol")
    labels = [label for label, _, _ in protocol_set]
    if len(set(labels)) != len(labels):
        raise ValueError(f"protocol labels must be unique, got {labels}")

    trace_seeds = [
        int(np.random.SeedSequence([seed, i]).generate_state(1, np.uint64)[0])
        for i in range(len(traces))
    ]
    results: dict[str, list[RunResult]] = {}
    for label, kind, pconfig in protocol_set:
        runs: list[RunResult] = []
        for trace, tseed in zip(traces, trace_seeds):
            runs.append(
                run(
                    RunConfig(
                        trace=trace,
                        protocol=kind,
                        protocol_config=pconfig,
                        noise=noise,
                        dist_tolerance=dist_tolerance,
                        seed=tseed,
                        backtracking_enabled=backtracking_enabled,
                    )
                )
            )
        results[label] = runs

    metrics = {label: _pooled_metrics(runs, dist_tolerance) for label, runs in results.items()}
    ratio_to_sfr: dict[str, float] = {}
    baseline = next((label for label, kind, _ in protocol_set if kind == "sfr"), None)
    if baseline is not None:
        base_count = metrics[baseline].localization_count
        for label in labels:
            ratio_to_sfr[label] = metrics[label].localization_count / base_count
    return PairedResult(
        metrics=metrics,
        results=results,
        ratio_to_sfr=ratio_to_sfr,
        trace_hashes=[t.content_hash() for t in traces],
    )
