"""Ground-truth mobility: trace container, generators, and a waypoint text format.

A :class:`MobilityTrace` is the true path of a single node sampled on a
uniform time grid.  Traces come from three places:

* :func:`generate_random_waypoint` -- classic random-waypoint motion: pick a
  uniform destination in the area, walk to it at a per-leg uniform speed,
  pause, repeat.
* :func:`generate_gauss_markov` -- first-order autoregressive speed and
  heading with boundary reflection; tunable memory trades smooth motion
  against memoryless jitter.
* :func:`import_trace` -- a plain-text waypoint format, one node per line of
  whitespace-separated ``t x y`` triples, piecewise-linearly resampled onto
  the dt grid.  :func:`export_trace` writes the same format back out.

Generation is deterministic: the same config and generator state always
produce the same trace, bit for bit.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

__all__ = [
    "MobilityTrace",
    "RandomWaypointConfig",
    "GaussMarkovConfig",
    "WaypointParseError",
    "generate_random_waypoint",
    "generate_gauss_markov",
    "trace_from_waypoints",
    "import_trace",
    "import_traces",
    "export_trace",
]

_TIME_EPS = 1e-9


class WaypointParseError(ValueError):
    """Malformed waypoint text; carries the 1-based source line number."""

    def __init__(self, line_no: int, message: str) -> None:
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


@dataclass(frozen=True)
class MobilityTrace:
    """True path of one node on a uniform dt grid, immutable once built."""

    node_id: int
    times: np.ndarray
    xs: np.ndarray
    ys: np.ndarray
    dt: float
    area_w: float
    area_h: float

    def __post_init__(self) -> None:
        times = np.asarray(self.times, dtype=float)
        xs = np.asarray(self.xs, dtype=float)
        ys = np.asarray(self.ys, dtype=float)
        if times.ndim != 1 or times.size == 0:
            raise ValueError("trace needs at least one sample")
        if xs.shape != times.shape or ys.shape != times.shape:
            raise ValueError("times, xs, ys must have identical length")
        if not (math.isfinite(self.dt) and self.dt > 0):
            raise ValueError(f"dt must be > 0, got {self.dt}")
        if self.area_w <= 0 or self.area_h <= 0:
            raise ValueError("area dimensions must be positive")
        if not np.all(np.isfinite(times)) or not np.all(np.isfinite(xs)) or not np.all(np.isfinite(ys)):
            raise ValueError("trace samples must be finite")
        gaps = np.diff(times)
        if np.any(gaps <= 0):
            raise ValueError("trace times must be strictly increasing")
        if times.size > 1 and not np.allclose(gaps, self.dt, rtol=0.0, atol=1e-6 * self.dt):
            raise ValueError("trace times must be uniformly spaced by dt")
        if (
            np.any(xs < -_TIME_EPS)
            or np.any(xs > self.area_w + _TIME_EPS)
            or np.any(ys < -_TIME_EPS)
            or np.any(ys > self.area_h + _TIME_EPS)
        ):
            raise ValueError("trace positions must lie within the area bounds")
        for arr, name in ((times, "times"), (xs, "xs"), (ys, "ys")):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    def __len__(self) -> int:
        return int(self.times.size)

    @property
    def end_time(self) -> float:
        return float(self.times[-1])

    def position_at(self, t: float) -> tuple[float, float]:
        """Linearly interpolated position at time ``t`` within the trace span."""
        if not math.isfinite(t) or t < self.times[0] - _TIME_EPS or t > self.end_time + _TIME_EPS:
            raise ValueError(f"t={t} outside trace span [{self.times[0]}, {self.end_time}]")
        x = float(np.interp(t, self.times, self.xs))
        y = float(np.interp(t, self.times, self.ys))
        return x, y

    def content_hash(self) -> str:
        """SHA-256 over the exact sample bytes; identical traces hash identically."""
        h = hashlib.sha256()
        h.update(f"{self.node_id}:{self.dt!r}:{self.area_w!r}:{self.area_h!r}:".encode())
        h.update(self.times.tobytes())
        h.update(self.xs.tobytes())
        h.update(self.ys.tobytes())
        return h.hexdigest()


@dataclass(frozen=True)
class RandomWaypointConfig:
    area_w: float = 300.0
    area_h: float = 300.0
    v_min: float = 4.0
    v_max: float = 5.0
    pause_time: float = 0.0
    duration: float = 900.0
    dt: float = 0.1
    node_id: int = 0

    def __post_init__(self) -> None:
        if self.area_w <= 0 or self.area_h <= 0:
            raise ValueError("area dimensions must be positive")
        if not (0 < self.v_min <= self.v_max):
            raise ValueError(f"need 0 < v_min <= v_max, got [{self.v_min}, {self.v_max}]")
        if self.pause_time < 0:
            raise ValueError(f"pause_time must be >= 0, got {self.pause_time}")
        if self.duration <= 0 or self.dt <= 0:
            raise ValueError("duration and dt must be positive")


@dataclass(frozen=True)
class GaussMarkovConfig:
    """AR(1) speed/heading walk. memory=1 freezes the velocity, memory=0 is memoryless."""

    area_w: float = 300.0
    area_h: float = 300.0
    mean_speed: float = 4.5
    memory: float = 0.75
    speed_sigma: float = 0.5
    direction_sigma: float = 0.4
    duration: float = 900.0
    dt: float = 0.1
    node_id: int = 0

    def __post_init__(self) -> None:
        if self.area_w <= 0 or self.area_h <= 0:
            raise ValueError("area dimensions must be positive")
        if self.mean_speed < 0:
            raise ValueError(f"mean_speed must be >= 0, got {self.mean_speed}")
        if not (0.0 <= self.memory <= 1.0):
            raise ValueError(f"memory must lie in [0, 1], got {self.memory}")
        if self.speed_sigma < 0 or self.direction_sigma < 0:
            raise ValueError("sigma parameters must be >= 0")
        if self.duration <= 0 or self.dt <= 0:
            raise ValueError("duration and dt must be positive")


def _grid(duration: float, dt: float) -> np.ndarray:
    n = int(math.ceil(duration / dt - _TIME_EPS)) + 1
    return np.arange(n, dtype=float) * dt


def generate_random_waypoint(cfg: RandomWaypointConfig, rng: np.random.Generator) -> MobilityTrace:
    """Generate a random-waypoint trace sampled every ``cfg.dt`` seconds.

    The continuous path is a chain of constant-speed legs toward uniformly
    chosen destinations, each followed by a fixed pause, built until the whole
    run duration is covered and then resampled onto the dt grid.
    """
    times = _grid(cfg.duration, cfg.dt)
    x = rng.uniform(0.0, cfg.area_w)
    y = rng.uniform(0.0, cfg.area_h)
    knot_t = [0.0]
    knot_x = [x]
    knot_y = [y]
    t = 0.0
    while t < cfg.duration:
        dest_x = rng.uniform(0.0, cfg.area_w)
        dest_y = rng.uniform(0.0, cfg.area_h)
        leg = math.hypot(dest_x - x, dest_y - y)
        speed = rng.uniform(cfg.v_min, cfg.v_max)
        if leg > 0.0:
            t += leg / speed
            knot_t.append(t)
            knot_x.append(dest_x)
            knot_y.append(dest_y)
            x, y = dest_x, dest_y
        if cfg.pause_time > 0.0:
            t += cfg.pause_time
            knot_t.append(t)
            knot_x.append(x)
            knot_y.append(y)
    xs = np.interp(times, knot_t, knot_x)
    ys = np.interp(times, knot_t, knot_y)
    return MobilityTrace(cfg.node_id, times, xs, ys, cfg.dt, cfg.area_w, cfg.area_h)


def generate_gauss_markov(cfg: GaussMarkovConfig, rng: np.random.Generator) -> MobilityTrace:
    """Generate a Gauss-Markov trace: AR(1) speed and heading, reflecting walls.

    Per step, with memory ``m``::

        v' = m*v + (1-m)*mean_speed     + sqrt(1-m^2) * speed_sigma     * N(0,1)
        h' = m*h + (1-m)*mean_heading   + sqrt(1-m^2) * direction_sigma * N(0,1)

    Speed is floored at zero.  Hitting a wall reflects the position and flips
    both the heading and the mean heading, so the walk stays in the area.
    """
    times = _grid(cfg.duration, cfg.dt)
    n = times.size
    xs = np.empty(n)
    ys = np.empty(n)
    x = rng.uniform(0.0, cfg.area_w)
    y = rng.uniform(0.0, cfg.area_h)
    xs[0] = x
    ys[0] = y
    speed = cfg.mean_speed
    heading = rng.uniform(0.0, 2.0 * math.pi)
    mean_heading = heading
    m = cfg.memory
    drift = math.sqrt(max(0.0, 1.0 - m * m))
    for k in range(1, n):
        speed = m * speed + (1.0 - m) * cfg.mean_speed + drift * cfg.speed_sigma * rng.standard_normal()
        heading = m * heading + (1.0 - m) * mean_heading + drift * cfg.direction_sigma * rng.standard_normal()
        speed = max(0.0, speed)
        x += speed * cfg.dt * math.cos(heading)
        y += speed * cfg.dt * math.sin(heading)
        while not (0.0 <= x <= cfg.area_w and 0.0 <= y <= cfg.area_h):
            if x < 0.0 or x > cfg.area_w:
                x = -x if x < 0.0 else 2.0 * cfg.area_w - x
                heading = math.pi - heading
                mean_heading = math.pi - mean_heading
            if y < 0.0 or y > cfg.area_h:
                y = -y if y < 0.0 else 2.0 * cfg.area_h - y
                heading = -heading
                mean_heading = -mean_heading
        xs[k] = x
        ys[k] = y
    return MobilityTrace(cfg.node_id, times, xs, ys, cfg.dt, cfg.area_w, cfg.area_h)


# ---------------------------------------------------------------------------
# Waypoint text format: one node per line, repeating "t x y" triples.
# ---------------------------------------------------------------------------


def _parse_waypoint_line(line_no: int, line: str) -> list[tuple[float, float, float]]:
    fields = line.split()
    if len(fields) % 3 != 0:
        raise WaypointParseError(line_no, f"expected 't x y' triples, got {len(fields)} fields")
    triples: list[tuple[float, float, float]] = []
    for i in range(0, len(fields), 3):
        try:
            t, x, y = (float(fields[i]), float(fields[i + 1]), float(fields[i + 2]))
        except ValueError as exc:
            raise WaypointParseError(line_no, f"non-numeric field near {fields[i]!r}") from exc
        if not (math.isfinite(t) and math.isfinite(x) and math.isfinite(y)):
            raise WaypointParseError(line_no, "waypoint fields must be finite")
        triples.append((t, x, y))
    return triples


def trace_from_waypoints(
    waypoints: Sequence[tuple[float, float, float]],
    dt: float,
    area_w: float,
    area_h: float,
    node_id: int = 0,
    duration: float | None = None,
) -> MobilityTrace:
    """Resample ``(t, x, y)`` waypoints piecewise-linearly onto the dt grid.

    The trace starts at t=0 (holding the first waypoint position if its time
    is later) and runs to the last waypoint time, or to ``duration`` with the
    final position held.  Times must be strictly increasing and positions must
    stay within the area.
    """
    if not waypoints:
        raise ValueError("need at least one waypoint")
    wt = np.asarray([w[0] for w in waypoints], dtype=float)
    wx = np.asarray([w[1] for w in waypoints], dtype=float)
    wy = np.asarray([w[2] for w in waypoints], dtype=float)
    if np.any(np.diff(wt) <= 0):
        raise ValueError("waypoint times must be strictly increasing")
    if wt[0] < 0:
        raise ValueError("waypoint times must be >= 0")
    if np.any(wx < 0) or np.any(wx > area_w) or np.any(wy < 0) or np.any(wy > area_h):
        raise ValueError(f"waypoints must lie within the {area_w}x{area_h} area")
    end = float(wt[-1]) if duration is None else float(duration)
    times = _grid(end, dt) if end > 0 else np.array([0.0])
    xs = np.interp(times, wt, wx)
    ys = np.interp(times, wt, wy)
    return MobilityTrace(node_id, times, xs, ys, dt, area_w, area_h)


def import_trace(
    text: str,
    dt: float,
    area_w: float,
    area_h: float,
    node_id: int = 0,
    duration: float | None = None,
) -> MobilityTrace:
    """Parse waypoint text and return the trace for line ``node_id`` (0-based)."""
    traces = import_traces(text, dt, area_w, area_h, duration=duration)
    if node_id < 0 or node_id >= len(traces):
        raise ValueError(f"node_id {node_id} out of range: source has {len(traces)} node line(s)")
    return traces[node_id]


def import_traces(
    text: str,
    dt: float,
    area_w: float,
    area_h: float,
    duration: float | None = None,
) -> list[MobilityTrace]:
    """Parse waypoint text, one node per non-empty line, resampled at ``dt``."""
    traces: list[MobilityTrace] = []
    node_id = 0
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        triples = _parse_waypoint_line(line_no, line)
        try:
            traces.append(
                trace_from_waypoints(triples, dt, area_w, area_h, node_id=node_id, duration=duration)
            )
        except ValueError as exc:
            raise ValueError(f"line {line_no}: {exc}") from exc
        node_id += 1
    if not traces:
        raise ValueError("no waypoint lines found in source")
    return traces


def export_trace(trace: MobilityTrace) -> str:
    """Serialize a trace as one waypoint line; floats keep full precision.

    Every sample is written as a waypoint, so re-importing at the same dt
    reproduces the trace exactly.
    """
    parts: list[str] = []
    for t, x, y in zip(trace.times, trace.xs, trace.ys):
        parts.append(f"{float(t)!r} {float(x)!r} {float(y)!r}")
    return " ".join(parts) + "\n"
