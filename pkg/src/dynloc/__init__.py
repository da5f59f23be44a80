"""dynloc: deterministic simulator for dynamic localization scheduling.

Mobile nodes must periodically spend energy to re-localize; the question is
when.  This package implements three scheduling protocols (fixed-rate SFR,
velocity-driven DVM, prediction-driven MADRD), mobility models to drive them,
closed-form error oracles for single-maneuver scenarios, a discrete-time
simulation engine, and a sweep/CLI layer that reproduces full experiment
grids bit-exactly from a seed.
"""

from .engine import EventRecord, PairedResult, RunConfig, RunMetrics, RunResult, run, run_paired
from .geometry import (
    LocalizationSample,
    NoiseModel,
    Position,
    absolute_error,
    distance,
    localize,
    threshold_accuracy,
)
from .mobility import (
    GaussMarkovConfig,
    MobilityTrace,
    RandomWaypointConfig,
    WaypointParseError,
    export_trace,
    generate_gauss_markov,
    generate_random_waypoint,
    import_trace,
    import_traces,
    trace_from_waypoints,
)
from .oracles import (
    PauseScenario,
    TurnScenario,
    better_turn_protocol,
    madrd_pause_error,
    madrd_turn_error,
    sfr_pause_error,
    sfr_turn_error,
)
from .protocols import (
    Confidence,
    DvmConfig,
    MadrdConfig,
    SchedulerState,
    SfrConfig,
    backtrack_correct,
    dvm_init,
    dvm_on_localize,
    held_position,
    madrd_init,
    madrd_on_localize,
    madrd_predict,
    sfr_init,
    sfr_on_localize,
)

__version__ = "0.1.0"
