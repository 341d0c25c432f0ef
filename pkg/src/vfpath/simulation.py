"""Closed-loop trial simulation, metrics, and the Monte Carlo benchmark harness.

A trial steps path frame -> guidance command -> vehicle integration on a
uniform grid, records every channel, and scores the run with reaching time,
RMS cross-track error, RMS/max turn rate and a chattering index.  The Monte
Carlo harness runs seeded batches of trials for each guidance law over
randomized initial conditions and wind, and reduces the per-trial metrics to
box-plot statistics.  Everything is deterministic given (config, seed).
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from .angles import wrap_angle, wrap_angle_array
from .baselines import (
    BaselineParams,
    LookaheadInfeasibleError,
    basic_vf_command,
    nlgl_command,
    plos_command,
)
from .guidance import GuidanceParams, commanded_course
from .paths import ReferencePath, SinusoidPath, tracking_window
from .vehicle import AirspeedSpec, VehicleState, WindModel, ground_speed, step_vehicle

GUIDANCE_LAWS = ("switched", "basic_vf", "plos", "nlgl")

# Benchmark scenario constants: a 300 m amplitude sinusoid whose spatial
# period makes the peak path course rate 0.1 rad/s at 15 m/s (the peak
# curvature of y = A sin(2 pi x / L) is A (2 pi / L)^2).
SCENARIO_AMPLITUDE = 300.0
SCENARIO_SPEED = 15.0
SCENARIO_PATH_RATE = 0.1
SCENARIO_PERIOD = 2.0 * math.pi * math.sqrt(
    SCENARIO_SPEED * SCENARIO_AMPLITUDE / SCENARIO_PATH_RATE
)

# Randomized-trial distributions: offset magnitude (m), wind speed (m/s) and
# wind direction (rad) ranges.
MC_D0_RANGE = (100.0, 200.0)
MC_WIND_SPEED_RANGE = (2.0, 3.0)
MC_WIND_DIR_RANGE = (-2.5, -2.0)


@dataclass(frozen=True)
class ScenarioConfig:
    """Everything needed to run one closed-loop trial."""

    path: ReferencePath
    law: str = "switched"
    guidance: GuidanceParams = field(default_factory=GuidanceParams)
    baselines: BaselineParams = field(default_factory=BaselineParams)
    airspeed: AirspeedSpec = field(default_factory=lambda: AirspeedSpec(SCENARIO_SPEED))
    wind: Optional[WindModel] = field(default_factory=WindModel)  # None = sampled
    d0: float = 200.0
    s0: float = 0.0
    chi0: float = 1.8
    x_init: Optional[float] = None
    y_init: Optional[float] = None
    dt: float = 0.01
    max_time: float = 300.0
    integrator: str = "rk4"
    d_threshold: float = 15.0
    align_threshold: float = 0.2
    dwell: float = 5.0
    stop_when_converged: bool = True
    nlgl_d0: float = 80.0
    kappa_max: float = 0.7 / 15.0

    def __post_init__(self):
        if self.law not in GUIDANCE_LAWS:
            raise ValueError(f"unknown guidance law {self.law!r}")
        if self.dt <= 0.0 or self.max_time <= 0.0:
            raise ValueError("dt and max_time must be positive")
        if self.d_threshold <= 0.0 or self.align_threshold <= 0.0:
            raise ValueError("convergence thresholds must be positive")
        if self.dwell < 0.0:
            raise ValueError("dwell must be non-negative")
        if self.integrator not in ("rk4", "euler"):
            raise ValueError(f"unknown integrator {self.integrator!r}")


def benchmark_scenario(law: str = "switched", **overrides) -> ScenarioConfig:
    """Benchmark sinusoid scenario with all default parameters.

    Vehicle starts 200 m off the path at its start with course 1.8 rad, which
    puts the switched law in its far-offset adverse-course phase (CASE1).
    No wind.
    """
    path = overrides.pop(
        "path", SinusoidPath(SCENARIO_AMPLITUDE, SCENARIO_PERIOD)
    )
    return ScenarioConfig(path=path, law=law, **overrides)


@dataclass(frozen=True)
class Trajectory:
    """Uniformly sampled closed-loop history of one trial."""

    t: np.ndarray
    x: np.ndarray
    y: np.ndarray
    chi: np.ndarray
    chi_c: np.ndarray
    chi_d: np.ndarray
    chi_dot: np.ndarray
    d: np.ndarray
    phase: np.ndarray
    chi_p: np.ndarray

    def __len__(self) -> int:
        return len(self.t)


@dataclass(frozen=True)
class TrialMetrics:
    converged: bool
    t_conv: float  # nan when not converged
    d_rms: float
    chi_dot_rms: float
    chi_dot_max: float
    chattering_index: float
    failure_reason: Optional[str] = None


def initial_state(config: ScenarioConfig) -> VehicleState:
    """Vehicle start pose: explicit (x, y) or a perpendicular offset d0 at s0."""
    if config.x_init is not None and config.y_init is not None:
        return VehicleState(config.x_init, config.y_init, wrap_angle(config.chi0))
    px, py = config.path.point(config.s0)
    chi_p = config.path.tangent_angle(config.s0)
    nx, ny = -math.sin(chi_p), math.cos(chi_p)
    return VehicleState(
        px + config.d0 * nx, py + config.d0 * ny, wrap_angle(config.chi0)
    )


def sample_wind(rng: np.random.Generator) -> WindModel:
    """Draw a wind vector from the benchmark distribution."""
    speed = rng.uniform(*MC_WIND_SPEED_RANGE)
    direction = rng.uniform(*MC_WIND_DIR_RANGE)
    return WindModel(speed * math.cos(direction), speed * math.sin(direction))


def run_trial(config: ScenarioConfig, seed: int = 0) -> tuple[Trajectory, TrialMetrics]:
    """Simulate one closed-loop trial and score it.

    The loop evaluates the path frame and the guidance command, records all
    channels, then integrates the vehicle one step.  When
    ``stop_when_converged`` is set the trial ends as soon as the convergence
    condition has held for a full dwell window (the recorded trajectory always
    contains that window); otherwise it runs to ``max_time``.  A trial whose
    guidance law reports infeasible geometry stops immediately and is marked
    non-converged with the reason.
    """
    wind = config.wind
    if wind is None:
        wind = sample_wind(np.random.default_rng(np.random.SeedSequence(seed)))

    path = config.path
    gp = config.guidance
    bp = config.baselines
    spec = config.airspeed
    law = config.law
    alpha = gp.alpha
    dt = config.dt
    d_thr = config.d_threshold
    align_thr = config.align_threshold
    need = int(round(config.dwell / dt))
    n_max = int(round(config.max_time / dt))
    stop_early = config.stop_when_converged
    method = config.integrator

    state = initial_state(config)
    prev_s: Optional[float] = None
    prev_chi_p = 0.0
    prev_phase = None
    streak = 0
    conv_idx = -1
    failure: Optional[str] = None
    max_travel = (spec.v_a + wind.speed) * dt

    rec_t: list[float] = []
    rec_x: list[float] = []
    rec_y: list[float] = []
    rec_chi: list[float] = []
    rec_chi_c: list[float] = []
    rec_chi_d: list[float] = []
    rec_chi_dot: list[float] = []
    rec_d: list[float] = []
    rec_phase: list[int] = []
    rec_chi_p: list[float] = []

    for k in range(n_max + 1):
        p = (state.x, state.y)
        if prev_s is None:
            s_star = path.closest_parameter(p)
            frame = path.frame_at(s_star, p)
            chi_p_dot = 0.0
        else:
            window = tracking_window(prev_d, max_travel)
            s_star = path.closest_parameter(p, near=prev_s, window=window)
            chi_p = path.tangent_angle(s_star)
            chi_p_dot = wrap_angle(chi_p - prev_chi_p) / dt
            frame = path.frame_at(s_star, p, chi_p_dot)
        prev_s, prev_chi_p, prev_d = s_star, frame.chi_p, frame.d
        v_g = ground_speed(spec, wind, state.chi)

        phase_val = 0
        if law == "switched":
            out = commanded_course(state, frame, gp, prev_phase, v_g)
            chi_c, chi_d = out.chi_c, out.chi_d
            prev_phase = out.phase
            phase_val = int(out.phase)
        elif law == "basic_vf":
            chi_c = basic_vf_command(state, frame, bp, v_g)
            chi_d = chi_c
        elif law == "plos":
            chi_c = plos_command(state, frame, bp)
            chi_d = chi_c
        else:  # nlgl
            try:
                chi_c = nlgl_command(state, path, bp, v_g, alpha, frame=frame)
            except LookaheadInfeasibleError as exc:
                failure = f"look-ahead infeasible: {exc}"
                chi_c = state.chi
            chi_d = chi_c

        chi_dot = alpha * wrap_angle(chi_c - state.chi)
        rec_t.append(k * dt)
        rec_x.append(state.x)
        rec_y.append(state.y)
        rec_chi.append(state.chi)
        rec_chi_c.append(chi_c)
        rec_chi_d.append(chi_d)
        rec_chi_dot.append(chi_dot)
        rec_d.append(frame.d)
        rec_phase.append(phase_val)
        rec_chi_p.append(frame.chi_p)

        if failure is not None:
            break

        if abs(frame.d) <= d_thr and abs(wrap_angle(state.chi - frame.chi_p)) <= align_thr:
            streak += 1
        else:
            streak = 0
        if conv_idx < 0 and streak >= need + 1:
            conv_idx = k - need
        if stop_early and conv_idx >= 0:
            break
        if k == n_max:
            break

        state = step_vehicle(state, chi_c, spec, wind, alpha, dt, method)

    traj = Trajectory(
        t=np.asarray(rec_t),
        x=np.asarray(rec_x),
        y=np.asarray(rec_y),
        chi=np.asarray(rec_chi),
        chi_c=np.asarray(rec_chi_c),
        chi_d=np.asarray(rec_chi_d),
        chi_dot=np.asarray(rec_chi_dot),
        d=np.asarray(rec_d),
        phase=np.asarray(rec_phase, dtype=np.int8),
        chi_p=np.asarray(rec_chi_p),
    )
    metrics = compute_metrics(traj, config, failure_reason=failure)
    return traj, metrics


def compute_metrics(
    traj: Trajectory,
    config: ScenarioConfig,
    failure_reason: Optional[str] = None,
    chatter_window: float = 1.0,
) -> TrialMetrics:
    """Score a trajectory.

    The reaching time is the start of the first window of length ``dwell``
    during which both |d| <= d_threshold and |wrap(chi - chi_p)| <=
    align_threshold hold at every sample; a trajectory that never sustains
    the condition for a full window is non-converged (t_conv = nan).  RMS and
    max statistics run over the full recorded trajectory.
    """
    if len(traj) == 0:
        raise ValueError("empty trajectory")
    dt = config.dt
    need = int(round(config.dwell / dt))
    ok = (np.abs(traj.d) <= config.d_threshold) & (
        np.abs(wrap_angle_array(traj.chi - traj.chi_p)) <= config.align_threshold
    )
    t_conv = math.nan
    converged = False
    n = len(ok)
    if n > need and failure_reason is None:
        window = np.cumsum(ok)
        window_sum = window[need:].astype(np.int64)
        window_sum[1:] -= window[: n - need - 1]
        hits = np.nonzero(window_sum == need + 1)[0]
        if hits.size:
            converged = True
            t_conv = float(traj.t[hits[0]])
    d_rms = float(np.sqrt(np.mean(traj.d**2)))
    chi_dot_rms = float(np.sqrt(np.mean(traj.chi_dot**2)))
    chi_dot_max = float(np.max(np.abs(traj.chi_dot)))
    chatter = (
        chattering_index(traj, chatter_window) if len(traj) > 2 else 0.0
    )
    return TrialMetrics(
        converged=converged,
        t_conv=t_conv,
        d_rms=d_rms,
        chi_dot_rms=chi_dot_rms,
        chi_dot_max=chi_dot_max,
        chattering_index=chatter,
        failure_reason=failure_reason,
    )


def chattering_index(traj: Trajectory, window: float = 1.0) -> float:
    """Worst-case turn-rate sign-change rate (changes per second).

    Counts strict sign changes of chi_dot inside windows of the given length
    centered on each phase transition and returns the maximum count divided
    by the window length.  A trajectory with no phase transitions (baseline
    laws, or no switching) is scanned with a sliding window over its whole
    length instead.
    """
    n = len(traj)
    if n < 2:
        return 0.0
    dt = float(traj.t[1] - traj.t[0])
    if window <= dt:
        raise ValueError("window must exceed the sample interval")
    changes = (traj.chi_dot[:-1] * traj.chi_dot[1:] < 0.0).astype(np.int64)
    half = int(round(0.5 * window / dt))
    transitions = np.nonzero(np.diff(traj.phase) != 0)[0] + 1
    if transitions.size:
        best = 0
        for idx in transitions:
            lo = max(int(idx) - half, 0)
            hi = min(int(idx) + half, n - 1)
            best = max(best, int(np.sum(changes[lo:hi])))
        return best / window
    span = min(2 * half, n - 1)
    csum = np.concatenate(([0], np.cumsum(changes)))
    window_counts = csum[span:] - csum[: len(csum) - span]
    return float(np.max(window_counts)) / window


@dataclass(frozen=True)
class BoxStats:
    """Box-plot summary of one metric over a batch of trials."""

    count: int
    minimum: float
    q1: float
    median: float
    q3: float
    maximum: float
    mean: float

    @classmethod
    def from_values(cls, values: Sequence[float]) -> "BoxStats":
        arr = np.asarray(values, dtype=float)
        if arr.size == 0:
            nan = math.nan
            return cls(0, nan, nan, nan, nan, nan, nan)
        q1, med, q3 = np.percentile(arr, [25.0, 50.0, 75.0])
        return cls(
            count=int(arr.size),
            minimum=float(arr.min()),
            q1=float(q1),
            median=float(med),
            q3=float(q3),
            maximum=float(arr.max()),
            mean=float(arr.mean()),
        )


@dataclass(frozen=True)
class MonteCarloSummary:
    laws: tuple[str, ...]
    n_trials: int
    master_seed: int
    trials: dict[str, list[TrialMetrics]]
    stats: dict[tuple[str, str], BoxStats]
    n_converged: dict[str, int]


def _mc_draw(seed_seq: np.random.SeedSequence) -> tuple[float, float, WindModel]:
    """Initial offset, course and wind for one randomized trial."""
    rng = np.random.default_rng(seed_seq)
    d0 = rng.uniform(*MC_D0_RANGE)
    chi0 = rng.uniform(-math.pi, math.pi)
    wind = sample_wind(rng)
    return d0, chi0, wind


_MC_BASE: Optional[ScenarioConfig] = None


def _mc_init(base_config: ScenarioConfig) -> None:
    global _MC_BASE
    _MC_BASE = base_config


def _mc_job(args: tuple[str, int, float, float, float, float]) -> tuple[str, int, TrialMetrics]:
    law, index, d0, chi0, w_x, w_y = args
    config = replace(_MC_BASE, law=law, d0=d0, chi0=chi0, wind=WindModel(w_x, w_y))
    _, metrics = run_trial(config, seed=index)
    return law, index, metrics


def monte_carlo(
    base_config: ScenarioConfig,
    n_trials: int,
    master_seed: int,
    laws: Sequence[str] = GUIDANCE_LAWS,
    parallel: bool = True,
    max_workers: Optional[int] = None,
) -> MonteCarloSummary:
    """Randomized benchmark of the guidance laws on a common trial set.

    Per-trial seeds are spawned deterministically from the master seed; trial
    ``i`` draws its initial offset, initial course and wind once and every law
    is run on that same draw, so the laws are compared on paired conditions.
    Results are collected by trial index, making the summary independent of
    worker scheduling.  Non-converged trials are excluded from the t_conv
    statistics and reported through ``n_converged``.
    """
    if n_trials < 1:
        raise ValueError("n_trials must be at least 1")
    for law in laws:
        if law not in GUIDANCE_LAWS:
            raise ValueError(f"unknown guidance law {law!r}")

    children = np.random.SeedSequence(master_seed).spawn(n_trials)
    draws = [_mc_draw(child) for child in children]
    jobs = [
        (law, i, d0, chi0, wind.w_x, wind.w_y)
        for law in laws
        for i, (d0, chi0, wind) in enumerate(draws)
    ]

    results: dict[str, list[Optional[TrialMetrics]]] = {
        law: [None] * n_trials for law in laws
    }
    workers = max_workers or os.cpu_count() or 1
    if parallel and workers > 1 and n_trials * len(laws) > 1:
        with ProcessPoolExecutor(
            max_workers=workers, initializer=_mc_init, initargs=(base_config,)
        ) as pool:
            chunk = max(1, len(jobs) // (workers * 8))
            for law, index, metrics in pool.map(_mc_job, jobs, chunksize=chunk):
                results[law][index] = metrics
    else:
        _mc_init(base_config)
        for job in jobs:
            law, index, metrics = _mc_job(job)
            results[law][index] = metrics

    trials = {law: [m for m in results[law] if m is not None] for law in laws}
    stats: dict[tuple[str, str], BoxStats] = {}
    n_converged: dict[str, int] = {}
    for law in laws:
        batch = trials[law]
        n_converged[law] = sum(1 for m in batch if m.converged)
        stats[(law, "t_conv")] = BoxStats.from_values(
            [m.t_conv for m in batch if m.converged]
        )
        for name in ("d_rms", "chi_dot_rms", "chi_dot_max", "chattering_index"):
            stats[(law, name)] = BoxStats.from_values(
                [getattr(m, name) for m in batch]
            )
    return MonteCarloSummary(
        laws=tuple(laws),
        n_trials=n_trials,
        master_seed=master_seed,
        trials=trials,
        stats=stats,
        n_converged=n_converged,
    )
