"""
Undamped pendulum simulator and the SyMPLER identification experiments.

The learner sees the angle theta(t) as input and the finite-difference
acceleration estimate as target. Truth comes from classic RK4 integration
of theta'' = -(g/rod) sin(theta).
"""

import logging
import math
from collections.abc import Callable, Sequence
from dataclasses import replace
from multiprocessing import Pool
from typing import Any, Optional, TypeVar

import numpy as np

from .baselines import linearized_pendulum_accel
from .errors import EmptyModelError, InvalidConfigError
from .learner import SymplerLearner
from .types import (
    BaseReport,
    DriftReport,
    FloatArray,
    ForecastReport,
    HighDimReport,
    HighDimRow,
    LearnerConfig,
    NoiseReport,
    NoiseRow,
    PendulumConfig,
    PendulumRecord,
    Sample,
    Selection,
    TaylorGap,
    TaylorLine,
)

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")

# Upper limit on the period search, in small-amplitude periods
MAX_PERIOD_SEARCH = 50


def validate_config(cfg: PendulumConfig) -> None:
    """
    Raises:
        InvalidConfigError: If a physical constant or the sampling setup is invalid
    """
    if cfg.rod <= 0 or cfg.g <= 0:
        raise InvalidConfigError(f"rod and g must be > 0, got rod={cfg.rod}, g={cfg.g}")
    if cfg.dt <= 0 or cfg.cycles <= 0:
        raise InvalidConfigError(f"dt and cycles must be > 0, got dt={cfg.dt}, cycles={cfg.cycles}")
    if not (math.isfinite(cfg.theta0) and math.isfinite(cfg.omega0)):
        raise InvalidConfigError("Initial state must be finite")
    if cfg.dt * 10 >= small_angle_period(cfg):
        raise InvalidConfigError(
            f"dt={cfg.dt} is too coarse for a period of {small_angle_period(cfg):.4f} s"
        )


def small_angle_period(cfg: PendulumConfig) -> float:
    """2 pi sqrt(rod / g)"""
    return 2.0 * math.pi * math.sqrt(cfg.rod / cfg.g)


def _rk4_step(theta: float, omega: float, dt: float, k: float) -> tuple[float, float]:
    k1t, k1w = omega, -k * math.sin(theta)
    k2t, k2w = omega + 0.5 * dt * k1w, -k * math.sin(theta + 0.5 * dt * k1t)
    k3t, k3w = omega + 0.5 * dt * k2w, -k * math.sin(theta + 0.5 * dt * k2t)
    k4t, k4w = omega + dt * k3w, -k * math.sin(theta + dt * k3t)
    return (
        theta + dt / 6.0 * (k1t + 2 * k2t + 2 * k3t + k4t),
        omega + dt / 6.0 * (k1w + 2 * k2w + 2 * k3w + k4w),
    )


def integrate_rk4(
    theta0: float,
    omega0: float,
    dt: float,
    steps: int,
    g: float,
    rod: float,
) -> tuple[FloatArray, FloatArray]:
    """
    Classic fixed-step RK4 on (theta, omega).

    Returns:
        Arrays theta and omega of length steps + 1, starting at the initial state
    """
    k = g / rod
    theta = np.empty(steps + 1)
    omega = np.empty(steps + 1)
    theta[0], omega[0] = theta0, omega0
    th, om = theta0, omega0
    for i in range(1, steps + 1):
        th, om = _rk4_step(th, om, dt, k)
        theta[i], omega[i] = th, om
    return theta, omega


def _crossing_times(times: FloatArray, values: FloatArray, count: int) -> list[float]:
    """First `count` sign changes of values, linearly interpolated."""
    found: list[float] = []
    for i in range(1, len(values)):
        a, b = values[i - 1], values[i]
        if a != 0 and a * b <= 0:
            found.append(float(times[i - 1] + (times[i] - times[i - 1]) * a / (a - b)))
            if len(found) == count:
                break
    return found


def crossing_period(times: Sequence[float] | FloatArray, values: Sequence[float] | FloatArray) -> float:
    """Oscillation period 2 (t2 - t1) from the first two sign changes of a signal."""
    crossings = _crossing_times(np.asarray(times), np.asarray(values), 2)
    if len(crossings) < 2:
        raise InvalidConfigError("Signal does not oscillate within the window")
    return 2.0 * (crossings[1] - crossings[0])


def nonlinear_period(cfg: PendulumConfig) -> float:
    """
    Amplitude-dependent period, measured from consecutive zero crossings of omega.

    Raises:
        InvalidConfigError: If the pendulum does not swing (e.g. resting upright)
    """
    validate_config(cfg)
    k = cfg.g / cfg.rod
    max_steps = int(MAX_PERIOD_SEARCH * small_angle_period(cfg) / cfg.dt)

    crossings: list[float] = []
    th, om = cfg.theta0, cfg.omega0
    for i in range(1, max_steps + 1):
        th_next, om_next = _rk4_step(th, om, cfg.dt, k)
        if om != 0 and om * om_next <= 0:
            crossings.append((i - 1 + om / (om - om_next)) * cfg.dt)
            if len(crossings) == 2:
                return 2.0 * (crossings[1] - crossings[0])
        th, om = th_next, om_next

    raise InvalidConfigError(
        f"No oscillation found within {MAX_PERIOD_SEARCH} small-angle periods "
        f"(theta0={cfg.theta0}, omega0={cfg.omega0})"
    )


def records_from_trajectory(theta: FloatArray, omega: FloatArray, dt: float) -> list[PendulumRecord]:
    """
    Finite-difference estimates for states 1 .. len - 2.

    v_est is the backward difference; a_est is the central second difference,
    so record k needs theta(k + 1).
    """
    records: list[PendulumRecord] = []
    for k in range(1, len(theta) - 1):
        records.append(
            PendulumRecord(
                t=k * dt,
                theta=float(theta[k]),
                omega=float(omega[k]),
                v_est=float((theta[k] - theta[k - 1]) / dt),
                a_est=float((theta[k + 1] - 2.0 * theta[k] + theta[k - 1]) / dt**2),
            )
        )
    return records


def simulate(cfg: PendulumConfig) -> list[PendulumRecord]:
    """
    Sample the pendulum for cfg.cycles periods.

    Returns:
        ceil(cycles * T / dt) records, the first at t = dt
    """
    period = nonlinear_period(cfg)
    steps = math.ceil(cfg.cycles * period / cfg.dt)
    theta, omega = integrate_rk4(cfg.theta0, cfg.omega0, cfg.dt, steps + 1, cfg.g, cfg.rod)
    return records_from_trajectory(theta, omega, cfg.dt)


def taylor_line(theta0: float, cfg: PendulumConfig) -> TaylorLine:
    """First-order expansion of -(g/rod) sin(theta) around theta0."""
    k = cfg.g / cfg.rod
    return TaylorLine(
        theta0=theta0,
        slope=-k * math.cos(theta0),
        bias=-k * (math.sin(theta0) - theta0 * math.cos(theta0)),
    )


def energy(theta: float, omega: float, cfg: PendulumConfig) -> float:
    """Mechanical energy per unit mass: 0.5 (rod omega)^2 - g rod cos(theta)."""
    return 0.5 * (cfg.rod * omega) ** 2 - cfg.g * cfg.rod * math.cos(theta)


def pendulum_stream(records: Sequence[PendulumRecord]) -> list[Sample]:
    """theta(k) -> a_est(k) pairs in stream order."""
    return [
        Sample(x=np.array([r.theta]), y=r.a_est, index=i) for i, r in enumerate(records)
    ]


def _stream_learner(
    learner: SymplerLearner,
    inputs: FloatArray,
    targets: FloatArray,
) -> tuple[list[float], list[int]]:
    """Run step over rows; squared error is NaN where no prediction existed."""
    sq_err: list[float] = []
    counts: list[int] = []
    for x, y in zip(inputs, targets):
        outcome = learner.step(x, y)
        sq_err.append(math.nan if outcome.prediction is None else (y - outcome.prediction) ** 2)
        counts.append(learner.model_count)
    return sq_err, counts


def _frozen_mse(learner: SymplerLearner, inputs: FloatArray, targets: FloatArray) -> float:
    """
    Test MSE without learning; the naive value stands in when there is no prediction.

    Runs on a copy that observes each revealed target, so error-based
    selection follows the test stream.
    """
    replay = learner.frozen_copy()
    total = 0.0
    for x, y in zip(inputs, targets):
        prediction = replay.predict(x)
        if prediction is None:
            prediction = replay.prev_y if replay.prev_y is not None else 0.0
        total += (y - prediction) ** 2
        replay.observe(x, y)
    return total / len(targets)


def _map(fn: Callable[[T], R], tasks: list[T], jobs: int) -> list[R]:
    """Map in task order, over a process pool when jobs > 1."""
    if jobs <= 1:
        return [fn(t) for t in tasks]
    with Pool(processes=jobs) as pool:
        return pool.map(fn, tasks)


def _taylor_gaps(learner: SymplerLearner, cfg: PendulumConfig) -> list[TaylorGap]:
    gaps = []
    for i, model in enumerate(learner.models):
        p = float(model.point[0])
        line = taylor_line(p, cfg)
        gaps.append(
            TaylorGap(
                model_index=i,
                point=p,
                slope=float(model.weights[0]),
                bias=float(model.weights[1]),
                taylor_slope=line.slope,
                taylor_bias=line.bias,
            )
        )
    return gaps


# ============================================================================
# Experiments
# ============================================================================

def train_base(
    cfg: PendulumConfig,
    learner_cfg: Optional[LearnerConfig] = None,
) -> tuple[SymplerLearner, BaseReport]:
    """Stream cfg.cycles periods of (theta -> a_est) through a fresh learner."""
    learner_cfg = learner_cfg or LearnerConfig()
    period = nonlinear_period(cfg)
    records = simulate(cfg)

    learner = SymplerLearner(1, learner_cfg)
    inputs = np.array([[r.theta] for r in records])
    targets = np.array([r.a_est for r in records])
    sq_err, counts = _stream_learner(learner, inputs, targets)

    times = [r.t for r in records]
    half = period / 2.0
    half_cycle_counts = [0] * math.ceil(2 * cfg.cycles)
    for model in learner.models:
        slot = min(int(times[model.created_at] / half), len(half_cycle_counts) - 1)
        half_cycle_counts[slot] += 1

    report = BaseReport(
        model_count=learner.model_count,
        per_step_sq_err=sq_err,
        model_count_trace=counts,
        inputs=[r.theta for r in records],
        times=times,
        taylor_gaps=_taylor_gaps(learner, cfg),
        half_cycle_counts=half_cycle_counts,
        period=period,
    )
    logger.info(
        "base experiment done models=%d half_cycles=%s period=%.5f",
        report.model_count, half_cycle_counts, period,
    )
    return learner, report


def run_base_experiment(
    cfg: PendulumConfig,
    learner_cfg: Optional[LearnerConfig] = None,
) -> BaseReport:
    return train_base(cfg, learner_cfg)[1]


def forecast_long_term(
    accel_fn: Callable[[float], Optional[float]],
    cfg: PendulumConfig,
    duration_s: float,
) -> tuple[FloatArray, FloatArray]:
    """
    Closed-loop forecast from (theta0, omega0).

    Each step estimates the acceleration from the previous predicted angle,
    then updates velocity and finally angle (semi-implicit Euler).

    Args:
        accel_fn: Frozen model mapping an angle to an acceleration
        cfg: Initial state and step size
        duration_s: Forecast horizon in seconds

    Returns:
        Times and predicted angles, both of length round(duration_s / dt) + 1

    Raises:
        EmptyModelError: If the model returns no prediction
    """
    steps = int(round(duration_s / cfg.dt))
    times = np.arange(steps + 1) * cfg.dt
    theta = np.empty(steps + 1)
    th, v = cfg.theta0, cfg.omega0
    theta[0] = th
    for i in range(1, steps + 1):
        a = accel_fn(th)
        if a is None:
            raise EmptyModelError("Forecast model returned no prediction")
        v += a * cfg.dt
        th += v * cfg.dt
        theta[i] = th
    return times, theta


def learner_accel(learner: SymplerLearner) -> Callable[[float], Optional[float]]:
    return lambda theta: learner.predict(np.array([theta]))


def oracle_accel(cfg: PendulumConfig) -> Callable[[float], Optional[float]]:
    k = cfg.g / cfg.rod
    return lambda theta: -k * math.sin(theta)


def linear_accel(cfg: PendulumConfig) -> Callable[[float], Optional[float]]:
    return lambda theta: linearized_pendulum_accel(theta, cfg.g, cfg.rod)


def _rmse(a: FloatArray, b: FloatArray) -> float:
    return float(np.sqrt(np.mean((a - b) ** 2)))


def run_forecast_experiment(
    cfg: PendulumConfig,
    learner_cfg: Optional[LearnerConfig] = None,
    duration_s: float = 167.0,
    learner: Optional[SymplerLearner] = None,
) -> ForecastReport:
    """
    Compare the closed-loop forecast of a trained learner against the
    linearized model over a long horizon.

    The learner is trained with the base experiment unless one is given.
    """
    if learner is None:
        learner, _ = train_base(cfg, learner_cfg)
    period = nonlinear_period(cfg)

    times, theta_model = forecast_long_term(learner_accel(learner), cfg, duration_s)
    _, theta_linear = forecast_long_term(linear_accel(cfg), cfg, duration_s)
    theta_true, _ = integrate_rk4(cfg.theta0, cfg.omega0, cfg.dt, len(times) - 1, cfg.g, cfg.rod)

    window = min(len(times), int(round(2 * period / cfg.dt)))
    tail = slice(len(times) - window, len(times))
    report = ForecastReport(
        times=times.tolist(),
        theta_true=theta_true.tolist(),
        theta_model=theta_model.tolist(),
        theta_linear=theta_linear.tolist(),
        rmse_final_model=_rmse(theta_model[tail], theta_true[tail]),
        rmse_final_linear=_rmse(theta_linear[tail], theta_true[tail]),
        linear_period_ratio=period / crossing_period(times, theta_linear),
    )
    logger.info(
        "forecast done rmse_model=%.5f rmse_linear=%.5f period_ratio=%.4f",
        report.rmse_final_model, report.rmse_final_linear, report.linear_period_ratio,
    )
    return report


def run_concept_drift(
    cfg: PendulumConfig,
    learner_cfg: Optional[LearnerConfig] = None,
    rod_after: float = 1.0,
) -> DriftReport:
    """
    Two periods with cfg.rod, then an instantaneous switch to rod_after for
    two more periods. The state (theta, omega) carries over the switch.
    """
    learner_cfg = learner_cfg or LearnerConfig(selection=Selection.ERROR_BASED)
    if rod_after <= 0:
        raise InvalidConfigError(f"rod_after must be > 0, got {rod_after}")

    period1 = nonlinear_period(cfg)
    steps1 = math.ceil(2 * period1 / cfg.dt)
    theta1, omega1 = integrate_rk4(cfg.theta0, cfg.omega0, cfg.dt, steps1, cfg.g, cfg.rod)

    after = replace(cfg, rod=rod_after, theta0=float(theta1[-1]), omega0=float(omega1[-1]))
    period2 = nonlinear_period(after)
    steps2 = math.ceil(2 * period2 / cfg.dt)
    theta2, omega2 = integrate_rk4(after.theta0, after.omega0, cfg.dt, steps2 + 1, cfg.g, rod_after)

    theta = np.concatenate([theta1, theta2[1:]])
    omega = np.concatenate([omega1, omega2[1:]])
    records = records_from_trajectory(theta, omega, cfg.dt)
    # record j holds state j + 1, so record steps1 is the first after the switch
    switch = steps1

    learner = SymplerLearner(1, learner_cfg)
    inputs = np.array([[r.theta] for r in records])
    targets = np.array([r.a_est for r in records])
    sq_err, counts = _stream_learner(learner, inputs, targets)
    errors = np.array(sq_err)

    cycle1 = int(round(period1 / cfg.dt))
    cycle2 = int(round(period2 / cfg.dt))
    settled = errors[max(0, switch - cycle1):switch]
    post = errors[switch:switch + cycle2]
    final = errors[-int(round(period2 / 2 / cfg.dt)):]

    old_points = [float(m.point[0]) for m in learner.models if m.created_at < switch]
    new_models = [m for m in learner.models if m.created_at >= switch]
    in_range = 0
    if old_points:
        lo, hi = min(old_points), max(old_points)
        in_range = sum(1 for m in new_models if lo <= float(m.point[0]) <= hi)

    report = DriftReport(
        inputs=[r.theta for r in records],
        per_step_sq_err=sq_err,
        model_count_trace=counts,
        switch_index=switch,
        models_added_after_switch=len(new_models),
        new_points_in_old_range=in_range,
        pre_switch_settled_mse=float(np.nanmean(settled)),
        post_switch_peak_sq_err=float(np.nanmax(post)),
        final_half_cycle_mse=float(np.nanmean(final)),
    )
    logger.info(
        "drift done switch=%d added_after=%d settled=%.5g peak=%.5g final=%.5g",
        switch, report.models_added_after_switch, report.pre_switch_settled_mse,
        report.post_switch_peak_sq_err, report.final_half_cycle_mse,
    )
    return report


def _train_test_split(cfg: PendulumConfig) -> tuple[FloatArray, FloatArray, int, int]:
    """Angles and targets for 2 training periods followed by 1 test period."""
    period = nonlinear_period(cfg)
    records = simulate(replace(cfg, cycles=3.0))
    n_train = math.ceil(2 * period / cfg.dt)
    n_test = min(int(round(period / cfg.dt)), len(records) - n_train)
    theta = np.array([r.theta for r in records])
    accel = np.array([r.a_est for r in records])
    return theta, accel, n_train, n_test


def _high_dim_task(args: tuple[Any, ...]) -> tuple[int, float]:
    theta, accel, n_train, n_test, learner_cfg, extra, seed, rep = args
    rng = np.random.default_rng([seed, extra, rep])
    total = n_train + n_test
    X = np.hstack([theta[:total, None], rng.standard_normal((total, extra))])

    learner = SymplerLearner(1 + extra, learner_cfg)
    _stream_learner(learner, X[:n_train], accel[:n_train])
    mse = _frozen_mse(learner, X[n_train:total], accel[n_train:total])
    return learner.model_count, mse


def run_high_dim(
    cfg: PendulumConfig,
    learner_cfg: Optional[LearnerConfig] = None,
    extra_dims: Sequence[int] = (0, 10, 100),
    reps: int = 5,
    seed: int = 0,
    jobs: int = 1,
) -> HighDimReport:
    """
    Append standard-normal spurious inputs to the angle; train on 2 periods,
    test the frozen learner on the next one.
    """
    if reps < 1:
        raise InvalidConfigError(f"reps must be >= 1, got {reps}")
    if any(d < 0 for d in extra_dims):
        raise InvalidConfigError("extra_dims must be >= 0")
    learner_cfg = learner_cfg or LearnerConfig()
    theta, accel, n_train, n_test = _train_test_split(cfg)

    tasks = [
        (theta, accel, n_train, n_test, learner_cfg, d, seed, r)
        for d in extra_dims
        for r in range(reps)
    ]
    results = _map(_high_dim_task, tasks, jobs)

    rows = []
    for i, d in enumerate(extra_dims):
        chunk = results[i * reps:(i + 1) * reps]
        counts = np.array([c for c, _ in chunk], dtype=float)
        mses = np.array([m for _, m in chunk])
        rows.append(
            HighDimRow(
                extra_dims=int(d),
                mean_model_count=float(counts.mean()),
                std_model_count=float(counts.std()),
                mean_test_mse=float(mses.mean()),
                std_test_mse=float(mses.std()),
            )
        )
        logger.info("high-dim d=%d models=%.2f mse=%.5g", d, rows[-1].mean_model_count, rows[-1].mean_test_mse)
    return HighDimReport(rows=rows)


def taylor_distance(learner: SymplerLearner, cfg: PendulumConfig) -> float:
    """
    Euclidean distance between all local-model coefficients and the Taylor
    coefficients at their points, divided by the number of models.
    """
    if learner.model_count == 0:
        raise EmptyModelError("No local models to compare with the Taylor expansion")
    diffs = []
    for gap in _taylor_gaps(learner, cfg):
        diffs.extend([gap.slope - gap.taylor_slope, gap.bias - gap.taylor_bias])
    return float(np.linalg.norm(diffs)) / learner.model_count


def _noise_task(args: tuple[Any, ...]) -> tuple[float, int]:
    theta, accel, cfg, learner_cfg, noise_index, noise_sigma, seed, rep = args
    rng = np.random.default_rng([seed, noise_index, rep])
    noisy = accel + noise_sigma * rng.standard_normal(len(accel))

    learner = SymplerLearner(1, learner_cfg)
    _stream_learner(learner, theta[:, None], noisy)
    return taylor_distance(learner, cfg), learner.model_count


def run_noise_study(
    cfg: PendulumConfig,
    noise_sigmas: Sequence[float] = (0.0, 0.5, 1.0, 2.0),
    lambdas: Sequence[float] = (1e-6, 15.0),
    reps: int = 10,
    seed: int = 0,
    jobs: int = 1,
    learner_cfg: Optional[LearnerConfig] = None,
) -> NoiseReport:
    """
    Train on 2 periods with zero-mean Gaussian noise on the acceleration
    target and measure how far the local models drift from Taylor.

    The same noise draws are reused across every lambda.
    """
    if reps < 1:
        raise InvalidConfigError(f"reps must be >= 1, got {reps}")
    if any(s < 0 for s in noise_sigmas):
        raise InvalidConfigError("noise sigmas must be >= 0")
    base_cfg = learner_cfg or LearnerConfig()
    records = simulate(replace(cfg, cycles=2.0))
    theta = np.array([r.theta for r in records])
    accel = np.array([r.a_est for r in records])

    cells = [(si, s, lam) for si, s in enumerate(noise_sigmas) for lam in lambdas]
    tasks = [
        (theta, accel, cfg, replace(base_cfg, lam=lam), si, s, seed, r)
        for si, s, lam in cells
        for r in range(reps)
    ]
    results = _map(_noise_task, tasks, jobs)

    rows = []
    for i, (_, s, lam) in enumerate(cells):
        chunk = results[i * reps:(i + 1) * reps]
        distances = np.array([d for d, _ in chunk])
        counts = np.array([c for _, c in chunk], dtype=float)
        rows.append(
            NoiseRow(
                noise_sigma=float(s),
                lam=float(lam),
                mean_distance=float(distances.mean()),
                std_distance=float(distances.std()),
                mean_model_count=float(counts.mean()),
            )
        )
        logger.info("noise sigma=%g lambda=%g distance=%.5g", s, lam, rows[-1].mean_distance)
    return NoiseReport(rows=rows)
