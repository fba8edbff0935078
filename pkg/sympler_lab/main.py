"""
Command-line interface for SyMPLER Lab.

Every subcommand writes plain data files (CSV and JSON) plus a manifest.json
holding the resolved flags, so a run can be repeated bit-for-bit.
"""

import argparse
import json
import logging
import math
import sys
from collections.abc import Callable, Sequence
from dataclasses import asdict
from pathlib import Path
from typing import Any, Optional

import numpy as np

from . import __version__
from .config import get_settings
from .engine import pendulum
from .engine.errors import InvalidConfigError, SymplerError
from .engine.protocol import (
    execute_clear_protocol,
    naive_rmse,
    run_offline_protocol,
    standardize,
)
from .engine.types import (
    CompareMode,
    DatasetSchema,
    LearnerConfig,
    PendulumConfig,
    Selection,
    RunManifest,
    SplitSpec,
    StandardizationStats,
)
from .engine.vc_bounds import VCBoundCalculator
from .storage import (
    load_csv,
    load_features,
    load_snapshot,
    load_stats,
    read_header,
    save_report,
    save_snapshot,
    write_json,
    write_trace,
)
from .storage.snapshots import report_to_dict

logger = logging.getLogger(__name__)

Handler = Callable[[argparse.Namespace], None]


# ============================================================================
# Argument helpers
# ============================================================================

def _float_list(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got '{text}'") from None


def _int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got '{text}'") from None


def _name_list(text: str) -> list[str]:
    return [v.strip() for v in text.split(",") if v.strip()]


def _add_common(parser: argparse.ArgumentParser, out_help: str = "Output directory") -> None:
    settings = get_settings()
    parser.add_argument("--seed", type=int, default=settings.default_seed)
    parser.add_argument("--out", type=Path, required=True, help=out_help)
    parser.add_argument("--log-level", default=settings.log_level)


def _add_learner(parser: argparse.ArgumentParser, selection: Selection = Selection.NEAREST) -> None:
    settings = get_settings()
    parser.add_argument("--lambda", dest="lam", type=float, default=settings.default_lambda)
    parser.add_argument(
        "--selection", type=Selection, choices=list(Selection), default=selection,
        metavar="{" + ",".join(s.value for s in Selection) + "}",
    )
    parser.add_argument("--sigma", type=float, default=settings.default_sigma)
    parser.add_argument(
        "--compare-mode", type=CompareMode, choices=list(CompareMode),
        default=CompareMode.ADD_THEN_COMPARE,
        metavar="{" + ",".join(m.value for m in CompareMode) + "}",
    )


def _add_pendulum(parser: argparse.ArgumentParser, cycles: float = 2.0) -> None:
    settings = get_settings()
    parser.add_argument("--rod", type=float, default=settings.pendulum_rod)
    parser.add_argument("--g", type=float, default=settings.pendulum_g)
    parser.add_argument("--rate-hz", type=float, default=settings.pendulum_rate_hz)
    parser.add_argument("--theta0", type=float, default=settings.pendulum_theta0)
    parser.add_argument("--omega0", type=float, default=0.0)
    parser.add_argument("--cycles", type=float, default=cycles)


def _learner_config(args: argparse.Namespace) -> LearnerConfig:
    return LearnerConfig(
        lam=args.lam,
        selection=args.selection,
        sigma=args.sigma,
        compare_mode=args.compare_mode,
    )


def _pendulum_config(args: argparse.Namespace) -> PendulumConfig:
    if args.rate_hz <= 0:
        raise InvalidConfigError(f"--rate-hz must be > 0, got {args.rate_hz}")
    return PendulumConfig(
        rod=args.rod,
        g=args.g,
        dt=1.0 / args.rate_hz,
        theta0=args.theta0,
        omega0=args.omega0,
        cycles=args.cycles,
    )


def _jsonable(value: Any) -> Any:
    if isinstance(value, Path):
        return str(value)
    if isinstance(value, (Selection, CompareMode)):
        return value.value
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


def _write_manifest(args: argparse.Namespace) -> None:
    flags = {
        k: _jsonable(v)
        for k, v in sorted(vars(args).items())
        if k not in ("handler", "command")
    }
    manifest = RunManifest(subcommand=args.command, flags=flags, seed=args.seed, version=__version__)
    write_json(args.out / "manifest.json", asdict(manifest))


def _prepare_dir(args: argparse.Namespace) -> Path:
    out: Path = args.out
    out.mkdir(parents=True, exist_ok=True)
    _write_manifest(args)
    return out


# ============================================================================
# Subcommands
# ============================================================================

def cmd_vc_table(args: argparse.Namespace) -> None:
    rows = VCBoundCalculator.bound_table(args.h_max, args.eta)
    args.out.parent.mkdir(parents=True, exist_ok=True)
    write_trace(args.out, [(r.h, r.l_star, r.l_rule) for r in rows], ["h", "l_star", "l_rule"])
    print(f"Wrote {len(rows)} rows to {args.out}")


def cmd_pendulum_train(args: argparse.Namespace) -> None:
    out = _prepare_dir(args)
    learner, report = pendulum.train_base(_pendulum_config(args), _learner_config(args))

    write_trace(
        out / "trace.csv",
        [
            (i, x, e, c)
            for i, (x, e, c) in enumerate(
                zip(report.inputs, report.per_step_sq_err, report.model_count_trace)
            )
        ],
        ["index", "input", "sq_err", "model_count"],
    )
    write_trace(
        out / "taylor.csv",
        [
            (g.model_index, g.point, g.slope, g.bias, g.taylor_slope, g.taylor_bias)
            for g in report.taylor_gaps
        ],
        ["model_index", "point", "slope", "bias", "taylor_slope", "taylor_bias"],
    )
    write_json(
        out / "report.json",
        {
            "model_count": report.model_count,
            "period": report.period,
            "half_cycle_counts": report.half_cycle_counts,
            "max_d_slope": max((g.d_slope for g in report.taylor_gaps), default=0.0),
            "max_d_bias": max((g.d_bias for g in report.taylor_gaps), default=0.0),
        },
    )
    save_snapshot(learner, out / "snapshot.json")
    print(f"{report.model_count} local models, period {report.period:.4f} s -> {out}")


def cmd_pendulum_forecast(args: argparse.Namespace) -> None:
    out = _prepare_dir(args)
    cfg = _pendulum_config(args)
    learner, _ = pendulum.train_base(cfg, _learner_config(args))
    report = pendulum.run_forecast_experiment(cfg, duration_s=args.duration, learner=learner)

    write_trace(
        out / "forecast.csv",
        list(zip(report.times, report.theta_true, report.theta_model, report.theta_linear)),
        ["t", "theta_true", "theta_model", "theta_linear"],
    )
    write_json(
        out / "report.json",
        {
            "rmse_final_model": report.rmse_final_model,
            "rmse_final_linear": report.rmse_final_linear,
            "linear_period_ratio": report.linear_period_ratio,
            "model_count": learner.model_count,
        },
    )
    save_snapshot(learner, out / "snapshot.json")
    print(
        f"final two cycles: model RMSE {report.rmse_final_model:.4f}, "
        f"linear RMSE {report.rmse_final_linear:.4f} -> {out}"
    )


def cmd_pendulum_drift(args: argparse.Namespace) -> None:
    out = _prepare_dir(args)
    report = pendulum.run_concept_drift(
        _pendulum_config(args), _learner_config(args), rod_after=args.rod_after
    )
    write_trace(
        out / "trace.csv",
        [
            (i, x, e, c)
            for i, (x, e, c) in enumerate(
                zip(report.inputs, report.per_step_sq_err, report.model_count_trace)
            )
        ],
        ["index", "input", "sq_err", "model_count"],
    )
    write_json(
        out / "report.json",
        {
            "switch_index": report.switch_index,
            "models_added_after_switch": report.models_added_after_switch,
            "new_points_in_old_range": report.new_points_in_old_range,
            "pre_switch_settled_mse": report.pre_switch_settled_mse,
            "post_switch_peak_sq_err": report.post_switch_peak_sq_err,
            "final_half_cycle_mse": report.final_half_cycle_mse,
            "model_count": report.model_count_trace[-1] if report.model_count_trace else 0,
        },
    )
    print(f"{report.models_added_after_switch} models added after the switch -> {out}")


def cmd_pendulum_highdim(args: argparse.Namespace) -> None:
    out = _prepare_dir(args)
    report = pendulum.run_high_dim(
        _pendulum_config(args),
        _learner_config(args),
        extra_dims=args.extra_dims,
        reps=args.reps,
        seed=args.seed,
        jobs=args.jobs,
    )
    write_trace(
        out / "highdim.csv",
        [
            (r.extra_dims, r.mean_model_count, r.std_model_count, r.mean_test_mse, r.std_test_mse)
            for r in report.rows
        ],
        ["extra_dims", "mean_model_count", "std_model_count", "mean_test_mse", "std_test_mse"],
    )
    print(f"{len(report.rows)} dimension settings x {args.reps} reps -> {out}")


def cmd_pendulum_noise(args: argparse.Namespace) -> None:
    out = _prepare_dir(args)
    report = pendulum.run_noise_study(
        _pendulum_config(args),
        noise_sigmas=args.noise_sigmas,
        lambdas=args.lambdas,
        reps=args.reps,
        seed=args.seed,
        jobs=args.jobs,
        learner_cfg=_learner_config(args),
    )
    write_trace(
        out / "noise.csv",
        [
            (r.noise_sigma, r.lam, r.mean_distance, r.std_distance, r.mean_model_count)
            for r in report.rows
        ],
        ["noise_sigma", "lambda", "mean_distance", "std_distance", "mean_model_count"],
    )
    print(f"{len(report.rows)} (noise, lambda) cells x {args.reps} reps -> {out}")


def _resolve_schema(path: Path, features: Optional[list[str]], target: str) -> DatasetSchema:
    if features is None:
        features = [c for c in read_header(path) if c != target]
    return DatasetSchema(feature_columns=features, target_column=target)


def _resolve_stats(
    path: Optional[Path],
    schema: DatasetSchema,
) -> Optional[StandardizationStats]:
    if path is None:
        return None
    return load_stats(path, schema.feature_columns + [schema.target_column])


def cmd_evaluate(args: argparse.Namespace) -> None:
    out = _prepare_dir(args)
    schema = _resolve_schema(args.data, args.features, args.target)
    stream = load_csv(args.data, schema)
    stats = _resolve_stats(args.stats, schema)
    if stats is not None:
        stream = standardize(stream, stats)

    split = SplitSpec.from_lengths(args.warmup, args.update, len(stream))
    run = execute_clear_protocol(stream, split, _learner_config(args))
    save_report(run.report, out / "report.json")
    save_snapshot(run.warmup_learner, out / "warmup_snapshot.json")
    save_snapshot(run.final_learner, out / "snapshot.json")

    rows = []
    for phase, trace in run.traces.items():
        for i, p, y, s in zip(trace.indices, trace.predictions, trace.targets, trace.substituted):
            rows.append((phase, i, p, y, int(s)))
    write_trace(out / "predictions.csv", rows, ["phase", "index", "prediction", "target", "substituted"])

    offline = run_offline_protocol(stream, split, args.lam)
    write_json(
        out / "baselines.json",
        {
            "offline_ridge": report_to_dict(offline),
            "naive_prediction_rmse": naive_rmse(stream, split.eval),
        },
    )
    r = run.report
    print(
        f"fitting {r.fitting_rmse:.6g}  prediction {r.prediction_rmse:.6g}  "
        f"forgetting {r.forgetting_ratio:.6g}  models {r.model_count} -> {out}"
    )


def cmd_explain(args: argparse.Namespace) -> None:
    learner = load_snapshot(args.snapshot)
    stats = load_stats(args.stats) if args.stats is not None else None
    payload = learner.explain(np.array(args.x), stats).to_dict()
    text = json.dumps(payload, indent=2, sort_keys=True)
    if args.out is not None:
        args.out.parent.mkdir(parents=True, exist_ok=True)
        write_json(args.out, payload)
    print(text)


def cmd_predict(args: argparse.Namespace) -> None:
    learner = load_snapshot(args.snapshot)
    columns = args.features
    if columns is None:
        columns = [c for c in read_header(args.data) if c != args.target]
    X = load_features(args.data, columns)

    stats = load_stats(args.stats, list(columns) + [args.target]) if args.stats is not None else None
    if stats is not None:
        scale = np.where(stats.stds > 0, stats.stds, 1.0)
        X = (X - stats.means[:-1]) / scale[:-1]

    rows = []
    for i, prediction in enumerate(learner.predict_many(X)):
        if prediction is not None and stats is not None:
            prediction = prediction * float(scale[-1]) + float(stats.means[-1])
        rows.append((i, math.nan if prediction is None else prediction))
    args.out.parent.mkdir(parents=True, exist_ok=True)
    write_trace(args.out, rows, ["index", "prediction"])
    print(f"{len(rows)} predictions -> {args.out}")


# ============================================================================
# Parser and dispatch
# ============================================================================

def build_parser() -> argparse.ArgumentParser:
    settings = get_settings()
    parser = argparse.ArgumentParser(
        prog="sympler",
        description="SyMPLER continual piecewise-linear regression experiments.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="<command>")

    def add(name: str, handler: Handler, help_text: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_text, description=help_text)
        p.set_defaults(handler=handler)
        return p

    p = add("vc-table", cmd_vc_table, "Minimum training sizes per VC dimension")
    p.add_argument("--h-max", type=int, default=100)
    p.add_argument("--eta", type=float, default=settings.default_eta)
    _add_common(p, out_help="Output CSV file")

    p = add("pendulum-train", cmd_pendulum_train, "Base identification experiment")
    _add_pendulum(p)
    _add_learner(p)
    _add_common(p)

    p = add("pendulum-forecast", cmd_pendulum_forecast, "Closed-loop long-term forecast")
    _add_pendulum(p)
    _add_learner(p)
    p.add_argument("--duration", type=float, default=167.0, help="Forecast horizon in seconds")
    _add_common(p)

    p = add("pendulum-drift", cmd_pendulum_drift, "Rod-length concept drift")
    _add_pendulum(p)
    _add_learner(p, selection=Selection.ERROR_BASED)
    p.add_argument("--rod-after", type=float, default=1.0)
    _add_common(p)

    p = add("pendulum-highdim", cmd_pendulum_highdim, "Spurious input dimensions study")
    _add_pendulum(p)
    _add_learner(p)
    p.add_argument("--extra-dims", type=_int_list, default=[0, 1, 2, 5, 10, 20, 50, 100])
    p.add_argument("--reps", type=int, default=5)
    p.add_argument("--jobs", type=int, default=settings.default_jobs)
    _add_common(p)

    p = add("pendulum-noise", cmd_pendulum_noise, "Target noise and regularization study")
    _add_pendulum(p)
    _add_learner(p)
    p.add_argument("--noise-sigmas", type=_float_list, default=[0.0, 0.5, 1.0, 1.5, 2.0])
    p.add_argument("--lambdas", type=_float_list, default=[1e-6, 1.0, 15.0])
    p.add_argument("--reps", type=int, default=30)
    p.add_argument("--jobs", type=int, default=settings.default_jobs)
    _add_common(p)

    p = add("evaluate", cmd_evaluate, "Warmup/update/evaluation protocol on a CSV stream")
    p.add_argument("--data", type=Path, default=settings.demo_stream_path, help="Default: bundled two-regime stream")
    p.add_argument("--features", type=_name_list, default=None, help="Default: every column but the target")
    p.add_argument("--target", default="y")
    p.add_argument("--warmup", type=int, required=True)
    p.add_argument("--update", type=int, required=True)
    p.add_argument("--stats", type=Path, default=None, help="column,mean,std file")
    _add_learner(p)
    _add_common(p)

    p = add("explain", cmd_explain, "Report the local model answering a query point")
    p.add_argument("--snapshot", type=Path, required=True)
    p.add_argument("--x", type=_float_list, required=True, help="Comma-separated query point")
    p.add_argument("--stats", type=Path, default=None, help="Report in original units")
    p.add_argument("--out", type=Path, default=None, help="Optional JSON file")
    p.add_argument("--seed", type=int, default=settings.default_seed)
    p.add_argument("--log-level", default=settings.log_level)

    p = add("predict", cmd_predict, "Batch inference from a snapshot and a CSV")
    p.add_argument("--snapshot", type=Path, required=True)
    p.add_argument("--data", type=Path, required=True)
    p.add_argument("--features", type=_name_list, default=None)
    p.add_argument("--target", default="y", help="Column skipped when features are inferred")
    p.add_argument("--stats", type=Path, default=None)
    _add_common(p, out_help="Output CSV file")

    return parser


def _configure_logging(level: str) -> None:
    logging.basicConfig(
        level=level.upper(),
        stream=sys.stderr,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        force=True,
    )


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    Parse argv and run one subcommand.

    Returns:
        0 on success, 1 on a domain or I/O error. Usage errors exit with 2
        through argparse.
    """
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _configure_logging(args.log_level)
    except ValueError:
        parser.error(f"unknown log level '{args.log_level}'")

    try:
        args.handler(args)
    except (SymplerError, OSError) as e:
        print(f"sympler {args.command}: error: {e}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
