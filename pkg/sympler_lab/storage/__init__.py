"""CSV ingestion, traces, and JSON snapshots and reports."""

from .csv_io import (
    compute_stats,
    load_csv,
    load_features,
    load_stats,
    read_header,
    save_stats,
    write_stream,
    write_trace,
)
from .snapshots import (
    FORMAT_VERSION,
    learner_from_snapshot,
    learner_to_snapshot,
    load_report,
    load_snapshot,
    save_report,
    save_snapshot,
    write_json,
)

__all__ = [
    "FORMAT_VERSION",
    "compute_stats",
    "learner_from_snapshot",
    "learner_to_snapshot",
    "load_csv",
    "load_features",
    "load_report",
    "load_snapshot",
    "load_stats",
    "read_header",
    "save_report",
    "save_snapshot",
    "save_stats",
    "write_json",
    "write_stream",
    "write_trace",
]
