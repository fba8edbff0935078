#!/usr/bin/env python3
"""
SyMPLER Lab - Main Entry Point

This script provides convenient commands for running the application.

Usage:
    python main.py api      - Start the FastAPI server
    python main.py test     - Run tests
    python main.py demo     - Train on the pendulum and explain one query
    python main.py <cmd>    - Any `sympler` subcommand (vc-table, evaluate, ...)
"""

import subprocess
import sys


def run_api():
    """Start the FastAPI server."""
    from sympler_lab.config import get_settings

    settings = get_settings()
    print("Starting SyMPLER Lab API Server...")
    print(f"API docs available at: http://localhost:{settings.api_port}/docs")
    print("Press Ctrl+C to stop\n")

    subprocess.run([
        sys.executable, "-m", "uvicorn",
        "sympler_lab.api.main:app",
        "--host", settings.api_host,
        "--port", str(settings.api_port),
        "--reload"
    ])


def run_tests():
    """Run the test suite."""
    print("Running tests...\n")
    subprocess.run([
        sys.executable, "-m", "pytest",
        "sympler_lab/tests",
        "-v", "--cov=sympler_lab",
        "--cov-report=term-missing",
        "-m", "not slow",
    ])


def run_demo():
    """Run a quick demonstration."""
    from sympler_lab.engine.pendulum import train_base
    from sympler_lab.engine.types import PendulumConfig

    print("=" * 60)
    print("SyMPLER Lab - Pendulum Demo")
    print("=" * 60)

    learner, report = train_base(PendulumConfig())
    print(f"\nPeriod at 90 deg amplitude: {report.period:.4f} s")
    print(f"Local models after two cycles: {report.model_count}")
    print(f"Models per half cycle: {report.half_cycle_counts}")

    print(f"\n  {'#':<4} {'point':>8} {'slope':>10} {'bias':>10} {'taylor':>18}")
    print("  " + "-" * 54)
    for g in report.taylor_gaps:
        print(f"  {g.model_index:<4} {g.point:>8.3f} {g.slope:>10.3f} {g.bias:>10.3f} "
              f"({g.taylor_slope:>7.3f}, {g.taylor_bias:>7.3f})")

    e = learner.explain([0.44])
    print(f"\nQuery 0.44 rad -> model {e.model_index}, slope {e.weights[0]:.3f}, "
          f"bias {e.weights[1]:.3f}")

    print("\n" + "=" * 60)
    print("Demo complete! Run 'sympler --help' for every experiment.")
    print("=" * 60)


def print_help():
    """Print help message."""
    print(__doc__)
    print("Available commands:")
    print("  api   - Start the FastAPI backend server")
    print("  test  - Run the fast test suite")
    print("  demo  - Run a quick pendulum demo")
    print("\nExample:")
    print("  python main.py vc-table --h-max 10 --out table.csv")


def main():
    """Main entry point."""
    if len(sys.argv) < 2:
        print_help()
        return

    command = sys.argv[1].lower()

    commands = {
        "api": run_api,
        "server": run_api,
        "test": run_tests,
        "tests": run_tests,
        "demo": run_demo,
        "help": print_help,
        "--help": print_help,
        "-h": print_help,
    }

    if command in commands:
        commands[command]()
    else:
        from sympler_lab.main import main as cli_main

        sys.exit(cli_main(sys.argv[1:]))


if __name__ == "__main__":
    main()
