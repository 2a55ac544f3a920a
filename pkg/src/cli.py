"""Command-line interface for the Worm metric lab."""

import argparse
import logging
import os
import sys
from pathlib import Path
from typing import Dict, List, Optional

from dotenv import load_dotenv
from pydantic import ValidationError

from experiments.experiment_manager import ExperimentManager
from models.config import DEFAULT_SEED, ExperimentConfig, load_experiment_config
from models.errors import SpecValidationError, WormLabError
from models.reports import ExperimentReport

logger = logging.getLogger(__name__)

COMMANDS: Dict[str, str] = {
    "levi": "levi_audit",
    "bench": "metric_bench",
    "triangle": "triangle_growth",
    "scale": "scaling_convergence",
    "delta": "delta_growth",
    "project": "projection_audit",
    "completeness": "completeness",
    "slice": "slice",
}

COMMAND_HELP: Dict[str, str] = {
    "levi": "Audit the Levi form on sampled boundary points",
    "bench": "Benchmark exact oracles, disc search and metric graphs",
    "triangle": "Measure slimness of the fiber-bundle triangles",
    "scale": "Compare metrics of B_n(W) with the inner pre-Worm",
    "delta": "Four-point delta of growing balls in the inner pre-Worm",
    "project": "Check that the bundle projection is non-expanding",
    "completeness": "Distances toward a boundary point of the Worm",
    "slice": "Render w-slices of the Worm as SVG",
}


def setup_logging(verbose: bool = False, log_file: Optional[str] = None) -> None:
    """Setup logging configuration."""
    level = logging.DEBUG if verbose else logging.INFO
    logging.basicConfig(
        level=level,
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        handlers=[
            logging.StreamHandler(sys.stdout),
            logging.FileHandler(log_file or os.getenv("WORMLAB_LOG_FILE", "wormlab.log")),
        ],
        force=True,
    )


def environment_defaults() -> Dict[str, object]:
    """Defaults read from the environment (and a .env file when present)."""
    load_dotenv()
    return {
        "output_dir": os.getenv("WORMLAB_OUTPUT_DIR", "results"),
        "seed": int(os.getenv("WORMLAB_SEED", str(DEFAULT_SEED))),
        "workers": int(os.getenv("WORMLAB_WORKERS", "1")),
    }


def build_config(experiment: str, args: argparse.Namespace, defaults: Dict[str, object]) -> ExperimentConfig:
    """Config file values, else environment defaults; command-line flags override both."""
    if args.config:
        config = load_experiment_config(Path(args.config))
        if config.experiment != experiment:
            raise SpecValidationError(f"{args.config} configures '{config.experiment}', not '{experiment}'")
    else:
        config = ExperimentConfig(experiment=experiment, **defaults)
    updates: Dict[str, object] = {}
    if args.seed is not None:
        updates["seed"] = args.seed
    if args.resolution is not None:
        updates["resolution"] = args.resolution
    if args.out is not None:
        updates["output_dir"] = args.out
    if not updates:
        return config
    try:
        updated = ExperimentConfig.model_validate({**config.model_dump(), **updates})
    except ValidationError as e:
        raise SpecValidationError(f"Invalid command-line override: {e}") from e
    updated.config_dir = config.config_dir
    return updated


def print_report(report: ExperimentReport, path: Path) -> None:
    counts = report.status_counts()
    icon = "✅" if report.all_passed else "❌"
    print(f"\n{icon} {report.experiment}: {len(report.rows)} rows in {report.processing_time:.1f}s")
    print(
        f"   pass {counts['pass']}, fail {counts['fail']}, info {counts['info']}, "
        f"infeasible {counts['infeasible']}, inconclusive {counts['inconclusive']}"
    )
    for row in report.rows:
        if row.status == "fail":
            print(f"   ✗ {row.quantity} @ {row.parameter:g}: {row.value:.6g} (reference {row.reference}, tol {row.tolerance:g})")
    print(f"📄 Report written to {path}")


def experiment_command(experiment: str, args: argparse.Namespace, defaults: Dict[str, object]) -> int:
    """Run one experiment and return its exit status."""
    config = build_config(experiment, args, defaults)
    print(f"\n🔬 Running {experiment} (seed {config.seed}, resolution {config.resolution:g})")
    manager = ExperimentManager()
    report, path = manager.run(config)
    print_report(report, path)
    return manager.exit_status([report])


def report_command(args: argparse.Namespace, defaults: Dict[str, object]) -> int:
    """Summarize the CSV reports of an output directory."""
    directory = Path(args.out or str(defaults["output_dir"]))
    summary = ExperimentManager(directory).summarize()
    if summary.empty:
        print(f"📁 No reports found in {directory}")
        return 0
    print(f"\n📊 Reports in {directory}:")
    for record in summary.to_dict("records"):
        icon = "✅" if record["fail"] == 0 else "❌"
        print(
            f"  {icon} {record['report']}: {record['rows']} rows, {record['pass']} pass, {record['fail']} fail, "
            f"{record['infeasible']} infeasible, {record['inconclusive']} inconclusive"
        )
    return 0 if int(summary["fail"].sum()) == 0 else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        description="Worm metric lab - numerical experiments on Worm domains and their Kobayashi metric",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  # Audit the Levi form of the classical Worm
  python cli.py levi --config configs/levi_audit.json

  # Triangle growth with a finer side sampling
  python cli.py triangle --config configs/triangle_growth.json --resolution 0.02

  # Summarize existing reports
  python cli.py report --out results
        """,
    )
    parser.add_argument("--verbose", "-v", action="store_true", help="Enable verbose logging")

    subparsers = parser.add_subparsers(dest="command", help="Available commands")
    for command, help_text in COMMAND_HELP.items():
        sub = subparsers.add_parser(command, help=help_text)
        sub.add_argument("--config", help="Experiment configuration (JSON)")
        sub.add_argument("--seed", type=int, help="Random seed")
        sub.add_argument("--resolution", type=float, help="Sampling resolution")
        sub.add_argument("--out", help="Output directory for reports")

    report_parser = subparsers.add_parser("report", help="Summarize CSV reports in an output directory")
    report_parser.add_argument("--out", help="Directory holding the reports")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Main CLI function; returns the process exit status."""
    parser = build_parser()
    args = parser.parse_args(argv)

    if not args.command:
        parser.print_help()
        return 0

    defaults = environment_defaults()
    setup_logging(args.verbose)

    try:
        if args.command == "report":
            return report_command(args, defaults)
        return experiment_command(COMMANDS[args.command], args, defaults)
    except WormLabError as e:
        print(f"❌ {e}")
        logger.error(f"{args.command} failed: {e}")
        return 2
    except KeyboardInterrupt:
        print("\n⚠️  Operation cancelled by user")
        return 1
    except Exception as e:
        print(f"❌ Unexpected error: {e}")
        logger.exception(f"Unexpected error in CLI: {e}")
        return 1


if __name__ == "__main__":
    sys.exit(main())
