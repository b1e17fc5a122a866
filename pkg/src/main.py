"""
Command-line interface for the UPS+ simulator.

Synthesizes recordings from scenario files, localizes from recordings and runs
the canned experiments.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import Any

from pydantic import ValidationError

from src.core.exceptions import (
    CBeaconAbsentError,
    ConfigurationError,
    DetectionError,
    ExperimentError,
    LocalizationError,
    UpsSimError,
)
from src.core.experiment_registry import (
    get_global_registry,
    register_builtin_experiments,
)
from src.core.tables import write_table
from src.harness.bench import run_bench
from src.harness.config import (
    ExperimentConfig,
    load_anchor_map,
    load_experiment_config,
    load_scenario,
)
from src.harness.localization import (
    LocateResult,
    fix_rows,
    locate_rooms,
    write_detections,
    write_fixes,
)
from src.harness.report import write_report
from src.harness.synthesis import synthesize, write_recording
from src.models.sample_buffer import SampleBuffer
from src.models.scenario import Scenario
from src.signals.wav import read_wav

logger = logging.getLogger(__name__)

DEFAULT_TRIALS = 100
RESULTS_DIR = Path("results")

EXIT_OK = 0
EXIT_UNEXPECTED = 1
EXIT_CONFIG = 2
EXIT_DETECTION = 3
EXIT_INTERRUPTED = 130


def show_banner() -> None:
    """Display the simulator banner."""
    banner = r"""  _   _ ____  ____
 | | | |  _ \/ ___|   _
 | | | | |_) \___ \ _| |_
 | |_| |  __/ ___) |_   _|
  \___/|_|   |____/  |_|
"""
    print(banner)


def configure_logging(debug: bool = False, verbose: bool = False) -> None:
    """Configure application logging.

    Args:
        debug: Enable debug-level logging if True.
        verbose: Enable stage-level (INFO) logging if True.
    """
    if debug:
        level = logging.DEBUG
        format_str = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
    elif verbose:
        level = logging.INFO
        format_str = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
    else:
        level = logging.WARNING
        format_str = "%(levelname)s: %(message)s"

    logging.basicConfig(
        level=level,
        format=format_str,
        stream=sys.stdout,
        force=True,  # Override existing configuration
    )


def _positive_int(value: str) -> int:
    number = int(value)
    if number < 1:
        raise argparse.ArgumentTypeError(f"must be at least 1, got {number}")
    return number


def _non_negative_int(value: str) -> int:
    number = int(value)
    if number < 0:
        raise argparse.ArgumentTypeError(f"must be non-negative, got {number}")
    return number


def with_overrides(
    scenario: Scenario, seed: int | None = None, snr_db: float | None = None
) -> Scenario:
    """Scenario with CLI overrides applied and re-validated."""
    updates: dict[str, Any] = {}
    if seed is not None:
        updates["seed"] = seed
    if snr_db is not None:
        updates["snr_db"] = snr_db
    if not updates:
        return scenario
    return Scenario.model_validate({**scenario.model_dump(), **updates})


# --- commands ---


def cmd_synth(args: argparse.Namespace) -> int:
    scenario = with_overrides(load_scenario(args.scenario), args.seed, args.snr_db)
    recording = synthesize(scenario, spectrum_path=args.spectrum)
    write_recording(recording, args.out, args.format)
    print(
        f"Wrote {args.out}: {len(recording.transmissions)} frame(s), "
        f"{recording.primary.duration:.3f} s at {recording.primary.rate:.0f} Hz"
    )
    if recording.range_limited:
        print(f"Range-limited anchors: {recording.range_limited}")
    return EXIT_OK


def _check_rate(channels: list[SampleBuffer], scenario: Scenario, wav: Path) -> None:
    rate = channels[0].rate if channels else None
    if rate != scenario.mic.adc_rate:
        raise ConfigurationError(
            f"{wav} is sampled at {rate} Hz but the scenario expects "
            f"{scenario.mic.adc_rate} Hz",
            field_name="mic.adc_rate",
            expected=scenario.mic.adc_rate,
            actual=rate,
        )


def cmd_locate(args: argparse.Namespace) -> int:
    scenarios = [load_scenario(path) for path in args.scenario]
    anchors = load_anchor_map(args.anchors).positions() if args.anchors else None
    if not args.wav.is_file():
        raise FileNotFoundError(f"Recording not found: {args.wav}")
    channels = read_wav(args.wav)
    for scenario in scenarios:
        _check_rate(channels, scenario, args.wav)
    try:
        result = locate_rooms(channels, scenarios, anchors, args.mic)
    except CBeaconAbsentError as e:
        logger.warning(f"No beacons in {args.wav}: {e}")
        result = LocateResult()

    if args.detections is not None:
        write_detections(args.detections, result)
    if args.out is not None:
        write_fixes(args.out, result.fixes)
    rows = fix_rows(result.fixes)
    if len(scenarios) > 1 and result.room is not None:
        print(f"Room: {result.room}")
    print(f"{len(result.toas)} ToA(s), {len(rows)} fix(es)")
    for row in rows:
        print(
            f"  x={row['x']:.4f} y={row['y']:.4f} z={row['z']:.4f} "
            f"residual={row['residual_rms']:.4f} converged={row['converged']}"
        )
    return EXIT_OK


def _sweep_settings(args: argparse.Namespace) -> tuple[str, ExperimentConfig]:
    config = (
        load_experiment_config(args.config)
        if args.config is not None
        else ExperimentConfig()
    )
    name = args.experiment or config.experiment
    if not name:
        raise ExperimentError("No experiment named on the command line or in --config")
    return name, config


def cmd_sweep(args: argparse.Namespace) -> int:
    name, config = _sweep_settings(args)
    register_builtin_experiments()
    experiment = get_global_registry().create_experiment(name)

    params = dict(config.params)
    if args.scenario is not None:
        params["scenario"] = load_scenario(args.scenario)
    if args.snr_db is not None:
        params["snr_db"] = args.snr_db
    seed = args.seed if args.seed is not None else (config.seed or 0)
    trials = args.trials if args.trials is not None else config.trials
    workers = args.workers if args.workers is not None else config.workers

    report = experiment.run(
        params,
        seed,
        DEFAULT_TRIALS if trials is None else trials,
        workers=workers,
        progress=args.progress,
    )
    out_dir = args.out or RESULTS_DIR / experiment.name
    write_report(report, out_dir)

    print(f"{report.experiment}: {len(report.records)} trial(s) -> {out_dir}")
    for agg in report.aggregates:
        print(
            f"  {agg.point:<14} median={_fmt(agg.median)} p90={_fmt(agg.p90)} "
            f"success={_fmt(agg.success_rate)}"
        )
    return EXIT_OK


def _fmt(value: float | None) -> str:
    return "-" if value is None else f"{value:.4g}"


def cmd_bench(args: argparse.Namespace) -> int:
    scenario = load_scenario(args.scenario) if args.scenario is not None else None
    rows = run_bench(scenario, args.repeat, exhaustive=not args.skip_exhaustive)
    if args.out is not None:
        write_table(args.out, "bench", rows)
    for row in rows:
        print(f"  {row['stage']:<14} #{row['repeat']} {row['seconds']:.4f} s")
    return EXIT_OK


def cmd_list_experiments(args: argparse.Namespace) -> int:
    show_banner()
    register_builtin_experiments()
    registry = get_global_registry()

    print("Available Experiments:")
    print("=" * 50)
    if not len(registry):
        print("No experiments registered.")
        return EXIT_OK

    for name in registry.get_available_names():
        info = registry.get_experiment_info(name)
        print(f"  {name:<18} - {info.get('description', 'No description')}")
        defaults = info.get("defaults")
        if defaults:
            shown = {k: v for k, v in defaults.items() if k != "scenario"}
            print(f"  {'':<18}   defaults: {shown}")
    return EXIT_OK


COMMANDS = {
    "synth": cmd_synth,
    "locate": cmd_locate,
    "sweep": cmd_sweep,
    "bench": cmd_bench,
    "list-experiments": cmd_list_experiments,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="upsplus",
        description=(
            "Simulate ultrasonic positioning through microphone nonlinearity"
        ),
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  # Render a scenario to a 2-channel WAV
  python -m src.main synth --scenario scenarios/four_anchors.yaml --out out.wav

  # Localize from it
  python -m src.main locate out.wav --scenario scenarios/four_anchors.yaml \\
    --anchors scenarios/anchor_map.yaml --out fixes.csv

  # Reproduce an experiment with 4 worker processes
  python -m src.main sweep cdf-2d --trials 150 --workers 4 --out results/cdf

Exit codes:
  0 success, 2 configuration error, 3 detection or localization failure
        """,
    )
    parser.add_argument(
        "--debug", action="store_true", help="Enable debug logging for detailed output"
    )
    parser.add_argument(
        "-v",
        "--verbose",
        action="store_true",
        help="Log stage boundaries (offsets found, detections, fixes)",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    synth = commands.add_parser("synth", help="Render a scenario to a WAV file")
    synth.add_argument("--scenario", type=Path, required=True, metavar="FILE")
    synth.add_argument("--out", type=Path, required=True, metavar="WAV")
    synth.add_argument("--seed", type=_non_negative_int, help="Override the seed")
    synth.add_argument("--snr-db", type=float, help="Override the noise level")
    synth.add_argument("--format", choices=["float", "pcm16"], default="float")
    synth.add_argument(
        "--spectrum",
        type=Path,
        metavar="CSV",
        help="Also dump the primary mic spectrum before the anti-alias filter",
    )

    locate = commands.add_parser("locate", help="Localize from a WAV recording")
    locate.add_argument("wav", type=Path, metavar="WAV")
    locate.add_argument(
        "--scenario",
        type=Path,
        action="append",
        required=True,
        metavar="FILE",
        help=(
            "Chirp, frame and microphone settings of the deployment; repeat it "
            "for several rooms and the chirp slope picks one"
        ),
    )
    locate.add_argument(
        "--anchors",
        type=Path,
        metavar="MAP",
        help="Surveyed anchor positions (default: the scenario's anchors)",
    )
    locate.add_argument("--out", type=Path, metavar="CSV", help="Fixes table")
    locate.add_argument(
        "--detections", type=Path, metavar="CSV", help="Per-preamble table"
    )
    locate.add_argument(
        "--mic",
        choices=["primary", "secondary", "turbo"],
        help="Detection channel (default: the scenario's detection_mic)",
    )

    sweep = commands.add_parser("sweep", help="Run a canned experiment")
    sweep.add_argument("experiment", nargs="?", metavar="EXPERIMENT")
    sweep.add_argument(
        "--config", type=Path, metavar="FILE", help="Experiment YAML file"
    )
    sweep.add_argument(
        "--scenario", type=Path, metavar="FILE", help="Base scenario for the trials"
    )
    sweep.add_argument("--seed", type=_non_negative_int)
    sweep.add_argument(
        "--trials",
        type=_non_negative_int,
        help=f"Trials per point (default {DEFAULT_TRIALS})",
    )
    sweep.add_argument("--snr-db", type=float)
    sweep.add_argument("--workers", type=_positive_int, help="Worker processes")
    sweep.add_argument("--progress", action="store_true", help="Show a progress bar")
    sweep.add_argument(
        "--out", type=Path, metavar="DIR", help="Report directory (default results/)"
    )

    bench = commands.add_parser("bench", help="Time the processing stages")
    bench.add_argument("--scenario", type=Path, metavar="FILE")
    bench.add_argument("--repeat", type=_positive_int, default=3)
    bench.add_argument("--out", type=Path, metavar="CSV")
    bench.add_argument(
        "--skip-exhaustive",
        action="store_true",
        help="Leave out the brute-force search oracle",
    )

    commands.add_parser("list-experiments", help="List registered experiments")
    return parser


def _suggest(error: UpsSimError) -> None:
    logger.warning(f"Suggestion: {error.get_recovery_hint()}")


def run(argv: list[str] | None = None) -> int:
    """Parse ``argv``, run the command and map failures to exit codes."""
    args = build_parser().parse_args(argv)
    configure_logging(args.debug, args.verbose)

    try:
        return COMMANDS[args.command](args)
    except (ConfigurationError, ExperimentError) as e:
        logger.error(f"Configuration error: {e}")
        _suggest(e)
        return EXIT_CONFIG
    except ValidationError as e:
        logger.error(f"Invalid override: {e}")
        return EXIT_CONFIG
    except (DetectionError, LocalizationError) as e:
        logger.error(f"{e.__class__.__name__}: {e}")
        _suggest(e)
        return EXIT_DETECTION
    except OSError as e:
        logger.error(f"File system error: {e}")
        return EXIT_CONFIG
    except KeyboardInterrupt:
        logger.error("Interrupted")
        return EXIT_INTERRUPTED
    except Exception as e:
        logger.error(f"Unexpected error: {e}")
        if args.debug:
            logger.exception("Full traceback:")
        return EXIT_UNEXPECTED


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
