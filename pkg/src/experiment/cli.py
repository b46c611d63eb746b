"""
Subband DBP experiment runner

Usage:
  subband-dbp gen-data                       # simulate the training dataset
  subband-dbp train                          # train, threshold and checkpoint the engine
  subband-dbp eval --plot                    # SNR versus launch power for every method
  subband-dbp complexity                     # RMs per subband and step
  subband-dbp selftest                       # oracle and gradient checks

Exit codes:
  0  success
  1  self-test failure
  2  bad configuration or usage
  3  digest mismatch between artifacts and configuration
  4  I/O error (missing input, existing output without --force)
"""

import argparse
import dataclasses
import logging
import sys
from pathlib import Path

from ..config.settings import ExperimentConfig, bundled_config, load_config
from ..training.sparsity import threshold_sparsify
from ..training.trainer import check_digest, train
from ..utils.enums import Method, Scale
from ..utils.errors import ConfigurationError, ContainerError, DigestMismatchError, EngineError
from ..utils.logging import setup_logger
from .checkpoint import load_checkpoint, save_checkpoint
from .complexity import rm_report, with_fd_baseline
from .container import atomic_write, ensure_writable
from .dataset import generate_dataset, load_dataset, save_dataset
from .evaluate import evaluate_methods, plot_results, write_results_csv
from .pipeline import ExperimentSystem, build_system
from .reports import rm_markdown, write_json
from .selftest import format_results, run_selftest

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_SELFTEST = 1
EXIT_CONFIG = 2
EXIT_DIGEST = 3
EXIT_IO = 4

DATASET_FILE = "dataset.sbd"
CHECKPOINT_FILE = "checkpoint.sbd"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="subband-dbp",
        description="Subband time-domain digital backpropagation experiments",
        epilog="Exit codes:" + __doc__.split("Exit codes:")[1],
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    source = parser.add_mutually_exclusive_group()
    source.add_argument("--config", type=Path, help="YAML configuration file")
    source.add_argument(
        "--scale",
        choices=[s.value for s in Scale],
        default=Scale.DESK.value,
        help="Bundled configuration",
    )
    parser.add_argument("--out", type=Path, default=Path("results"), help="Output directory")
    parser.add_argument("--seed", type=int, help="Override the training and evaluation seed")
    parser.add_argument("--force", action="store_true", help="Overwrite existing outputs")
    parser.add_argument("--threads", type=int, default=1, help="Worker threads")
    parser.add_argument("--log-level", help="Override the configured log level")

    sub = parser.add_subparsers(dest="command", required=True)
    gen = sub.add_parser("gen-data", help="Forward-simulate a dataset")
    gen.add_argument("--records", type=int, help="Number of records")
    gen.add_argument("--power-dbm", type=float, help="Launch power")

    fit = sub.add_parser("train", help="Train the subband engine")
    fit.add_argument("--dataset", type=Path, help=f"Dataset file (default OUT/{DATASET_FILE})")
    fit.add_argument("--iterations", type=int, help="Override training.iterations")
    fit.add_argument(
        "--allow-digest-mismatch", action="store_true", help="Train on data from another channel"
    )

    ev = sub.add_parser("eval", help="Launch-power sweep")
    ev.add_argument("--checkpoint", type=Path, help=f"Checkpoint (default OUT/{CHECKPOINT_FILE})")
    ev.add_argument("--powers", help="Comma-separated launch powers in dBm")
    ev.add_argument(
        "--methods", help="Comma-separated methods: " + ", ".join(m.value for m in Method)
    )
    ev.add_argument("--plot", action="store_true", help="Also render results.png")
    ev.add_argument(
        "--allow-digest-mismatch",
        action="store_true",
        help="Evaluate a checkpoint from another channel",
    )

    cx = sub.add_parser("complexity", help="Real-multiplication report")
    cx.add_argument(
        "--checkpoint", type=Path, help="Checkpoint; the initial engine is used if absent"
    )

    sub.add_parser("selftest", help="Run the oracle and gradient checks")
    return parser


def resolve_config(args: argparse.Namespace) -> ExperimentConfig:
    """Configuration with command-line overrides applied."""
    path = args.config if args.config is not None else bundled_config(Scale(args.scale))
    config = load_config(path.resolve())
    overrides: dict = {}
    if args.seed is not None:
        overrides["training"] = dataclasses.replace(config.training, seed=args.seed)
    if getattr(args, "iterations", None) is not None:
        base = overrides.get("training", config.training)
        overrides["training"] = dataclasses.replace(base, iterations=args.iterations)
    if getattr(args, "power_dbm", None) is not None:
        overrides["dataset"] = dataclasses.replace(config.dataset, power_dbm=args.power_dbm)
    if getattr(args, "records", None) is not None:
        base = overrides.get("dataset", config.dataset)
        overrides["dataset"] = dataclasses.replace(base, records=args.records)
    if not overrides:
        return config
    config = dataclasses.replace(config, **overrides)
    config.validate()
    return config


def cmd_gen_data(
    args: argparse.Namespace, config: ExperimentConfig, system: ExperimentSystem
) -> int:
    path = args.out / DATASET_FILE
    ensure_writable(path, args.force)
    dataset = generate_dataset(system, threads=args.threads)
    save_dataset(path, dataset, force=args.force)
    print(f"Dataset: {path} ({len(dataset)} records, digest {dataset.digest[:12]})")
    return EXIT_OK


def cmd_train(
    args: argparse.Namespace, config: ExperimentConfig, system: ExperimentSystem
) -> int:
    outputs = [args.out / CHECKPOINT_FILE, args.out / "curves.csv", args.out / "sparsity.json"]
    for path in outputs:
        ensure_writable(path, args.force)
    dataset = load_dataset(args.dataset or args.out / DATASET_FILE)
    training, validation = dataset.split(config.dataset.validation_records)
    params, curves = train(
        config.training,
        [system.batch_item(r.tx, r.rx) for r in training],
        system.initial_params(),
        system.loss_graph(),
        validation=[system.batch_item(r.tx, r.rx) for r in validation],
        threads=args.threads,
        dataset_digest=dataset.digest,
        expected_digest=config.channel_digest(),
        allow_digest_mismatch=args.allow_digest_mismatch,
    )
    params, sparsity = threshold_sparsify(params, config.training.tau)
    save_checkpoint(
        outputs[0],
        params,
        config.channel_digest(),
        force=args.force,
        meta={"config_digest": config.digest(), "dataset_digest": dataset.digest},
    )
    curves.write_csv(outputs[1])
    write_json(sparsity, outputs[2])
    final_loss = curves.rows[-1]["loss"] if curves.rows else "n/a"
    print(
        f"Checkpoint: {outputs[0]} "
        f"(nonzero MIMO {sparsity.total_nonzero}/{sparsity.total_coefficients}, "
        f"final loss {final_loss})"
    )
    return EXIT_OK


def _load_params(path: Path, config: ExperimentConfig, allow_mismatch: bool):
    params, container = load_checkpoint(path)
    check_digest(container.digest, config.channel_digest(), allow_mismatch)
    return params


def cmd_eval(
    args: argparse.Namespace, config: ExperimentConfig, system: ExperimentSystem
) -> int:
    methods = config.evaluation.methods
    if args.methods:
        methods = [Method(m.strip()) for m in args.methods.split(",")]
    powers = config.evaluation.powers_dbm
    if args.powers:
        powers = [float(p) for p in args.powers.split(",")]
    csv_path, png_path = args.out / "results.csv", args.out / "results.png"
    ensure_writable(csv_path, args.force)
    if args.plot:
        ensure_writable(png_path, args.force)

    params = None
    if Method.SUBBAND_TDDBP in methods:
        checkpoint = args.checkpoint or args.out / CHECKPOINT_FILE
        params = _load_params(checkpoint, config, args.allow_digest_mismatch)
        params.check_layout(system.layout)
    rows = evaluate_methods(
        system, params, powers, methods, seed=config.training.seed, threads=args.threads
    )
    write_results_csv(rows, csv_path)
    if args.plot:
        plot_results(rows, png_path)
    for row in rows:
        print(f"{row.power_dbm:6.1f} dBm  {row.method.value:14s}  {row.snr_db:7.2f} dB")
    return EXIT_OK


def cmd_complexity(
    args: argparse.Namespace, config: ExperimentConfig, system: ExperimentSystem
) -> int:
    json_path, md_path = args.out / "complexity.json", args.out / "complexity.md"
    ensure_writable(json_path, args.force)
    ensure_writable(md_path, args.force)
    if args.checkpoint is not None:
        params = _load_params(args.checkpoint, config, allow_mismatch=True)
    else:
        params = system.initial_params()
    report = with_fd_baseline(
        rm_report(params, system.layout), config.evaluation.fd_fft_size, config.evaluation.fd_memory
    )
    write_json(report, json_path)
    markdown = rm_markdown(report)
    atomic_write(md_path, markdown.encode())
    print(markdown)
    return EXIT_OK


COMMANDS = {
    "gen-data": cmd_gen_data,
    "train": cmd_train,
    "eval": cmd_eval,
    "complexity": cmd_complexity,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = resolve_config(args)
        setup_logger("src", args.log_level or config.logging.level, config.logging.format)
        if args.command == "selftest":
            results = run_selftest(seed=config.training.seed)
            print(format_results(results))
            return EXIT_OK if all(r.passed for r in results) else EXIT_SELFTEST
        system = build_system(config)
        return COMMANDS[args.command](args, config, system)
    except DigestMismatchError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_DIGEST
    except (ConfigurationError, EngineError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except (ContainerError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_IO
