"""Command-line front end.

Subcommands::

    layered-gsm synth-gsm --preset horn --output horn.gsm
    layered-gsm wmatrix --gsm horn.gsm --stack pec_far --frequency "3.5 GHz"
    layered-gsm solve --gsm horn.gsm --stack seawater --frequency "3.5 GHz"
    layered-gsm sweep --config sweep.json --threads 8 --cache-dir .wcache
    layered-gsm fit --config fit.json --output fit.json
    layered-gsm validate --l-max 8 17 --error-maps --json

Every command exits with 0 on success and 1 on a library error; ``validate``
also exits with 1 when a check fails.
"""

import argparse
import json
import logging
import sys
import time
from collections.abc import Callable, Sequence
from dataclasses import replace
from pathlib import Path

import numpy as np

from layered_gsm.files.cache import WMatrixCache
from layered_gsm.files.config import (
    GsmSource,
    OutputFormat,
    SweepConfig,
    load_document,
    load_fit_config,
    load_sweep_config,
    parse_quantity,
    parse_stack,
    parse_synthetic,
)
from layered_gsm.files.gsmio import horn_preset, write_gsm
from layered_gsm.files.writers import results_frame
from layered_gsm.solver.exceptions import LayeredGsmError, ValidationError
from layered_gsm.solver.models import LayerStack
from layered_gsm.solver.options import ComputeOptions
from layered_gsm.sweep.runner import (
    ForwardModel,
    run_fit,
    run_sweep,
    write_sweep,
)
from layered_gsm.sweep.validation import (
    CHECKS,
    DEFAULT_FREQUENCY,
    DEFAULT_L_MAX_VALUES,
    DEFAULT_MAP_KAPPA_VALUES,
    DEFAULT_MAP_L_VALUES,
    ValidationSelection,
    run_validate,
)
from layered_gsm.version import __version__

logger = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"
LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR")

Handler = Callable[[argparse.Namespace], int]


def _write(text: str) -> None:
    _ = sys.stdout.write(text if text.endswith("\n") else f"{text}\n")


def _stack_argument(value: str) -> LayerStack:
    """Named stack, or a JSON stack document when the value is a file."""
    if value.endswith(".json"):
        return parse_stack(load_document(value), value)
    return parse_stack(value)


def _cache(args: argparse.Namespace) -> WMatrixCache | None:
    if args.cache_dir is None:
        return None
    return WMatrixCache(Path(args.cache_dir))


def _compute(
    args: argparse.Namespace, compute: ComputeOptions
) -> ComputeOptions:
    if args.threads is None:
        return compute
    return replace(compute, num_workers=args.threads)


def _point_config(args: argparse.Namespace) -> SweepConfig:
    """Sweep configuration of ``solve`` and ``wmatrix`` with overrides."""
    if args.config is not None:
        config = load_sweep_config(args.config)
    elif args.gsm is not None:
        config = SweepConfig(
            source=GsmSource(path=Path(args.gsm)),
            stack=_stack_argument(args.stack or "vacuum"),
        )
    else:
        err = "Either --config or --gsm is required"
        raise ValidationError(err)
    if args.gsm is not None and args.config is not None:
        config = replace(config, source=GsmSource(path=Path(args.gsm)))
    if args.stack is not None and args.config is not None:
        config = replace(config, stack=_stack_argument(args.stack))
    if args.frequency is not None:
        frequency = parse_quantity(args.frequency, "frequency", "--frequency")
        config = replace(config, frequencies=(frequency,))
    return replace(config, compute=_compute(args, config.compute))


def cmd_synth_gsm(args: argparse.Namespace) -> int:
    """Write a synthetic GSM file."""
    if (args.config is None) == (args.preset is None):
        err = "Exactly one of --config and --preset is required"
        raise ValidationError(err)
    if args.preset is not None:
        gsm = horn_preset(seed=args.seed or 0, l_max=args.l_max)
    else:
        source = parse_synthetic(load_document(args.config))
        if args.seed is not None:
            source = replace(source, spec=replace(source.spec, seed=args.seed))
        if args.l_max is not None:
            source = replace(source, l_max=args.l_max)
        gsm = source.build()
    write_gsm(gsm, args.output)
    _write(
        f"Wrote {args.output}: {gsm.port_count} port(s), l_max={gsm.l_max}, "
        f"{len(gsm.frequencies)} frequency(ies)"
    )
    return 0


def cmd_wmatrix(args: argparse.Namespace) -> int:
    """Assemble interaction matrices and report their structure."""
    config = _point_config(args)
    gsm = config.source.load()
    model = ForwardModel(gsm, config.compute, config.solve, _cache(args))
    for frequency in config.frequencies or gsm.frequencies:
        start = time.perf_counter()
        w, hit = model.interaction(config.stack, frequency)
        elapsed = time.perf_counter() - start
        scale = max(float(np.max(np.abs(b))) for b in w.blocks.values())
        gap = max(float(np.max(np.abs(b - b.T))) for b in w.blocks.values())
        _write(
            f"{frequency:.6g} Hz  l_max={w.basis.l_max}  size={w.size}  "
            f"nonzeros={w.nonzero_count}  "
            f"symmetry={gap / scale if scale > 0 else gap:.2e}  "
            f"{'cached' if hit else 'assembled'} in {elapsed * 1e3:.1f} ms  "
            f"{w.fingerprint}"
        )
    return 0


def cmd_solve(args: argparse.Namespace) -> int:
    """Composite reflection matrix of one stack."""
    config = _point_config(args)
    if config.axes:
        err = "solve evaluates a single stack; use sweep for parameter axes"
        raise ValidationError(err)
    if args.output is not None:
        config = replace(config, output=Path(args.output))
    result = run_sweep(config, cache=_cache(args))
    if config.output is not None:
        for path in write_sweep(result, config.output, config.output_format):
            _write(f"Wrote {path}")
    else:
        _write(results_frame(result.points).to_string(index=False))
    return 0


def cmd_sweep(args: argparse.Namespace) -> int:
    """Forward sweep from a configuration document."""
    config = load_sweep_config(args.config)
    if args.gsm is not None:
        config = replace(config, source=GsmSource(path=Path(args.gsm)))
    if args.output is not None:
        config = replace(config, output=Path(args.output))
    if args.format is not None:
        config = replace(config, output_format=OutputFormat(args.format))
    config = replace(config, compute=_compute(args, config.compute))
    result = run_sweep(config, cache=_cache(args))
    if config.output is not None:
        for path in write_sweep(result, config.output, config.output_format):
            _write(f"Wrote {path}")
    else:
        frame = results_frame(result.points, result.axes)
        _write(frame.to_string(index=False))
    _write(result.timing.summary())
    return 0


def cmd_fit(args: argparse.Namespace) -> int:
    """Inverse fit from a configuration document."""
    config = load_fit_config(args.config)
    if args.gsm is not None:
        config = replace(config, source=GsmSource(path=Path(args.gsm)))
    if args.output is not None:
        config = replace(config, output=Path(args.output))
    config = replace(config, compute=_compute(args, config.compute))
    result = run_fit(config, cache=_cache(args))
    for name, value in result.parameters.items():
        _write(f"{name} = {value:.9g}")
    status = "converged" if result.converged else "not converged"
    _write(
        f"misfit {result.misfit:.3e} after {result.evaluations} "
        f"evaluation(s), {status}"
    )
    if config.output is not None:
        config.output.parent.mkdir(parents=True, exist_ok=True)
        _ = config.output.write_text(
            json.dumps(result.as_dict(), indent=2, sort_keys=True) + "\n",
            encoding="utf-8",
        )
        _write(f"Wrote {config.output}")
    return 0


def cmd_validate(args: argparse.Namespace) -> int:
    """Run the validation suite."""
    checks = tuple(args.checks.split(",")) if args.checks else CHECKS
    selection = ValidationSelection(
        checks=tuple(name.strip() for name in checks),
        l_max_values=tuple(args.l_max),
        frequency=parse_quantity(args.frequency, "frequency", "--frequency"),
        seed=args.seed,
        error_maps=args.error_maps,
        map_l_values=tuple(args.map_l),
        map_kappa_values=tuple(args.map_kappa),
        num_workers=args.threads or 1,
    )
    report = run_validate(selection)
    _write(report.to_json() if args.json else report.table())
    if args.output is not None:
        target = Path(args.output)
        target.parent.mkdir(parents=True, exist_ok=True)
        _ = target.write_text(report.to_json() + "\n", encoding="utf-8")
    return 0 if report.passed else 1


def _add_point_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="sweep configuration document")
    parser.add_argument("--gsm", help="GSM file; overrides the document")
    parser.add_argument(
        "--stack", help="built-in stack name or JSON stack document"
    )
    parser.add_argument("--frequency", help='single frequency, e.g. "3.5 GHz"')
    parser.add_argument("--cache-dir", help="interaction-matrix cache")


def build_parser() -> argparse.ArgumentParser:
    """Argument parser with every subcommand."""
    parser = argparse.ArgumentParser(
        prog="layered-gsm",
        description="Antenna reflection above planar layered media.",
    )
    parser.add_argument(
        "--version", action="version", version=f"%(prog)s {__version__}"
    )
    parser.add_argument("--log-level", choices=LOG_LEVELS, default="WARNING")
    parser.add_argument(
        "--threads", type=int, help="worker threads for sweep points"
    )
    commands = parser.add_subparsers(dest="command", required=True)

    synth = commands.add_parser("synth-gsm", help=cmd_synth_gsm.__doc__)
    synth.add_argument("--config", help="synthetic GSM document")
    synth.add_argument("--preset", choices=("horn",))
    synth.add_argument("--seed", type=int)
    synth.add_argument("--l-max", type=int)
    synth.add_argument("--output", required=True)
    synth.set_defaults(handler=cmd_synth_gsm)

    wmatrix = commands.add_parser("wmatrix", help=cmd_wmatrix.__doc__)
    _add_point_arguments(wmatrix)
    wmatrix.set_defaults(handler=cmd_wmatrix)

    solve = commands.add_parser("solve", help=cmd_solve.__doc__)
    _add_point_arguments(solve)
    solve.add_argument("--output", help="result file")
    solve.set_defaults(handler=cmd_solve)

    sweep = commands.add_parser("sweep", help=cmd_sweep.__doc__)
    sweep.add_argument("--config", required=True)
    sweep.add_argument("--gsm")
    sweep.add_argument("--cache-dir")
    sweep.add_argument("--output")
    sweep.add_argument(
        "--format", choices=[item.value for item in OutputFormat]
    )
    sweep.set_defaults(handler=cmd_sweep)

    fit = commands.add_parser("fit", help=cmd_fit.__doc__)
    fit.add_argument("--config", required=True)
    fit.add_argument("--gsm")
    fit.add_argument("--cache-dir")
    fit.add_argument("--output", help="JSON fit report")
    fit.set_defaults(handler=cmd_fit)

    validate = commands.add_parser("validate", help=cmd_validate.__doc__)
    validate.add_argument(
        "--checks", help=f"comma-separated subset of {', '.join(CHECKS)}"
    )
    validate.add_argument(
        "--l-max", type=int, nargs="+", default=list(DEFAULT_L_MAX_VALUES)
    )
    validate.add_argument("--frequency", default=f"{DEFAULT_FREQUENCY} Hz")
    validate.add_argument("--seed", type=int, default=0)
    validate.add_argument("--error-maps", action="store_true")
    validate.add_argument(
        "--map-l", type=int, nargs="+", default=list(DEFAULT_MAP_L_VALUES)
    )
    validate.add_argument(
        "--map-kappa",
        type=float,
        nargs="+",
        default=list(DEFAULT_MAP_KAPPA_VALUES),
    )
    validate.add_argument("--json", action="store_true")
    validate.add_argument("--output", help="JSON report file")
    validate.set_defaults(handler=cmd_validate)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    """Entry point of the ``layered-gsm`` console script."""
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=args.log_level, format=LOG_FORMAT)
    if args.threads is not None and args.threads < 1:
        parser.error("--threads must be at least 1")
    handler: Handler = args.handler
    try:
        return handler(args)
    except LayeredGsmError as e:
        logger.debug("Command %s failed", args.command, exc_info=True)
        _ = sys.stderr.write(f"error: {e}\n")
        return 1
    except OSError as e:
        _ = sys.stderr.write(f"error: {e}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
