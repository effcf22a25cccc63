"""Command-line entry point for the CNN performance model."""

import argparse
import logging
import sys
from typing import Callable, Dict, List, NoReturn, Optional, Sequence, Tuple

import polars as pl
from pydantic import ValidationError

from perfmodel.analysis.archmodel import compare_with_reference, count_ops, op_table, ops_ratio
from perfmodel.analysis.evaluation import (
    SWEEP_SCHEMA,
    accuracy_frame,
    evaluate,
    reproduce_scale_grid,
    reproduce_thread_sweep,
    scale_grid_pivot,
    sweep_scale,
    sweep_threads,
)
from perfmodel.analysis.hardware import contention_table, fit_contention
from perfmodel.analysis.predictor import Contention, calibrate_operation_factor, predict
from perfmodel.data.dataset import (
    architecture_for,
    contention_for,
    dataset_frame,
    default_workload,
    get_dataset,
    load_architecture,
    params_a_for,
    params_b_for,
)
from perfmodel.data.measurements import read_measured_runs
from perfmodel.data.models import (
    ChunkMode,
    ModelParamsA,
    ModelParamsB,
    PaperDataset,
    Prediction,
    Strategy,
)
from perfmodel.errors import DatasetError, PerfModelError
from perfmodel.utils.config import (
    API_DEBUG,
    API_HOST,
    API_PORT,
    DEFAULT_CHUNK_MODE,
    DEFAULT_FORMAT,
    DEFAULT_PRESET,
    LOG_LEVEL,
)
from perfmodel.utils.logging import setup_logging
from perfmodel.utils.reporting import FORMATS, emit

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_IO = 2

DEFAULT_THREADS = "480,960,1920,3840"
DEFAULT_ARCHS = "small,medium,large"
DEFAULT_IMAGES = "60000:10000,120000:20000,240000:40000"
DEFAULT_EPOCHS = "70,140,280"
DEFAULT_GRID_THREADS = "240,480"

# Model field -> command-line flag, for naming the flag in validation errors.
FLAG_NAMES = {
    "i": "--i",
    "it": "--it",
    "ep": "--ep",
    "p": "--p",
    "ns": "--ns",
    "prep_ops": "--prep-ops",
    "fprop_ops": "--fprop-ops",
    "bprop_ops": "--bprop-ops",
    "operation_factor": "--operation-factor",
    "t_prep_s": "--t-prep",
    "t_fprop_s": "--t-fprop",
    "t_bprop_s": "--t-bprop",
}


class CliParser(argparse.ArgumentParser):
    """ArgumentParser that reports usage errors with the validation exit code."""

    def error(self, message: str) -> NoReturn:
        self.print_usage(sys.stderr)
        self.exit(EXIT_VALIDATION, f"{self.prog}: error: {message}\n")


def _int_list(text: str) -> List[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError as e:
        raise argparse.ArgumentTypeError(
            f"expected comma-separated integers, got '{text}'"
        ) from e


def _name_list(text: str) -> List[str]:
    return [part.strip() for part in text.split(",") if part.strip()]


def _image_pairs(text: str) -> List[Tuple[int, int]]:
    pairs = []
    for part in _name_list(text):
        try:
            i, it = part.split(":")
            pairs.append((int(i), int(it)))
        except ValueError as e:
            raise argparse.ArgumentTypeError(f"expected i:it pairs, got '{part}'") from e
    return pairs


def describe_validation_error(error: ValidationError) -> str:
    """One line per failed field, naming the command-line flag where there is one."""
    messages = []
    for detail in error.errors():
        field = str(detail["loc"][-1]) if detail["loc"] else ""
        name = FLAG_NAMES.get(field, field)
        messages.append(f"{name}: {detail['msg']}" if name else detail["msg"])
    return "; ".join(messages)


def _add_workload_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--i", type=int, default=None, help="Training images")
    parser.add_argument("--it", type=int, default=None, help="Test images")
    parser.add_argument("--ep", type=int, default=None, help="Epochs")
    parser.add_argument(
        "--chunk-mode",
        choices=[m.value for m in ChunkMode],
        default=DEFAULT_CHUNK_MODE,
        help="Images per thread: exact quotient or ceiling",
    )


def parse_args(args: Sequence[str]) -> argparse.Namespace:
    """Parse command line arguments.

    Args:
        args: Command line arguments

    Returns:
        Parsed arguments
    """
    parser = CliParser(
        prog="perfmodel",
        description="Predict CNN training time on many-core processors",
    )
    parser.add_argument(
        "--preset", default=DEFAULT_PRESET, help="Parameter preset (paper, paper-tableIX)"
    )
    parser.add_argument("--config", default=None, help="Dataset document to use instead of the bundled one")
    parser.add_argument("--format", choices=FORMATS, default=DEFAULT_FORMAT, help="Output format")
    parser.add_argument("--out", default=None, help="Output file (stdout if not specified)")
    parser.add_argument(
        "--log-level",
        type=str,
        default=LOG_LEVEL,
        choices=["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"],
        help="Logging level",
    )
    parser.add_argument(
        "--log-file", type=str, default=None, help="Log file path (logs to stderr if not specified)"
    )
    commands = parser.add_subparsers(dest="command", required=True, parser_class=CliParser)

    p = commands.add_parser("predict", help="Predict one workload")
    p.add_argument("--strategy", choices=[s.value for s in Strategy], required=True)
    p.add_argument("--arch", required=True, help="Architecture name")
    p.add_argument("--p", type=int, required=True, help="Threads")
    _add_workload_flags(p)
    p.add_argument("--ns", type=int, default=None, help="Network instances (default: p)")
    p.add_argument("--prep-ops", type=float, default=None)
    p.add_argument("--fprop-ops", type=float, default=None)
    p.add_argument("--bprop-ops", type=float, default=None)
    p.add_argument("--operation-factor", type=float, default=None)
    p.add_argument("--t-prep", type=float, default=None, help="Preparation time (s)")
    p.add_argument("--t-fprop", type=float, default=None, help="Forward time per image (s)")
    p.add_argument("--t-bprop", type=float, default=None, help="Backward time per image (s)")
    p.add_argument("--contention", type=float, default=None, help="Fixed contention (s)")
    p.add_argument("--cpi", type=float, default=None, help="CPI override")
    p.set_defaults(handler=cmd_predict)

    p = commands.add_parser("sweep", help="Predict both strategies over thread counts")
    p.add_argument("--threads", type=_int_list, default=_int_list(DEFAULT_THREADS))
    p.add_argument("--archs", type=_name_list, default=_name_list(DEFAULT_ARCHS))
    _add_workload_flags(p)
    p.set_defaults(handler=cmd_sweep)

    p = commands.add_parser("scale-grid", help="Strategy (a) over images x epochs x threads")
    p.add_argument("--arch", default="small")
    p.add_argument("--images", type=_image_pairs, default=_image_pairs(DEFAULT_IMAGES))
    p.add_argument("--epochs", type=_int_list, default=_int_list(DEFAULT_EPOCHS))
    p.add_argument("--threads", type=_int_list, default=_int_list(DEFAULT_GRID_THREADS))
    p.add_argument("--pivot", action="store_true", help="Images as rows, threads x epochs as columns")
    p.add_argument(
        "--chunk-mode", choices=[m.value for m in ChunkMode], default=DEFAULT_CHUNK_MODE
    )
    p.set_defaults(handler=cmd_scale_grid)

    p = commands.add_parser("fit-contention", help="Contention at unmeasured thread counts")
    p.add_argument("--arch", required=True)
    p.add_argument("--predict", type=_int_list, default=_int_list(DEFAULT_THREADS))
    p.add_argument("--fit-range", type=int, default=None, help="Only fit samples with p <= this")
    p.set_defaults(handler=cmd_fit_contention)

    p = commands.add_parser("count-ops", help="Per-layer neurons, weights and operations")
    source = p.add_mutually_exclusive_group()
    source.add_argument("--arch", help="Bundled architecture name")
    source.add_argument("--arch-file", help="Architecture document")
    view = p.add_mutually_exclusive_group()
    view.add_argument("--compare", action="store_true", help="Compare with the bundled totals")
    view.add_argument("--ratios", action="store_true", help="Growth of bundled totals")
    p.set_defaults(handler=cmd_count_ops)

    p = commands.add_parser("calibrate", help="Solve the OperationFactor for one measurement")
    p.add_argument("--arch", required=True)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--measured", type=float, required=True, help="Measured time (s)")
    _add_workload_flags(p)
    p.set_defaults(handler=cmd_calibrate)

    p = commands.add_parser("validate", help="Accuracy against measured runs")
    p.add_argument("measured_csv", help="CSV with header arch,p,i,it,ep,measured_s")
    p.add_argument("--strategy", choices=[s.value for s in Strategy] + ["both"], default="both")
    p.add_argument("--summary", action="store_true", help="Only the average deltas")
    p.add_argument(
        "--chunk-mode", choices=[m.value for m in ChunkMode], default=DEFAULT_CHUNK_MODE
    )
    p.set_defaults(handler=cmd_validate)

    p = commands.add_parser("dataset", help="Bundled constants with citations")
    p.set_defaults(handler=cmd_dataset)

    p = commands.add_parser("reproduce", help="Compare predictions with published tables")
    p.add_argument("table", choices=["threads", "scale"])
    p.add_argument(
        "--chunk-mode", choices=[m.value for m in ChunkMode], default=DEFAULT_CHUNK_MODE
    )
    p.set_defaults(handler=cmd_reproduce)

    p = commands.add_parser("serve", help="Run the HTTP API")
    p.add_argument("--host", type=str, default=API_HOST, help="Host to run the API server on")
    p.add_argument("--port", type=int, default=API_PORT, help="Port to run the API server on")
    p.add_argument("--debug", action="store_true", default=API_DEBUG, help="Enable debug mode")
    p.set_defaults(handler=cmd_serve)

    return parser.parse_args(args)


def _known_arch(dataset: PaperDataset, name: str, flag: str = "--arch") -> str:
    """Return name if the dataset has workload defaults for it; the error names the flag."""
    if name not in dataset.workloads:
        known = ", ".join(sorted(dataset.workloads))
        raise PerfModelError(f"{flag}: unknown architecture '{name}' (known: {known})")
    return name


def _prediction_frame(prediction: Prediction) -> pl.DataFrame:
    phases = [*prediction.phase_breakdown.items(), ("total", prediction.total_s)]
    return pl.DataFrame(
        {
            "phase": [name for name, _ in phases],
            "seconds": [value for _, value in phases],
            "minutes": [value / 60.0 for _, value in phases],
        },
        schema={"phase": pl.Utf8, "seconds": pl.Float64, "minutes": pl.Float64},
    )


def _overridden(
    model: ModelParamsA | ModelParamsB, values: Dict[str, Optional[float]]
) -> ModelParamsA | ModelParamsB:
    updates = {k: v for k, v in values.items() if v is not None}
    if not updates:
        return model
    return type(model).model_validate({**model.model_dump(), **updates})


def cmd_predict(args: argparse.Namespace, dataset: PaperDataset) -> None:
    strategy = Strategy(args.strategy)
    _known_arch(dataset, args.arch)
    w = default_workload(dataset, args.arch, args.p, i=args.i, it=args.it, ep=args.ep, ns=args.ns)
    if w.ns != w.p:
        logger.warning(f"--ns={w.ns} is recorded only; the model runs one network instance per thread")
    if args.cpi is not None and args.cpi < 1:
        raise PerfModelError(f"--cpi: must be >= 1, got {args.cpi}")
    if args.contention is not None and args.contention < 0:
        raise PerfModelError(f"--contention: must be >= 0, got {args.contention}")

    params: ModelParamsA | ModelParamsB
    if strategy is Strategy.A:
        params = _overridden(
            params_a_for(dataset, args.arch),
            {
                "prep_ops": args.prep_ops,
                "fprop_ops": args.fprop_ops,
                "bprop_ops": args.bprop_ops,
                "operation_factor": args.operation_factor,
            },
        )
    else:
        params = _overridden(
            params_b_for(dataset, args.arch),
            {"t_prep_s": args.t_prep, "t_fprop_s": args.t_fprop, "t_bprop_s": args.t_bprop},
        )

    contention: Contention = (
        args.contention if args.contention is not None else contention_for(dataset, args.arch)
    )
    prediction = predict(
        strategy, w, params, dataset.hardware, contention, ChunkMode(args.chunk_mode), args.cpi
    )
    title = (
        f"strategy {strategy.value} | {w.architecture_name} | p={w.p} i={w.i} it={w.it} "
        f"ep={w.ep} | cpi={prediction.cpi_used:g} ({prediction.threads_per_core} threads/core) "
        f"| contention={prediction.contention_s:.2e} s"
    )
    emit(_prediction_frame(prediction), args.format, args.out, title=title)


def cmd_sweep(args: argparse.Namespace, dataset: PaperDataset) -> None:
    frames = [pl.DataFrame(schema=SWEEP_SCHEMA)]
    for arch in args.archs:
        _known_arch(dataset, arch, "--archs")
        # p is replaced per row
        template = default_workload(dataset, arch, 1, i=args.i, it=args.it, ep=args.ep)
        frames.append(
            sweep_threads(
                args.threads,
                template,
                params_a_for(dataset, arch),
                params_b_for(dataset, arch),
                dataset.hardware,
                contention_for(dataset, arch),
                ChunkMode(args.chunk_mode),
            )
        )
    emit(pl.concat(frames), args.format, args.out)


def cmd_scale_grid(args: argparse.Namespace, dataset: PaperDataset) -> None:
    _known_arch(dataset, args.arch)
    grid = sweep_scale(
        args.images,
        args.epochs,
        args.threads,
        default_workload(dataset, args.arch, 1),
        params_a_for(dataset, args.arch),
        dataset.hardware,
        contention_for(dataset, args.arch),
        ChunkMode(args.chunk_mode),
    )
    pivot = args.pivot and not grid.is_empty()
    emit(scale_grid_pivot(grid) if pivot else grid, args.format, args.out)


def cmd_fit_contention(args: argparse.Namespace, dataset: PaperDataset) -> None:
    profile = contention_for(dataset, _known_arch(dataset, args.arch))
    fit = fit_contention(profile, args.fit_range)
    title = f"{args.arch}: contention = {fit.slope:.4e} * p + {fit.intercept:.4e}"
    logger.info(title)
    emit(contention_table(profile, args.predict), args.format, args.out, title=title)


def cmd_count_ops(args: argparse.Namespace, dataset: PaperDataset) -> None:
    if args.ratios:
        order = [name for name in _name_list(DEFAULT_ARCHS) if name in dataset.reference_ops]
        emit(ops_ratio(dataset.reference_ops, order), args.format, args.out)
        return

    if args.arch_file:
        arch = load_architecture(args.arch_file)
    elif args.arch:
        try:
            arch = architecture_for(dataset, args.arch)
        except DatasetError as e:
            raise PerfModelError(f"--arch: {e}") from e
    else:
        raise PerfModelError("one of --arch or --arch-file is required unless --ratios is given")
    if args.compare:
        if arch.name not in dataset.reference_ops:
            raise PerfModelError(f"no bundled op totals for architecture '{arch.name}'")
        emit(compare_with_reference(arch, dataset.reference_ops[arch.name]), args.format, args.out)
        return

    counts = count_ops(arch)
    title = f"{arch.name}: fprop={counts.fprop_ops} bprop={counts.bprop_ops} ops per image"
    if arch.reconstructed:
        title += " (reconstructed layout)"
    emit(op_table(arch), args.format, args.out, title=title)


def cmd_calibrate(args: argparse.Namespace, dataset: PaperDataset) -> None:
    _known_arch(dataset, args.arch)
    w = default_workload(dataset, args.arch, args.p, i=args.i, it=args.it, ep=args.ep)
    factor = calibrate_operation_factor(
        args.measured,
        w,
        params_a_for(dataset, args.arch),
        dataset.hardware,
        contention_for(dataset, args.arch),
        ChunkMode(args.chunk_mode),
    )
    frame = pl.DataFrame(
        {
            "architecture": [args.arch],
            "p": [args.p],
            "measured_s": [args.measured],
            "operation_factor": [factor],
        },
        schema={
            "architecture": pl.Utf8,
            "p": pl.Int64,
            "measured_s": pl.Float64,
            "operation_factor": pl.Float64,
        },
    )
    emit(frame, args.format, args.out)


def cmd_validate(args: argparse.Namespace, dataset: PaperDataset) -> None:
    runs = read_measured_runs(args.measured_csv)
    strategies = list(Strategy) if args.strategy == "both" else [Strategy(args.strategy)]
    contention = {profile.architecture_name: profile for profile in dataset.contention}
    mode = ChunkMode(args.chunk_mode)

    reports = []
    for strategy in strategies:
        params = dataset.params_a if strategy is Strategy.A else dataset.params_b
        reports.append(evaluate(runs, strategy, params, dataset.hardware, contention, mode))

    if args.summary:
        rows = []
        for report in reports:
            for arch, average in sorted(report.per_architecture.items()):
                rows.append((report.strategy.value, arch, average))
            rows.append((report.strategy.value, "all", report.average_delta_percent))
        frame = pl.DataFrame(
            rows,
            schema={"strategy": pl.Utf8, "architecture": pl.Utf8, "average_delta_percent": pl.Float64},
            orient="row",
        )
    else:
        frame = pl.concat([accuracy_frame(report) for report in reports])
    emit(frame, args.format, args.out)


def cmd_dataset(args: argparse.Namespace, dataset: PaperDataset) -> None:
    emit(dataset_frame(dataset), args.format, args.out)


def cmd_reproduce(args: argparse.Namespace, dataset: PaperDataset) -> None:
    published = dataset.published
    mode = ChunkMode(args.chunk_mode)
    if args.table == "threads":
        frames = []
        for arch, by_strategy in published.thread_sweep.items():
            threads = sorted({p for table in by_strategy.values() for p in table})
            sweep = sweep_threads(
                threads,
                default_workload(dataset, arch, threads[0]),
                params_a_for(dataset, arch),
                params_b_for(dataset, arch),
                dataset.hardware,
                contention_for(dataset, arch),
                mode,
            )
            frames.append(reproduce_thread_sweep(sweep, published))
        emit(pl.concat(frames), args.format, args.out)
        return

    arch = published.scale_grid_architecture
    cells = published.scale_grid
    if not cells:
        raise PerfModelError("dataset has no published scale grid")
    images = sorted({(cell.i, cell.it) for cell in cells})
    epochs = sorted({cell.ep for cell in cells})
    threads = sorted({cell.p for cell in cells})
    grid = sweep_scale(
        images,
        epochs,
        threads,
        default_workload(dataset, arch, threads[0]),
        params_a_for(dataset, arch),
        dataset.hardware,
        contention_for(dataset, arch),
        mode,
    )
    emit(reproduce_scale_grid(grid, published), args.format, args.out)


def cmd_serve(args: argparse.Namespace, dataset: PaperDataset) -> None:
    from perfmodel.api.server import run_server

    logger.info(f"Starting CNN performance model API on {args.host}:{args.port}")
    run_server(host=args.host, port=args.port, reload=args.debug, log_level=args.log_level)


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Main entry point for the application.

    Returns:
        Exit status: 0 success, 1 validation error, 2 I/O error
    """
    args = parse_args(sys.argv[1:] if argv is None else argv)
    setup_logging(log_level=args.log_level, log_file=args.log_file)

    handler: Callable[[argparse.Namespace, PaperDataset], None] = args.handler
    try:
        dataset = get_dataset(args.preset, args.config)
        handler(args, dataset)
    except ValidationError as e:
        print(f"perfmodel: error: {describe_validation_error(e)}", file=sys.stderr)
        return EXIT_VALIDATION
    except PerfModelError as e:
        print(f"perfmodel: error: {e}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as e:
        print(f"perfmodel: error: {e}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
