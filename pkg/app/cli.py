"""
Command-line front end.

    gle-lab <subcommand> --config PATH [--out DIR] [--set key=value ...] [--threads N] [--seed N]

Every subcommand loads the run config, builds the kernel and model, runs one
stage (``report`` chains them all) and writes CSV/JSON artifacts into the
output directory. Exit codes: 0 success, 1 invalid input, 2 numerical
failure, 3 assumption violation. Values that miss their tolerance still land
in the artifacts, and the command then exits 2.
"""

import argparse
import logging
import os
import sys
from collections.abc import Callable, Sequence
from pathlib import Path

from shared import __version__
from shared.config import RunConfig, load_run_config
from shared.errors import InvalidInputError, LabError, NumericalError
from shared.kernels import KernelRegistry, MemoryKernel
from shared.tools.artifact_writer import ArtifactMetadata, write_csv, write_json
from shared.utils.config_validator import validate_output_dir
from stages.assumption_check import validate_assumptions
from stages.msd_engine import asymptotic_constant, classify_from_msd, conjecture_check, deviation_fit, msd_curve
from stages.orchestrator import build_report
from stages.oscillatory_transform import transform_grid
from stages.path_simulator import empirical_msd, simulate, tamsd
from stages.spectral_density import SpectralModel, rhat_grid

logger = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        raise InvalidInputError(message)


class Context:
    """Resolved config, kernel, model and artifact settings shared by the subcommands."""

    def __init__(self, config: RunConfig, out: Path):
        self.config = config
        self.out = out
        self.metadata = ArtifactMetadata(config_sha256=config.sha256)
        self.kernel: MemoryKernel = KernelRegistry.instance().from_config(config.kernel)
        self.model = SpectralModel(self.kernel, m=config.model.m, beta=config.model.beta)

    def _checked(self, status: dict) -> str:
        if status["status"] != "success":
            raise InvalidInputError(f"Cannot write {status['file_path']}: {status['error']}")
        logger.info("Artifact: %s", status["file_path"])
        return status["file_path"]

    def csv(self, name: str, header: Sequence[str], rows) -> str:
        return self._checked(write_csv(self.out / name, header, rows, self.metadata))

    def json(self, name: str, payload: dict) -> str:
        return self._checked(write_json(self.out / name, payload, self.metadata))


def _require_tolerance(what: str, missed: int, total: int) -> None:
    if missed:
        raise NumericalError(f"{missed} of {total} {what} missed the requested tolerance (artifacts were written)")


def cmd_validate(ctx: Context) -> None:
    section = ctx.config.validate_
    report = validate_assumptions(ctx.kernel, section.times, section.omegas or None, section.tol)
    ctx.json("validate.json", report.as_dict())
    report.raise_on_fail()


def cmd_transform(ctx: Context) -> None:
    section = ctx.config.transform
    rows = transform_grid(ctx.kernel, section.omegas, section.tol, ctx.config.threads)
    header = ["omega", "kcos", "kcos_err", "ksin", "ksin_err", "converged", "error"]

    def cells():
        for row in rows:
            if row.error:
                yield row.omega, None, None, None, None, False, row.error
            else:
                converged = row.kcos.converged and row.ksin.converged
                yield row.omega, row.kcos.value, row.kcos.abs_error, row.ksin.value, row.ksin.abs_error, converged, None

    ctx.csv("transform.csv", header, cells())
    missed = sum(bool(row.error) or not (row.kcos.converged and row.ksin.converged) for row in rows)
    _require_tolerance("transform frequencies", missed, len(rows))


def cmd_spectrum(ctx: Context) -> None:
    section = ctx.config.spectrum
    values = rhat_grid(ctx.model, section.omegas, section.tol, ctx.config.threads)
    rows = [(v.omega, v.rhat, v.abs_error, v.kcos, v.ksin, v.converged) for v in values]
    ctx.csv("spectrum.csv", ["omega", "rhat", "rhat_err", "kcos", "ksin", "converged"], rows)
    _require_tolerance("spectrum frequencies", sum(not v.converged for v in values), len(values))


def _curve(ctx: Context):
    return msd_curve(ctx.model, ctx.config.msd.times, ctx.config.msd.tol, threads=ctx.config.threads)


def cmd_msd(ctx: Context) -> None:
    curve = _curve(ctx)
    ctx.csv("msd.csv", ["t", "msd", "msd_err", "trend", "ratio"], curve.rows())
    _require_tolerance("MSD times", curve.converged.count(False), len(curve))


def cmd_asymptote(ctx: Context) -> None:
    ctx.json("asymptote.json", {"asymptote": asymptotic_constant(ctx.model).as_dict(), "model": ctx.model.describe()})


def cmd_deviation(ctx: Context) -> None:
    curve = _curve(ctx)
    if curve.asymptote is None:
        raise InvalidInputError(f"No asymptotic law for {ctx.kernel.name}")
    payload = {
        "asymptote": curve.asymptote.as_dict(),
        "deviation": deviation_fit(curve, curve.asymptote, ctx.config.deviation.slack).as_dict(),
    }
    try:
        payload["classification"] = classify_from_msd(curve).as_dict()
        payload["conjecture"] = conjecture_check(curve, ctx.kernel).as_dict()
    except InvalidInputError as e:
        logger.warning("Skipping MSD classification: %s", e)
    ctx.json("deviation.json", payload)
    _require_tolerance("MSD times", curve.converged.count(False), len(curve))


def _ensemble(ctx: Context):
    section = ctx.config.simulate
    return simulate(
        ctx.model,
        section.times,
        modes=section.modes,
        omega_max=section.omega_max,
        seed=ctx.config.require_seed(),
        paths=section.paths,
        bias_budget=section.bias_budget,
        threads=ctx.config.threads,
    )


def cmd_simulate(ctx: Context) -> None:
    ensemble = _ensemble(ctx)
    ctx.csv("paths.csv", ["path_id", "t", "x"], ensemble.rows())
    if ensemble.n_paths >= 2:
        moments = empirical_msd(ensemble)
        rows = zip(moments.times, moments.mean, moments.stderr, strict=True)
        ctx.csv("empirical_msd.csv", ["t", "msd", "stderr"], rows)
    ctx.json("simulate.json", {"seed": ensemble.seed, "paths": ensemble.n_paths, "grid": ensemble.grid.describe()})


def cmd_tamsd(ctx: Context) -> None:
    curve = tamsd(_ensemble(ctx), ctx.config.tamsd.lags)
    ctx.csv("tamsd.csv", ["lag", "mean", "stderr"], curve.rows())


def cmd_report(ctx: Context) -> None:
    report = build_report(ctx.config, ctx.kernel, ctx.model)
    ctx.json("report.json", report.model_dump())
    unmet = report.unmet_tolerances()
    if unmet:
        raise NumericalError("; ".join(f"{c.name}: {c.detail}" for c in unmet))


COMMANDS: dict[str, Callable[[Context], None]] = {
    "validate": cmd_validate,
    "transform": cmd_transform,
    "spectrum": cmd_spectrum,
    "msd": cmd_msd,
    "asymptote": cmd_asymptote,
    "deviation": cmd_deviation,
    "simulate": cmd_simulate,
    "tamsd": cmd_tamsd,
    "report": cmd_report,
}


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", required=True, help="run config file (dotted key = value lines)")
    common.add_argument("--out", default=None, help="output directory (default: output.dir or ./results)")
    common.add_argument("--set", action="append", default=[], metavar="KEY=VALUE", help="override a config key")
    common.add_argument("--threads", type=int, default=None, help="worker threads, 0 = all cores")
    common.add_argument("--seed", type=int, default=None, help="simulation seed")

    parser = _Parser(prog="gle-lab", description="GLE memory-kernel numerical laboratory")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="SUBCOMMAND")
    for name in COMMANDS:
        sub.add_parser(name, parents=[common], help=f"run the {name} stage")
    return parser


def exit_code_for(error: BaseException) -> int:
    """Map a failure to the process exit code; never exposes a traceback."""
    if isinstance(error, LabError):
        return error.exit_code
    if isinstance(error, OSError):
        return 1
    return 2


def run(
    command: str,
    config_path: str,
    overrides: Sequence[str] = (),
    out: str | None = None,
    threads: int | None = None,
    seed: int | None = None,
) -> int:
    """Run one subcommand and return its exit code."""
    try:
        if command not in COMMANDS:
            raise InvalidInputError(f"Unknown subcommand {command!r}; choose from {', '.join(COMMANDS)}")
        config = load_run_config(config_path, overrides, threads=threads, seed=seed)
        target = Path(out or config.output.dir)
        ok, message = validate_output_dir(target)
        if not ok:
            raise InvalidInputError(message)
        logger.info("Running %s for %s", command, config_path)
        COMMANDS[command](Context(config, target))
    except Exception as e:
        code = exit_code_for(e)
        if not isinstance(e, LabError | OSError):
            logger.debug("Unexpected failure", exc_info=True)
        logger.error("%s failed: %s", command, e)
        print(f"error: {e}", file=sys.stderr)
        return code
    logger.info("%s finished", command)
    return 0


def configure_logging() -> None:
    level = os.environ.get("GLELAB_LOG_LEVEL", "INFO").upper()
    logging.basicConfig(level=getattr(logging, level, logging.INFO), format=LOG_FORMAT)


def main(argv: Sequence[str] | None = None) -> int:
    configure_logging()
    try:
        args = build_parser().parse_args(argv)
    except InvalidInputError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    return run(args.command, args.config, args.set, args.out, args.threads, args.seed)


if __name__ == "__main__":
    sys.exit(main())
