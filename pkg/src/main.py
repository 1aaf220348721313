"""Command-line entry point: ``python -m src.main <command> ...``."""
import argparse
import sys
from typing import List, Optional, Tuple

import orjson

from . import __version__
from .config import get_settings
from .critical_search import SearchOptions, classify_system, is_critical
from .errors import CrossCheckError, InvalidInputError, SloccError
from .local_algebra import gell_mann_basis
from .log_buffer import log_buffer
from .logging_utils import get_logger, setup_logging
from .models import CommandName, ErrorResponse, OutputFormat, Report, RunConfig, SystemDescriptor, Tolerances
from .polytope import (
    MembershipPredicate,
    default_denominator,
    enumerate_candidates,
    inequality_predicate,
    membership_predicate,
    parse_rational_spectrum,
)
from .report_builder import ReportBuilder, log_summary, render_text
from .state_files import load_inequalities, parse_state_file, report_bytes
from .verify import run_suites

logger = get_logger(__name__)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="slocc-variance",
        description="Critical points of the total variance and SLOCC classes of pure states",
    )
    parser.add_argument("--schema", action="store_true", help="Print the report JSON schema and exit")
    parser.add_argument("--output", choices=[f.value for f in OutputFormat], default=OutputFormat.json.value)
    parser.add_argument("--log-level", default=None, help="Override SLOCC_LOG_LEVEL")
    sub = parser.add_subparsers(dest="command")

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--seed", type=int, default=None, help="Defaults to SLOCC_SEED")
        p.add_argument("--denominator", type=int, default=None, help="Grid denominator (default lcm(2N, 6))")
        p.add_argument("--tol", type=float, default=None, help="Solver tolerance")
        p.add_argument("--criticality-tol", type=float, default=None)
        p.add_argument("--index-tol", type=float, default=None)

    analyze = sub.add_parser("analyze", help="Var, momentum and Morse data of one state")
    analyze.add_argument("--state", required=True, help="State file (JSON)")
    analyze.add_argument("--fd-check", action="store_true", help="Add a finite-difference Hessian check")
    common(analyze)

    search = sub.add_parser("search", help="Sweep the polytope grid for critical states")
    search.add_argument("--system", required=True, help="kind,N,L")
    search.add_argument("--starts", type=int, default=None)
    search.add_argument("--max-iter", type=int, default=None)
    search.add_argument("--workers", type=int, default=None)
    search.add_argument("--inequalities", default=None, help="Inequality file for uncatalogued systems")
    search.add_argument("--fd-check", action="store_true")
    common(search)

    critical = sub.add_parser("critical", help="Criticality verdict for one state")
    critical.add_argument("--state", required=True)
    common(critical)

    polytope = sub.add_parser("polytope", help="Membership test or grid enumeration")
    polytope.add_argument("--system", required=True)
    group = polytope.add_mutually_exclusive_group(required=True)
    group.add_argument("--test", default=None, help="Spectra as p/q,... (N entries per component)")
    group.add_argument("--enumerate", action="store_true")
    polytope.add_argument("--inequalities", default=None)
    common(polytope)

    verify = sub.add_parser("verify", help="Run the built-in property suites")
    common(verify)

    dump = sub.add_parser("dump-generators", help="Print the su(N) generator basis")
    dump.add_argument("--dim", type=int, required=True)
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    settings = get_settings()
    system = SystemDescriptor.parse(args.system) if getattr(args, "system", None) else None
    try:
        return RunConfig(
            command=CommandName(args.command),
            system=system,
            input_path=getattr(args, "state", None),
            denominator=getattr(args, "denominator", None),
            seed=settings.default_seed if getattr(args, "seed", None) is None else args.seed,
            tolerances=Tolerances(
                criticality=getattr(args, "criticality_tol", None) or settings.criticality_tol,
                solver=getattr(args, "tol", None) or settings.solver_tol,
                index=getattr(args, "index_tol", None) or settings.index_tol,
            ),
            starts=getattr(args, "starts", None) or settings.solver_starts,
            max_iter=getattr(args, "max_iter", None) or settings.solver_max_iter,
            workers=getattr(args, "workers", None) or settings.sweep_workers,
            output=OutputFormat(args.output),
            fd_check=getattr(args, "fd_check", False),
            test_spectrum=getattr(args, "test", None),
            enumerate=getattr(args, "enumerate", False),
            inequalities_path=getattr(args, "inequalities", None),
            generators_dim=getattr(args, "dim", None),
        )
    except ValueError as exc:
        raise InvalidInputError(f"invalid arguments: {exc}") from exc


def _options(config: RunConfig) -> SearchOptions:
    return SearchOptions.create(
        seed=config.seed,
        starts=config.starts,
        max_iter=config.max_iter,
        solver_tol=config.tolerances.solver,
        criticality_tol=config.tolerances.criticality,
        index_tol=config.tolerances.index,
        workers=config.workers,
    )


def _predicate(config: RunConfig) -> MembershipPredicate:
    if config.inequalities_path:
        return inequality_predicate(load_inequalities(config.inequalities_path))
    return membership_predicate(config.system)


def _require_system(config: RunConfig) -> SystemDescriptor:
    if config.system is None:
        raise InvalidInputError(f"{config.command.value} needs --system")
    return config.system


def run(config: RunConfig) -> Tuple[Report, int]:
    """Execute one command; returns the report and the process exit code."""
    log_buffer.clear()
    options = _options(config)
    results: List = []
    exit_code = 0

    if config.command is CommandName.analyze:
        psi = parse_state_file(config.input_path)
        denominator = config.denominator or default_denominator(psi.descriptor)
        results.append(ReportBuilder.analysis(psi, denominator, options, fd_check=config.fd_check))

    elif config.command is CommandName.critical:
        psi = parse_state_file(config.input_path)
        results.append(ReportBuilder.verdict(is_critical(psi, options.criticality_tol)))

    elif config.command is CommandName.search:
        system = _require_system(config)
        denominator = config.denominator or default_denominator(system)
        points = classify_system(system, denominator, options, predicate=_predicate(config))
        results.extend(ReportBuilder.critical_point(cp, fd_check=config.fd_check) for cp in points)

    elif config.command is CommandName.polytope:
        system = _require_system(config)
        predicate = _predicate(config)
        if config.test_spectrum is not None:
            point = parse_rational_spectrum(config.test_spectrum, system)
            results.append(ReportBuilder.membership(system, point, predicate(point)))
        else:
            denominator = config.denominator or default_denominator(system)
            candidates = enumerate_candidates(system, denominator, predicate)
            results.append(ReportBuilder.enumeration(system, denominator, candidates))

    elif config.command is CommandName.verify:
        records = run_suites(config.seed, options)
        results.extend(records)
        if not all(record.passed for record in records):
            exit_code = CrossCheckError.exit_code

    elif config.command is CommandName.dump_generators:
        if config.generators_dim is None:
            raise InvalidInputError("dump-generators needs --dim")
        results.append(ReportBuilder.generators(gell_mann_basis(config.generators_dim)))

    report = Report(
        version=__version__,
        command=config.command,
        config=config.model_dump(mode="json", exclude={"command"}),
        results=results,
        warnings=sorted(log_buffer.as_strings()),
    )
    log_summary(report, exit_code)
    return report, exit_code


def _emit(report: Report, output: OutputFormat) -> None:
    if output is OutputFormat.text:
        sys.stdout.write(render_text(report))
    else:
        sys.stdout.buffer.write(report_bytes(report))
    sys.stdout.flush()


def _emit_error(error: str, code: str) -> None:
    payload = ErrorResponse(error=error, code=code).model_dump()
    sys.stdout.buffer.write(orjson.dumps(payload, option=orjson.OPT_SORT_KEYS) + b"\n")
    sys.stdout.flush()


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    setup_logging(args.log_level or get_settings().log_level)

    if args.schema:
        sys.stdout.buffer.write(orjson.dumps(Report.model_json_schema(), option=orjson.OPT_INDENT_2) + b"\n")
        return 0
    if args.command is None:
        parser.print_usage(sys.stderr)
        return InvalidInputError.exit_code

    try:
        config = config_from_args(args)
        report, exit_code = run(config)
    except SloccError as exc:
        logger.warning(
            "Command failed",
            extra={"extra_data": {"command": args.command, "error": str(exc), "code": exc.code}},
        )
        _emit_error(str(exc), exc.code)
        return exc.exit_code
    except Exception as exc:  # noqa: BLE001
        logger.error(
            "Unexpected error",
            extra={"extra_data": {"command": args.command, "error": str(exc)}},
            exc_info=True,
        )
        _emit_error("internal error", "INTERNAL_ERROR")
        return CrossCheckError.exit_code

    _emit(report, config.output)
    return exit_code


if __name__ == "__main__":
    sys.exit(main())
