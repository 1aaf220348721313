"""
Report record builders.

Turns library results (states, critical points, polytope verdicts) into the
pydantic records the CLI serializes, plus a plain-text class table.
"""
from typing import List, Optional, Sequence

from .catalog import label_for
from .critical_search import CriticalPoint, CriticalityVerdict, SearchOptions, is_critical, is_zero_momentum
from .local_algebra import AlgebraBasis, generators_as_entries
from .logging_utils import get_logger
from .models import (
    AmplitudeEntry,
    AnalysisRecord,
    ComplexEntry,
    CriticalPointRecord,
    CriticalVerdictRecord,
    GeneratorRecord,
    PolytopeRecord,
    Report,
    SystemDescriptor,
)
from .momentum import summarize
from .morse import hessian_fd_check
from .polytope import SpectrumPoint, spectrum_point
from .states import PureState

logger = get_logger(__name__)

AMPLITUDE_CUTOFF = 1e-12
FD_STEP = 1e-4


def amplitude_entries(psi: PureState) -> List[AmplitudeEntry]:
    unit = psi.normalized()
    return [
        AmplitudeEntry(index=list(labels), re=value.real + 0.0, im=value.imag + 0.0)
        for labels, value in unit.nonzero_entries(AMPLITUDE_CUTOFF)
    ]


def _spectra_lists(spectra: Sequence[Sequence[float]]) -> List[List[float]]:
    return [[float(value) + 0.0 for value in spectrum] for spectrum in spectra]


class ReportBuilder:
    """Builds report records from library results."""

    @staticmethod
    def critical_point(cp: CriticalPoint, fd_check: bool = False) -> CriticalPointRecord:
        spectra = _spectra_lists(cp.float_spectra)
        lam_rational = cp.lambda_rational()
        return CriticalPointRecord(
            label=label_for(cp.state.descriptor, spectra, cp.variance, cp.morse_index),
            branch=cp.branch,
            note=cp.note,
            amplitudes=amplitude_entries(cp.state),
            lam=cp.lam,
            lambda_rational=str(lam_rational) if lam_rational is not None else None,
            var=cp.variance,
            casimir=cp.casimir,
            momentum_norm_sq=cp.momentum_norm_sq,
            casimir_minus_hs_norm_sq=cp.casimir_minus_hs_norm_sq,
            spectra=spectra,
            spectra_rationals=cp.spectra.as_strings(),
            morse_index=cp.morse_index,
            marginal_directions=cp.marginal_directions,
            residual=cp.residual,
            hessian_fd_max_dev=hessian_fd_check(cp, h=FD_STEP) if fd_check else None,
        )

    @staticmethod
    def analysis(
        psi: PureState, denominator: int, options: SearchOptions, fd_check: bool = False
    ) -> AnalysisRecord:
        summary = summarize(psi)
        verdict = is_critical(psi, options.criticality_tol)
        point = spectrum_point(psi, denominator)
        record = AnalysisRecord(
            var=summary.var,
            casimir=summary.casimir,
            momentum_norm_sq=summary.momentum_norm_sq,
            casimir_minus_hs_norm_sq=summary.casimir_minus_hs_norm_sq,
            spectra=_spectra_lists(summary.spectra),
            spectra_rationals=point.as_strings(),
            is_zero_momentum=is_zero_momentum(psi, options.criticality_tol),
            critical=verdict.critical,
            lam=verdict.lam,
            residual=verdict.residual,
        )
        if not verdict.critical:
            return record
        branch = "zero_momentum" if record.is_zero_momentum else "sweep"
        cp = CriticalPoint.create(psi, denominator, options, branch=branch)
        if cp is None:
            return record
        return record.model_copy(
            update={
                "morse_index": cp.morse_index,
                "marginal_directions": cp.marginal_directions,
                "hessian_fd_max_dev": hessian_fd_check(cp, h=FD_STEP) if fd_check else None,
            }
        )

    @staticmethod
    def verdict(verdict: CriticalityVerdict) -> CriticalVerdictRecord:
        return CriticalVerdictRecord(critical=verdict.critical, lam=verdict.lam, residual=verdict.residual)

    @staticmethod
    def membership(descriptor: SystemDescriptor, point: SpectrumPoint, member: bool) -> PolytopeRecord:
        return PolytopeRecord(system=descriptor.label, member=member, tested=point.as_strings(), count=1)

    @staticmethod
    def enumeration(
        descriptor: SystemDescriptor, denominator: int, candidates: Sequence[SpectrumPoint]
    ) -> PolytopeRecord:
        return PolytopeRecord(
            system=descriptor.label,
            denominator=denominator,
            candidates=[p.as_strings() for p in candidates],
            count=len(candidates),
        )

    @staticmethod
    def generators(basis: AlgebraBasis) -> GeneratorRecord:
        return GeneratorRecord(
            local_dim=basis.local_dim,
            generators=[
                [[ComplexEntry(**entry) for entry in row] for row in matrix]
                for matrix in generators_as_entries(basis)
            ],
        )


def _fmt_spectra(spectra: Sequence[Sequence[float]]) -> str:
    return " ".join("(" + ",".join(f"{v:+.4f}" for v in spectrum) + ")" for spectrum in spectra)


def render_text(report: Report) -> str:
    """Class table in descending Var for search runs, one block per record otherwise."""
    lines = [f"slocc-variance {report.version}  command={report.command.value}"]
    for record in report.results:
        if record.record_type == "critical_point":
            label = record.label or "-"
            lines.append(
                f"{label:<6} var={record.var:.6f} lambda={record.lam:.6f} "
                f"index={record.morse_index:<2d} branch={record.branch:<13} {_fmt_spectra(record.spectra)}"
            )
        elif record.record_type == "analysis":
            index = "-" if record.morse_index is None else str(record.morse_index)
            lines.append(
                f"var={record.var:.6f} ||mu||^2={record.momentum_norm_sq:.6f} critical={record.critical} "
                f"zero_momentum={record.is_zero_momentum} index={index} {_fmt_spectra(record.spectra)}"
            )
        elif record.record_type == "critical_verdict":
            lines.append(f"critical={record.critical} lambda={record.lam:.6f} residual={record.residual:.3e}")
        elif record.record_type == "polytope":
            if record.member is not None:
                lines.append(f"{record.system}: member={record.member} tested={record.tested}")
            else:
                lines.append(f"{record.system}: {record.count} candidates at denominator {record.denominator}")
                lines.extend(f"  {candidate}" for candidate in record.candidates or [])
        elif record.record_type == "suite":
            status = "PASS" if record.passed else "FAIL"
            deviation = "n/a" if record.max_deviation is None else f"{record.max_deviation:.3e}"
            lines.append(f"{status} {record.name:<22} max_deviation={deviation}")
        elif record.record_type == "generators":
            lines.append(f"{len(record.generators)} generators of su({record.local_dim})")
    if not report.results:
        lines.append("(no results)")
    lines.extend(f"warning: {warning}" for warning in report.warnings)
    return "\n".join(lines) + "\n"


def log_summary(report: Report, exit_code: int, extra: Optional[dict] = None) -> None:
    logger.info(
        "Run finished",
        extra={
            "extra_data": {
                "command": report.command.value,
                "results": len(report.results),
                "warnings": len(report.warnings),
                "exit_code": exit_code,
                **(extra or {}),
            }
        },
    )
