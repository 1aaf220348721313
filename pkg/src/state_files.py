"""JSON state files, inequality files and report output."""
from pathlib import Path
from typing import List

import orjson
from pydantic import BaseModel, ValidationError

from .errors import InvalidInputError
from .hilbert import get_space
from .logging_utils import get_logger
from .models import AmplitudeEntry, ParticleKind, Report, SystemDescriptor
from .polytope import Inequality, parse_rational
from .states import PureState

logger = get_logger(__name__)


class StateFile(BaseModel):
    kind: ParticleKind
    local_dim: int
    num_particles: int
    amplitudes: List[AmplitudeEntry]


class InequalityRow(BaseModel):
    coefficients: List[str]
    bound: str


class InequalityFile(BaseModel):
    inequalities: List[InequalityRow]


def _describe(exc: ValidationError) -> str:
    first = exc.errors()[0]
    location = ".".join(str(part) for part in first["loc"]) or "<root>"
    return f"{location}: {first['msg']}"


def _load_json(path: Path) -> object:
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise InvalidInputError(f"cannot read {path}: {exc.strerror}") from exc
    try:
        return orjson.loads(raw)
    except orjson.JSONDecodeError as exc:
        raise InvalidInputError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc


def parse_state_file(path: str | Path) -> PureState:
    path = Path(path)
    try:
        document = StateFile.model_validate(_load_json(path))
        descriptor = SystemDescriptor(
            kind=document.kind, local_dim=document.local_dim, num_particles=document.num_particles
        )
    except ValidationError as exc:
        raise InvalidInputError(f"{path}: {_describe(exc)}") from exc

    space = get_space(descriptor)
    seen = {}
    for position, entry in enumerate(document.amplitudes):
        labels = tuple(entry.index)
        try:
            space.validate_labels(labels)
        except InvalidInputError as exc:
            raise InvalidInputError(f"{path}: amplitudes.{position}: {exc}") from exc
        if labels in seen:
            raise InvalidInputError(
                f"{path}: amplitudes.{position}: duplicate index {list(labels)} (first at amplitudes.{seen[labels]})"
            )
        seen[labels] = position

    entries = {tuple(entry.index): complex(entry.re, entry.im) for entry in document.amplitudes}
    try:
        psi = PureState.from_labels(descriptor, entries)
    except InvalidInputError as exc:
        raise InvalidInputError(f"{path}: {exc}") from exc
    logger.info(
        "Loaded state file",
        extra={"extra_data": {"path": str(path), "system": descriptor.label, "terms": len(entries)}},
    )
    return psi


def load_inequalities(path: str | Path) -> List[Inequality]:
    path = Path(path)
    try:
        document = InequalityFile.model_validate(_load_json(path))
    except ValidationError as exc:
        raise InvalidInputError(f"{path}: {_describe(exc)}") from exc
    if not document.inequalities:
        raise InvalidInputError(f"{path}: no inequalities listed")
    return [
        Inequality(
            coefficients=tuple(parse_rational(value) for value in row.coefficients),
            bound=parse_rational(row.bound),
        )
        for row in document.inequalities
    ]


def report_bytes(report: Report) -> bytes:
    """Sorted-key, indented JSON; identical reports give identical bytes."""
    payload = report.model_dump(mode="json", by_alias=True)
    return orjson.dumps(payload, option=orjson.OPT_SORT_KEYS | orjson.OPT_INDENT_2) + b"\n"
