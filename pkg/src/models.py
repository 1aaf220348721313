from __future__ import annotations

from enum import Enum
from typing import Annotated, Any, Dict, List, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from .errors import InvalidInputError


class ParticleKind(str, Enum):
    distinguishable = "distinguishable"
    bosonic = "bosonic"
    fermionic = "fermionic"


class SystemDescriptor(BaseModel):
    """L particles with single-particle space C^N, of one of the three kinds."""

    model_config = ConfigDict(frozen=True)

    kind: ParticleKind
    local_dim: int = Field(..., ge=2, description="Single-particle dimension N")
    num_particles: int = Field(..., ge=1, description="Particle count L")

    @model_validator(mode="after")
    def _check_exclusion(self) -> "SystemDescriptor":
        if self.kind is ParticleKind.fermionic and self.num_particles > self.local_dim:
            raise ValueError(
                f"{self.num_particles} fermions do not fit into {self.local_dim} orbitals"
            )
        return self

    @classmethod
    def parse(cls, text: str) -> "SystemDescriptor":
        """Parse the CLI form ``kind,N,L``."""
        parts = [part.strip() for part in text.split(",")]
        if len(parts) != 3:
            raise InvalidInputError(f"system must look like kind,N,L; got {text!r}")
        try:
            return cls(kind=parts[0], local_dim=int(parts[1]), num_particles=int(parts[2]))
        except (ValueError, ValidationError) as exc:
            raise InvalidInputError(f"invalid system {text!r}: {exc}") from exc

    @property
    def indistinguishable(self) -> bool:
        return self.kind is not ParticleKind.distinguishable

    @property
    def num_components(self) -> int:
        """Number of momentum components: one per site, or one for identical particles."""
        return 1 if self.indistinguishable else self.num_particles

    @property
    def label(self) -> str:
        return f"{self.kind.value},{self.local_dim},{self.num_particles}"


class CommandName(str, Enum):
    analyze = "analyze"
    search = "search"
    critical = "critical"
    polytope = "polytope"
    verify = "verify"
    dump_generators = "dump-generators"


class OutputFormat(str, Enum):
    json = "json"
    text = "text"


class Tolerances(BaseModel):
    criticality: float = Field(..., gt=0)
    solver: float = Field(..., gt=0)
    index: float = Field(..., gt=0)


class RunConfig(BaseModel):
    command: CommandName
    system: Optional[SystemDescriptor] = None
    input_path: Optional[str] = None
    denominator: Optional[int] = Field(default=None, ge=2)
    seed: int
    tolerances: Tolerances
    starts: int = Field(..., ge=1)
    max_iter: int = Field(..., ge=1)
    workers: int = Field(default=1, ge=1)
    output: OutputFormat = OutputFormat.json
    fd_check: bool = False
    test_spectrum: Optional[str] = None
    enumerate: bool = False
    inequalities_path: Optional[str] = None
    generators_dim: Optional[int] = Field(default=None, ge=2)


class AmplitudeEntry(BaseModel):
    index: List[int]
    re: float
    im: float = 0.0


class ComplexEntry(BaseModel):
    re: float
    im: float


class CriticalPointRecord(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    record_type: Literal["critical_point"] = "critical_point"
    label: Optional[str] = None
    branch: Literal["zero_momentum", "sweep"]
    note: Optional[str] = None
    amplitudes: List[AmplitudeEntry]
    lam: float = Field(..., alias="lambda")
    lambda_rational: Optional[str] = None
    var: float
    casimir: float
    momentum_norm_sq: float
    casimir_minus_hs_norm_sq: float
    spectra: List[List[float]]
    spectra_rationals: List[List[str]]
    morse_index: int
    marginal_directions: int
    residual: float
    hessian_fd_max_dev: Optional[float] = None


class AnalysisRecord(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    record_type: Literal["analysis"] = "analysis"
    var: float
    casimir: float
    momentum_norm_sq: float
    casimir_minus_hs_norm_sq: float
    spectra: List[List[float]]
    spectra_rationals: List[List[str]]
    is_zero_momentum: bool
    critical: bool
    lam: float = Field(..., alias="lambda")
    residual: float
    morse_index: Optional[int] = None
    marginal_directions: Optional[int] = None
    hessian_fd_max_dev: Optional[float] = None


class CriticalVerdictRecord(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    record_type: Literal["critical_verdict"] = "critical_verdict"
    critical: bool
    lam: float = Field(..., alias="lambda")
    residual: float


class PolytopeRecord(BaseModel):
    record_type: Literal["polytope"] = "polytope"
    system: str
    member: Optional[bool] = None
    tested: Optional[List[List[str]]] = None
    denominator: Optional[int] = None
    candidates: Optional[List[List[List[str]]]] = None
    count: int = 0


class SuiteRecord(BaseModel):
    record_type: Literal["suite"] = "suite"
    name: str
    passed: bool
    max_deviation: Optional[float] = None
    detail: Dict[str, Any] = Field(default_factory=dict)


class GeneratorRecord(BaseModel):
    record_type: Literal["generators"] = "generators"
    local_dim: int
    generators: List[List[List[ComplexEntry]]]


ResultRecord = Annotated[
    Union[
        CriticalPointRecord,
        AnalysisRecord,
        CriticalVerdictRecord,
        PolytopeRecord,
        SuiteRecord,
        GeneratorRecord,
    ],
    Field(discriminator="record_type"),
]


class Report(BaseModel):
    version: str
    command: CommandName
    config: Dict[str, Any]
    results: List[ResultRecord] = Field(default_factory=list)
    warnings: List[str] = Field(default_factory=list)


class ErrorResponse(BaseModel):
    error: str
    code: str
