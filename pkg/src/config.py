import os
from functools import lru_cache
from pathlib import Path
from pydantic import BaseModel, Field
from dotenv import load_dotenv

# Load .env file if it exists (in project root)
env_path = Path(__file__).parent.parent / ".env"
if env_path.exists():
    load_dotenv(dotenv_path=env_path)
else:
    # Also try loading from current directory
    load_dotenv()


class Settings(BaseModel):
    environment: str = Field(default="dev")
    default_seed: int = Field(default=7, description="Seed used when a command gets no --seed")

    # Numerical tolerances
    criticality_tol: float = Field(
        default=1e-9, gt=0, description="Residual bound ||a psi - lambda psi|| for criticality"
    )
    solver_tol: float = Field(
        default=1e-8, gt=0, description="A solver start succeeds when ||mu - alpha_P||^2 < tol^2"
    )
    index_tol: float = Field(
        default=1e-9, gt=0, description="Compressed Hessian eigenvalues within this band are marginal"
    )
    rank_tol: float = Field(
        default=1e-8, gt=0, description="Relative singular-value cutoff for the SLOCC tangent space"
    )

    # Eigenspace solver
    solver_starts: int = Field(default=32, ge=1)
    solver_max_iter: int = Field(default=2000, ge=1)
    solver_step: float = Field(default=1.0, gt=0, description="Initial Armijo step length")

    # Operators above this Hilbert-space dimension are applied implicitly
    dense_operator_cap: int = Field(default=4096, ge=1)

    sweep_workers: int = Field(
        default=1, ge=1, description="Thread count for the (candidate, eigenspace) sweep"
    )
    log_level: str = Field(default="WARNING")


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    return Settings(
        environment=os.getenv("ENVIRONMENT", "dev"),
        default_seed=int(os.getenv("SLOCC_SEED", "7")),
        criticality_tol=float(os.getenv("SLOCC_CRITICALITY_TOL", "1e-9")),
        solver_tol=float(os.getenv("SLOCC_SOLVER_TOL", "1e-8")),
        index_tol=float(os.getenv("SLOCC_INDEX_TOL", "1e-9")),
        rank_tol=float(os.getenv("SLOCC_RANK_TOL", "1e-8")),
        solver_starts=int(os.getenv("SLOCC_SOLVER_STARTS", "32")),
        solver_max_iter=int(os.getenv("SLOCC_SOLVER_MAX_ITER", "2000")),
        solver_step=float(os.getenv("SLOCC_SOLVER_STEP", "1.0")),
        dense_operator_cap=int(os.getenv("SLOCC_DENSE_OPERATOR_CAP", "4096")),
        sweep_workers=int(os.getenv("SLOCC_SWEEP_WORKERS", "1")),
        log_level=os.getenv("SLOCC_LOG_LEVEL", "WARNING").upper(),
    )
