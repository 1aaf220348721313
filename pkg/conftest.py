import pytest
import orjson

from src.critical_search import CriticalPoint, SearchOptions
from src.catalog import entry
from src.log_buffer import log_buffer
from src.logging_utils import setup_logging
from src.polytope import default_denominator


@pytest.fixture(autouse=True)
def _reset_run_state():
    setup_logging("WARNING")
    log_buffer.clear()
    yield
    log_buffer.clear()


@pytest.fixture
def options() -> SearchOptions:
    return SearchOptions.create(seed=7, starts=8)


@pytest.fixture
def critical_point(options):
    """Factory: CriticalPoint of a named catalog state."""

    def build(name: str) -> CriticalPoint:
        item = entry(name)
        cp = CriticalPoint.create(item.state(), default_denominator(item.descriptor), options)
        assert cp is not None, f"{name} should be critical"
        return cp

    return build


@pytest.fixture
def write_state(tmp_path):
    """Factory: write a state file and return its path."""

    def write(name: str, kind: str, local_dim: int, num_particles: int, amplitudes) -> str:
        document = {
            "kind": kind,
            "local_dim": local_dim,
            "num_particles": num_particles,
            "amplitudes": [
                {"index": list(index), "re": float(re), "im": float(im)} for index, re, im in amplitudes
            ],
        }
        path = tmp_path / name
        path.write_bytes(orjson.dumps(document))
        return str(path)

    return write
