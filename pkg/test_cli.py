"""End-to-end runs of the command-line front end."""
import time
from pathlib import Path

import jsonschema
import numpy as np
import orjson
import pytest

from src.catalog import entry
from src.config import get_settings
from src.log_buffer import log_buffer
from src.logging_utils import get_logger
from src.main import build_parser, config_from_args, main, run
from src.models import CommandName, Report
from src.state_files import parse_state_file, report_bytes

GHZ = [((1, 1, 1), 1.0, 0.0), ((2, 2, 2), 1.0, 0.0)]
W = [((2, 1, 1), 1.0, 0.0), ((1, 2, 1), 1.0, 0.0), ((1, 1, 2), 1.0, 0.0)]
REPORT_SCHEMA = orjson.loads((Path(__file__).parent / "schema" / "report.schema.json").read_bytes())


def _run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def test_analyze_ghz(capsys, write_state):
    path = write_state("ghz.json", "distinguishable", 2, 3, GHZ)
    code, out = _run(capsys, "analyze", "--state", path)
    assert code == 0
    report = orjson.loads(out)
    [record] = report["results"]
    assert record["record_type"] == "analysis"
    assert record["var"] == pytest.approx(4.5, abs=1e-10)
    assert record["momentum_norm_sq"] == pytest.approx(0.0, abs=1e-12)
    assert record["is_zero_momentum"] is True
    assert record["morse_index"] == 0
    assert record["spectra_rationals"] == [["0", "0"]] * 3


def test_analyze_w_with_fd_check(capsys, write_state):
    path = write_state("w.json", "distinguishable", 2, 3, W)
    code, out = _run(capsys, "analyze", "--state", path, "--fd-check")
    assert code == 0
    [record] = orjson.loads(out)["results"]
    assert record["var"] == pytest.approx(13 / 3, abs=1e-10)
    assert record["lambda"] == pytest.approx(1 / 6, abs=1e-10)
    assert record["morse_index"] == 2
    assert record["hessian_fd_max_dev"] < 1e-3


def test_critical_verdict(capsys, write_state):
    path = write_state("w.json", "distinguishable", 2, 3, W)
    code, out = _run(capsys, "critical", "--state", path)
    assert code == 0
    [record] = orjson.loads(out)["results"]
    assert record["critical"] is True
    assert record["lambda"] == pytest.approx(1 / 6, abs=1e-10)

    skewed = write_state("skewed.json", "distinguishable", 2, 3, W[:2] + [((1, 1, 2), 0.3, 0.1)])
    code, out = _run(capsys, "critical", "--state", skewed)
    assert code == 0
    assert orjson.loads(out)["results"][0]["critical"] is False


def test_state_file_errors(capsys, write_state, tmp_path):
    bad_order = write_state("bad.json", "fermionic", 5, 3, [((2, 1, 3), 1.0, 0.0)])
    code, out = _run(capsys, "analyze", "--state", bad_order)
    assert code == 2
    error = orjson.loads(out)
    assert error["code"] == "INVALID_INPUT"
    assert "not strictly increasing" in error["error"]

    zero = write_state("zero.json", "distinguishable", 2, 3, [((1, 1, 1), 0.0, 0.0)])
    code, out = _run(capsys, "analyze", "--state", zero)
    assert code == 2
    assert "zero vector" in orjson.loads(out)["error"]

    duplicate = write_state("dup.json", "distinguishable", 2, 3, [((1, 1, 1), 1.0, 0.0)] * 2)
    code, out = _run(capsys, "critical", "--state", duplicate)
    assert code == 2
    assert "duplicate index" in orjson.loads(out)["error"]

    broken = tmp_path / "broken.json"
    broken.write_text('{"kind": "bosonic",\n "local_dim": 3,,}')
    code, out = _run(capsys, "analyze", "--state", str(broken))
    assert code == 2
    assert "broken.json:2:" in orjson.loads(out)["error"]

    missing_field = tmp_path / "missing.json"
    missing_field.write_text('{"kind": "bosonic", "local_dim": 3, "amplitudes": []}')
    code, out = _run(capsys, "analyze", "--state", str(missing_field))
    assert code == 2
    assert "num_particles" in orjson.loads(out)["error"]


def test_state_file_matches_catalog_state(write_state):
    psi = entry("psi2").state()
    path = write_state("psi2", "fermionic", 5, 3, [((1, 2, 3), 1.0, 0.0), ((1, 4, 5), 1.0, 0.0)])
    loaded = parse_state_file(path)
    assert loaded.descriptor == psi.descriptor
    assert [labels for labels, _ in loaded.nonzero_entries(1e-12)] == [(1, 2, 3), (1, 4, 5)]
    assert np.allclose(loaded.amplitudes, psi.amplitudes)


def test_polytope_membership_and_enumeration(capsys):
    code, out = _run(capsys, "polytope", "--system", "distinguishable,2,3", "--test", "1/6,-1/6,1/6,-1/6,1/6,-1/6")
    assert code == 0
    [record] = orjson.loads(out)["results"]
    assert record["member"] is True
    assert record["tested"] == [["1/6", "-1/6"]] * 3

    code, out = _run(capsys, "polytope", "--system", "distinguishable,2,3", "--enumerate", "--denominator", "6")
    assert code == 0
    [record] = orjson.loads(out)["results"]
    assert record["count"] == 33
    jsonschema.validate(instance=orjson.loads(out), schema=REPORT_SCHEMA)
    assert record["denominator"] == 6

    code, out = _run(capsys, "polytope", "--system", "fermionic,5,3", "--test", "1/3,1/3,1/3,0,0")
    assert code == 2


def test_polytope_with_inequality_file(capsys, tmp_path):
    rows = {"inequalities": [{"coefficients": ["1", "0", "0"], "bound": "1/3"}]}
    path = tmp_path / "ineq.json"
    path.write_bytes(orjson.dumps(rows))
    code, out = _run(
        capsys, "polytope", "--system", "bosonic,3,2", "--enumerate", "--denominator", "6", "--inequalities", str(path)
    )
    assert code == 0
    [record] = orjson.loads(out)["results"]
    assert record["count"] > 0
    assert all(value in {"1/3", "1/6", "0"} for value in (c[0][0] for c in record["candidates"]))

    code, out = _run(capsys, "polytope", "--system", "bosonic,3,2", "--enumerate")
    assert code == 2
    assert "supply inequalities" in orjson.loads(out)["error"]


def test_dump_generators(capsys):
    code, out = _run(capsys, "dump-generators", "--dim", "3")
    assert code == 0
    jsonschema.validate(instance=orjson.loads(out), schema=REPORT_SCHEMA)
    [record] = orjson.loads(out)["results"]
    assert record["local_dim"] == 3
    assert len(record["generators"]) == 8
    assert len(record["generators"][0]) == 3

    code, out = _run(capsys, "dump-generators", "--dim", "1")
    assert code == 2


def test_three_qubit_search(capsys):
    code, out = _run(capsys, "search", "--system", "distinguishable,2,3", "--denominator", "6", "--starts", "8")
    assert code == 0
    results = orjson.loads(out)["results"]
    assert [(round(r["var"], 8), r["morse_index"]) for r in results] == [
        (4.5, 0),
        (round(13 / 3, 8), 2),
        (4.0, 6),
        (4.0, 6),
        (4.0, 6),
        (3.0, 8),
    ]
    assert results[0]["note"] == "class family, representatives only"
    assert results[1]["label"] == "W"
    assert results[1]["lambda_rational"] == "1/6"


def test_three_qubit_search_at_defaults_is_fast(capsys):
    started = time.perf_counter()
    code, out = _run(capsys, "search", "--system", "distinguishable,2,3", "--denominator", "6")
    elapsed = time.perf_counter() - started
    assert code == 0
    results = orjson.loads(out)["results"]
    assert sorted(r["label"] for r in results) == ["BS1", "BS2", "BS3", "GHZ", "SEP", "W"]
    assert elapsed < 10.0
    jsonschema.validate(instance=orjson.loads(out), schema=REPORT_SCHEMA)


def test_wedge_search_is_deterministic(capsys):
    argv = ["search", "--system", "fermionic,5,3", "--denominator", "30", "--starts", "8", "--seed", "7"]
    code, first = _run(capsys, *argv)
    assert code == 0
    _, second = _run(capsys, *argv)
    assert first == second

    report = orjson.loads(first)
    assert [r["label"] for r in report["results"]] == ["psi2", "psi1"]
    assert [r["morse_index"] for r in report["results"]] == [0, 6]
    assert [r["lambda_rational"] for r in report["results"]] == ["1/15", "2/5"]
    assert [r["var"] for r in report["results"]] == [pytest.approx(7.0), pytest.approx(6.0)]
    assert any("Zero-momentum branch is empty" in w for w in report["warnings"])
    assert report["config"]["seed"] == 7
    assert "command" not in report["config"]


def test_report_round_trips_through_schema(capsys):
    args = build_parser().parse_args(["search", "--system", "fermionic,5,3", "--starts", "4"])
    config = config_from_args(args)
    assert config.command is CommandName.search
    assert config.denominator is None
    report, code = run(config)
    assert code == 0
    data = report_bytes(report)
    assert Report.model_validate_json(data) == report
    assert report_bytes(Report.model_validate_json(data)) == data

    jsonschema.validate(instance=orjson.loads(data), schema=REPORT_SCHEMA)

    code, out = _run(capsys, "--schema")
    assert code == 0
    generated = orjson.loads(out)
    assert set(generated["$defs"]) == set(REPORT_SCHEMA["$defs"])
    for name, definition in REPORT_SCHEMA["$defs"].items():
        assert set(definition.get("properties", {})) == set(generated["$defs"][name].get("properties", {})), name
    assert set(generated["properties"]) == set(REPORT_SCHEMA["properties"])


def test_text_output_lists_labels(capsys):
    code, out = _run(capsys, "--output", "text", "search", "--system", "fermionic,5,3", "--starts", "4")
    assert code == 0
    lines = out.splitlines()
    assert lines[0].startswith("slocc-variance")
    assert lines[1].startswith("psi2")
    assert lines[2].startswith("psi1")
    assert any(line.startswith("warning:") for line in lines)


def test_bad_system_and_missing_command(capsys):
    code, out = _run(capsys, "search", "--system", "fermionic,3,5")
    assert code == 2
    assert orjson.loads(out)["code"] == "INVALID_INPUT"
    assert main([]) == 2


def test_verify_passes(capsys):
    code, out = _run(capsys, "verify", "--seed", "7")
    report = orjson.loads(out)
    jsonschema.validate(instance=report, schema=REPORT_SCHEMA)
    failed = [r["name"] for r in report["results"] if not r["passed"]]
    assert failed == []
    assert code == 0
    assert {r["name"] for r in report["results"]} == {
        "variance_identity",
        "casimir_scalar",
        "k_invariance",
        "hessian_fd",
        "orbit_maximum",
        "complement_regression",
    }


def test_settings_come_from_environment(monkeypatch):
    monkeypatch.setenv("SLOCC_SEED", "11")
    monkeypatch.setenv("SLOCC_SOLVER_STARTS", "3")
    monkeypatch.setenv("SLOCC_LOG_LEVEL", "info")
    get_settings.cache_clear()
    try:
        settings = get_settings()
        assert settings.default_seed == 11
        assert settings.log_level == "INFO"
        config = config_from_args(build_parser().parse_args(["verify"]))
        assert config.seed == 11
        assert config.starts == 3
        overridden = config_from_args(build_parser().parse_args(["verify", "--seed", "0"]))
        assert overridden.seed == 0
    finally:
        get_settings.cache_clear()


def test_warnings_are_buffered_with_context():
    log_buffer.clear()
    get_logger("test").warning("Something odd", extra={"extra_data": {"b": 2, "a": 1}})
    get_logger("test").info("Not buffered")
    assert log_buffer.as_strings() == ['Something odd {"a": 1, "b": 2}']
