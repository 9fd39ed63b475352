import json

import pytest

from app.config.settings import Settings
from app.models.config import build_config, parse_complex
from app.models.report import CheckMode, CheckResult, CheckStatus, Report
from app.utils.exception_handler import (
    EXIT_ALGEBRA,
    EXIT_CONFIG,
    EXIT_INTERNAL,
    EXIT_IO,
    handle_exception,
)
from app.utils.exceptions import AlgebraError, ConfigError, GoldenFileError
from app.utils.logger import get_logger
from main import main


def _check(check_id: str, status: CheckStatus) -> CheckResult:
    return CheckResult(id=check_id, statement="", mode=CheckMode.EXACT, status=status)


@pytest.mark.parametrize("overrides", [
    {"family": "8k+2"},
    {"family": "8k", "k": 0},
    {"tau_samples": ["0.3-1i"]},
    {"tau_samples": ["0.3"]},
    {"suites": ["ring", "modular"]},
    {"q_order": 0},
])
def test_bad_configuration_is_rejected(overrides):
    with pytest.raises(ConfigError):
        build_config(Settings(), overrides)


def test_overrides_and_defaults():
    config = build_config(Settings(), {"k": 2, "family": "8k", "suites": ["cancel", "ring", "cancel"], "seed": None})
    assert config.dim == 16
    assert config.suites == ["ring", "cancel"]
    assert config.seed == 0
    assert config.effective_taylor_order == 10
    assert config.geometry(v_equals_tm=True).l == 8


def test_parse_complex():
    assert parse_complex("0.37+1.29i") == complex(0.37, 1.29)
    assert parse_complex("2i") == 2j
    with pytest.raises(ValueError):
        parse_complex("tau")


def test_settings_read_the_environment(monkeypatch):
    monkeypatch.setenv("CANCEL_K", "2")
    monkeypatch.setenv("CANCEL_TAU_SAMPLES", '["0.1+2i"]')
    config = build_config(Settings())
    assert config.k == 2
    assert config.taus == [complex(0.1, 2)]


@pytest.mark.parametrize("exc, code", [
    (ConfigError("bad"), EXIT_CONFIG),
    (AlgebraError("bad"), EXIT_ALGEBRA),
    (GoldenFileError("bad"), EXIT_IO),
    (FileNotFoundError(2, "missing", "report.json"), EXIT_IO),
    (RuntimeError("bad"), EXIT_INTERNAL),
])
def test_exception_exit_codes(capsys, exc, code):
    assert handle_exception(exc) == code
    envelope = json.loads(capsys.readouterr().err)
    assert envelope["success"] is False
    assert envelope["exit_code"] == code


def test_report_exit_code_and_summary():
    report = Report(tool_version="0", config={}, checks=[_check("a", CheckStatus.PASS)])
    assert report.exit_code == 0
    report.checks.append(_check("b", CheckStatus.FAIL))
    assert report.exit_code == 1
    assert report.summary.failed == 1


def test_verify_writes_report(tmp_path, fresh_services):
    out = tmp_path / "out" / "report.json"
    assert main(["verify", "--suite", "ring", "--out", str(out)]) == 0
    report = json.loads(out.read_text())
    assert report["summary"]["failed"] == 0
    assert report["config"]["suites"] == ["ring"]
    ids = [check["id"] for check in report["checks"]]
    assert ids == sorted(ids)
    assert all(i.startswith("ring.") for i in ids)


def test_golden_emit_then_compare(tmp_path, fresh_services):
    golden = tmp_path / "golden"
    common = ["verify", "--suite", "ring", "--q-order", "2", "--golden-dir", str(golden)]
    assert main(common + ["--emit-golden", "--out", str(tmp_path / "emit.json")]) == 0
    assert (golden / "br_table_k1_8k4.json").exists()
    assert (golden / "modular_delta2.txt").exists()

    out = tmp_path / "compare.json"
    assert main(common + ["--out", str(out)]) == 0
    golden_ids = [c["id"] for c in json.loads(out.read_text())["checks"] if c["id"].startswith("golden.")]
    assert "golden.br_table_k1_8k4.json" in golden_ids

    path = golden / "theta_prime_over_pi.txt"
    lines = path.read_text().splitlines()
    eighths, monomial, _ = lines[-1].split()
    lines[-1] = f"{eighths} {monomial} 12345/1"
    path.write_text("\n".join(lines) + "\n")
    assert main(common + ["--out", str(out)]) == 1


def test_malformed_golden_file_is_an_io_error(tmp_path, fresh_services):
    golden = tmp_path / "golden"
    common = ["verify", "--suite", "ring", "--q-order", "2", "--golden-dir", str(golden)]
    assert main(common + ["--emit-golden", "--out", str(tmp_path / "emit.json")]) == 0
    (golden / "theta_prime_over_pi.txt").write_text("# bound 4\n")
    assert main(common + ["--out", str(tmp_path / "r.json")]) == EXIT_IO


def test_missing_golden_dir_is_a_config_error(tmp_path, fresh_services):
    argv = ["verify", "--suite", "ring", "--golden-dir", str(tmp_path / "absent"), "--out", str(tmp_path / "r.json")]
    assert main(argv) == EXIT_CONFIG


def test_bad_flag_value_exits_with_config_code(tmp_path, fresh_services):
    assert main(["verify", "--family", "8k", "--k", "0", "--out", str(tmp_path / "r.json")]) == EXIT_CONFIG


def test_tables_command(tmp_path, fresh_services):
    assert main(["tables", "--k", "1", "--out", str(tmp_path)]) == 0
    table = json.loads((tmp_path / "br_table_k1_8k4.json").read_text())
    assert table["rows"] == [[-1, 0], [72, -1]]
    assert (tmp_path / "cr_k1_r0.txt").exists()
    assert (tmp_path / "cr_k1_r1.txt").read_text().splitlines()[-1].endswith("-1/1")


def test_logger_appends_context():
    logger = get_logger("app.tests", suite="ring")
    message, kwargs = logger.bind(k=1).process("done", {"context": {"check": "ring.division"}})
    assert message == "done suite=ring k=1 check=ring.division"
    assert kwargs == {}
    assert logger.process("plain", {})[0] == "plain suite=ring"
