import math
import sys

import pytest

from utils.config import get_cfg_default
from utils.evaluator import Evaluator
from utils.errors import DomainError
from utils.logger import Logger, setup_logger
from utils.meter import ResidualMeter


def test_config_defaults():
    cfg = get_cfg_default()
    assert cfg.tol == 1e-8
    assert cfg.samples == 201
    assert list(cfg.oracle_ladder) == [1000, 10000, 100000]
    assert cfg.verify.minimum_tol == 1e-6


def test_config_merge_from_list():
    cfg = get_cfg_default()
    cfg.merge_from_list(["tol", "1e-10", "verify.ode_tol", "1e-9", "samples", "11"])
    assert cfg.tol == 1e-10
    assert cfg.verify.ode_tol == 1e-9
    assert cfg.samples == 11
    assert get_cfg_default().tol == 1e-8


def test_config_rejects_unknown_key():
    cfg = get_cfg_default()
    with pytest.raises(AssertionError, match="Non-existent key"):
        cfg.merge_from_list(["tolerance", "1e-3"])


def test_config_tol_from_environment(monkeypatch):
    monkeypatch.setenv("COG_DEFAULT_TOL", "1e-9")
    assert get_cfg_default().tol == 1e-9


@pytest.mark.parametrize("raw", ["abc", "0", "-1e-8", "inf", ""])
def test_config_bad_tol_from_environment(monkeypatch, raw):
    monkeypatch.setenv("COG_DEFAULT_TOL", raw)
    with pytest.raises(DomainError, match="COG_DEFAULT_TOL"):
        get_cfg_default()


def test_meter():
    meter = ResidualMeter()
    meter.update(-2.0, scale=4.0, at=0.1)
    meter.update(1.0, at=0.2)
    meter.update(0.25, at=0.3)
    assert meter.max == 1.0
    assert meter.argmax == 0.2
    assert meter.count == 3
    assert meter.avg == pytest.approx(1.75 / 3)
    meter.update(math.nan, at=0.4)
    assert meter.max == math.inf
    meter.reset()
    assert meter.count == 0 and meter.avg == 0.0


def test_evaluator(capsys):
    evaluator = Evaluator()
    evaluator.process("residual", True, 1e-12, 1e-8)
    evaluator.note("model", "two models differ")
    assert evaluator.all_passed
    evaluator.process("order", False, 1.2, 2.0, "at h=0.5")
    assert not evaluator.all_passed

    results = evaluator.evaluate()
    out = capsys.readouterr().out
    assert "=> result" in out
    assert "[PASS] residual: 1e-12 (threshold 1e-08)" in out
    assert "NOTE   model: two models differ" in out
    assert "[FAIL] order: 1.2 (threshold 2)  at h=0.5" in out
    assert "* checks: 2" in out
    assert results["passed"] == 1 and results["failed"] == 1
    assert "model" not in results

    evaluator.reset()
    assert evaluator.checks == []


def test_logger_tees_stdout(tmp_path, capsys):
    stdout = sys.stdout
    try:
        logger = setup_logger(str(tmp_path))
        print("h_star: 0.5")
    finally:
        sys.stdout = stdout
        logger.close()
    assert "h_star: 0.5" in capsys.readouterr().out
    assert (tmp_path / "log.txt").read_text() == "h_star: 0.5\n"


def test_logger_keeps_existing_log(tmp_path):
    (tmp_path / "log.txt").write_text("old run\n")
    stdout = sys.stdout
    try:
        logger = setup_logger(str(tmp_path))
    finally:
        sys.stdout = stdout
    logger.close()
    assert (tmp_path / "log.txt").read_text() == "old run\n"
    assert len(list(tmp_path.iterdir())) == 2


def test_logger_without_file():
    assert setup_logger(None) is None
    with Logger() as logger:
        logger.write("")
        assert logger.file is None
