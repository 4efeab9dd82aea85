import os

import pytest

from utils.config import get_cfg_default

SCENARIO_DIR = os.path.join(os.path.dirname(os.path.abspath(__file__)), os.pardir, "configs", "scenario")


@pytest.fixture
def scenario_file():
    def _path(name):
        return os.path.join(SCENARIO_DIR, f"{name}.json")

    return _path


@pytest.fixture
def cfg():
    cfg = get_cfg_default()
    cfg.verbose = False
    return cfg


@pytest.fixture
def quick_cfg(cfg):
    cfg.scan_grid = 200
    cfg.monotone_grid = 200
    cfg.ode_points = 10
    cfg.oracle_ladder = [1000, 4000, 16000]
    return cfg
