import json
from pathlib import Path

import numpy as np
import pytest

from ptload import (
    InterferenceMarginal,
    InterferenceModel,
    LinkScenario,
    SubbandSpec,
    sample_interference,
)

ROOT = Path(__file__).resolve().parents[1]
SCENARIOS = ROOT / "scenarios"


@pytest.fixture
def symmetric_link():
    return LinkScenario([SubbandSpec(96e6, 1.0, 1.0)] * 3, 3.0)


@pytest.fixture
def quiet_samples():
    model = InterferenceModel.independent([InterferenceMarginal.constant(0.0)] * 3)
    return sample_interference(model, 4, 0)


@pytest.fixture
def stochastic_setup():
    link = LinkScenario(
        [SubbandSpec(96e6, 5.0, 1e-3), SubbandSpec(96e6, 1.0, 1e-3), SubbandSpec(96e6, 12.0, 1e-3)], 1.0
    )
    corr = np.array([[1.0, 0.3, -0.2], [0.3, 1.0, 0.1], [-0.2, 0.1, 1.0]])
    model = InterferenceModel(
        [
            InterferenceMarginal.lognormal(-3.3, 2.2),
            InterferenceMarginal.gamma(2.0, 0.05),
            InterferenceMarginal.lognormal(-2.6, 1.3),
        ],
        corr,
    )
    return link, model, sample_interference(model, 3000, 11)


def minimal_scenario(**overrides):
    data = {
        "numerology": {"mu": 4, "fft_size": 2048, "payload_subcarriers": 1200},
        "bands": [
            {"channel_gain": 1.0, "noise_power_w": 1.0, "interference": {"kind": "constant", "level": 0.0}}
            for _ in range(3)
        ],
        "total_power_w": 3.0,
        "run": {"portfolios": 200, "draws": 50, "seed": 5},
    }
    data.update(overrides)
    return data


def write_json(path, data):
    path.write_text(json.dumps(data))
    return path


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
