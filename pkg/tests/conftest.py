import json
import sys
from pathlib import Path

import pytest

from dcemirror import pipeline
from dcemirror.params import GridSpec, PhysicalParams

HERE = Path(__file__).resolve().parent
sys.path.insert(0, str(HERE))


@pytest.fixture(scope="session")
def frozen():
    return json.loads((HERE / "frozen_oracles.json").read_text())


@pytest.fixture(scope="session")
def default_run():
    return pipeline.run(PhysicalParams(), GridSpec())


@pytest.fixture(scope="session")
def warm_run():
    return pipeline.run(PhysicalParams(T=5.0), GridSpec(), check_convergence=False, with_impulse=False)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
