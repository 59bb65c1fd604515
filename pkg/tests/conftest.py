import os
import sys
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile(
    "default", deadline=None, suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large]
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture
def fixtures() -> Path:
    return FIXTURES


def pytest_terminal_summary(terminalreporter):
    """Echo one PASS/FAIL line per acceptance criterion after the run."""
    from test_acceptance import CRITERIA

    outcome = {}
    for key in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(key, []):
            name = getattr(rep, "nodeid", "").rpartition("::")[2]
            if not name.startswith("test_criterion_"):
                continue
            # sub-checks such as test_criterion_7_gold_fuzzed count towards criterion 7
            name = "_".join(name.split("_")[:3]).partition("[")[0]
            if key != "passed":
                outcome[name] = "FAIL"
            elif rep.when == "call":
                outcome.setdefault(name, "PASS")
    if not any(n.startswith("test_criterion_") for n in outcome):
        return
    terminalreporter.section("acceptance criteria")
    for n, text in CRITERIA.items():
        status = outcome.get(f"test_criterion_{n}", "NOT RUN")
        terminalreporter.write_line(f"[{status}] criterion {n}: {text}")
