import json

import pytest

from sfgcontrol.lab.config import reference_defaults, parse_config
from sfgcontrol.lab.experiments import build


@pytest.fixture(scope="session")
def default_setup():
    """Published configuration on the moment path (1024 modes, flat 60 nm band)."""
    return build(parse_config(json.dumps(reference_defaults())))


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(results):
        terminalreporter.write_line(results[k])
