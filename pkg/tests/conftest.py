import os
import sys

import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, os.path.dirname(__file__))

settings.register_profile(
    "default",
    deadline=None,
    max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

_RESULTS: list[tuple[int, str, bool, str]] = []



@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark and rep.when == "call":
        _RESULTS.append((mark.args[0], item.name, rep.passed, getattr(item, "detail", "")))


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for num, name, ok, detail in sorted(_RESULTS):
        terminalreporter.write_line(f"criterion {num:>2}: {'PASS' if ok else 'FAIL'}  {name}  {detail}")


@pytest.fixture
def detail(request):
    """Attach a one-line summary to the acceptance report."""

    def put(text: str) -> None:
        request.node.detail = text
        print(f"[criterion detail] {text}")

    return put
