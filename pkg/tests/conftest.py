from __future__ import annotations

import sys
from pathlib import Path

from hypothesis import HealthCheck, settings

settings.register_profile(
    "default",
    max_examples=40,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


def _acceptance_module():
    return next((m for name, m in list(sys.modules.items()) if name.endswith("test_acceptance")), None)


def pytest_terminal_summary(terminalreporter):
    mod = _acceptance_module()
    if mod is None:
        return
    files = set(mod.PROPERTY_FILES)
    counts = {"passed": 0, "failed": 0}
    for outcome in counts:
        for rep in terminalreporter.stats.get(outcome, []):
            if getattr(rep, "when", "call") in ("call", "setup") and Path(rep.nodeid.split("::")[0]).name in files:
                counts[outcome] += 1
    if counts["passed"] or counts["failed"]:
        mod.PROPERTY_OUTCOME.update(counts)
    lines = mod.summary_lines()
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
