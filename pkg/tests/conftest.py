import re
from collections import OrderedDict

from hypothesis import settings

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")

_CRITERION = re.compile(r"test_acceptance\.py::test_criterion_(\d+)_")


def pytest_terminal_summary(terminalreporter):
    status = OrderedDict()
    for outcome in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(outcome, []):
            if getattr(rep, "when", "call") not in ("call", "setup"):
                continue
            m = _CRITERION.search(rep.nodeid)
            if m:
                n = int(m.group(1))
                status.setdefault(n, []).append((rep.nodeid.split("::")[-1], outcome == "passed"))
    if not status:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(status):
        parts = status[n]
        ok = all(p for _, p in parts)
        failed = [name for name, p in parts if not p]
        tail = "" if ok else "  (failing: " + ", ".join(failed) + ")"
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}{tail}")
