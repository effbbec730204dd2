import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent))

SUITE_LIMIT_SECONDS = 300
_start = time.perf_counter()


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", {}) if mod else {}
    if not results:
        return
    elapsed = time.perf_counter() - _start
    terminalreporter.section("acceptance criteria")
    for n in sorted(results):
        line = results[n]
        if n == 13:
            line = line.replace("suite time is reported at the end of the run", f"suite {elapsed:.1f}s")
            if elapsed >= SUITE_LIMIT_SECONDS:
                line = line.replace(" PASS ", " FAIL ", 1) + f" (over {SUITE_LIMIT_SECONDS}s)"
        terminalreporter.write_line(line)
