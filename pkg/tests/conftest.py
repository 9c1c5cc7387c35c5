import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

from parcycles._deep import raise_limits

# the search threads need a deep recursion limit; set it once, up front
raise_limits()


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is not None and mod.REPORT:
        terminalreporter.section("acceptance criteria")
        for line in mod.REPORT:
            terminalreporter.write_line(line)
