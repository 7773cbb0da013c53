import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

import acceptance_log  # noqa: E402


def pytest_terminal_summary(terminalreporter):
    if not acceptance_log.LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in acceptance_log.LINES:
        terminalreporter.write_line(line)
    if acceptance_log.DETAILS:
        terminalreporter.section("acceptance details")
        for line in acceptance_log.DETAILS:
            terminalreporter.write_line(line)
