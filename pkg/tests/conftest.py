import time
from contextlib import contextmanager

import pytest


class CriterionLog:
    def __init__(self):
        self.lines = {}

    @contextmanager
    def check(self, number, title, budget):
        """Time the block; a raised error or a blown runtime budget marks the criterion FAIL."""
        start = time.perf_counter()
        status, note = "FAIL", ""
        try:
            yield
            elapsed = time.perf_counter() - start
            if elapsed > budget:
                note = f" over budget {budget:g} s"
                raise AssertionError(f"criterion {number} took {elapsed:.4f} s, budget {budget:g} s")
            status = "PASS"
        except BaseException as exc:
            if not note:
                note = f" {type(exc).__name__}"
            raise
        finally:
            elapsed = time.perf_counter() - start
            line = f"criterion {number:>2} {status}  {title}  ({elapsed:.4f} s / {budget:g} s){note}"
            self.lines[number] = line
            print(line)


def pytest_configure(config):
    config.criterion_log = CriterionLog()


@pytest.fixture
def criterion(request):
    return request.config.criterion_log


def pytest_terminal_summary(terminalreporter, config):
    lines = config.criterion_log.lines
    if lines:
        terminalreporter.write_sep("=", "acceptance criteria")
        for number in sorted(lines):
            terminalreporter.write_line(lines[number])
