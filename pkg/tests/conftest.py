import time

import pytest

from reidemeister.catalog import GpnSpec, build_gpn, build_symmetric, parse_selector


@pytest.fixture(scope="session")
def g33():
    return build_gpn(GpnSpec(3, 3))


@pytest.fixture(scope="session")
def g53():
    return build_gpn(GpnSpec(5, 3))


@pytest.fixture(scope="session")
def s3():
    return build_symmetric(3)


@pytest.fixture(scope="session")
def g33_entry():
    return parse_selector("gpn:3:3")



# acceptance criteria report ------------------------------------------------

_LINES = pytest.StashKey[dict]()


class Criterion:
    """Times one acceptance criterion and records a one-line verdict."""

    def __init__(self, lines, number, title, limit):
        self.lines, self.number, self.title, self.limit = lines, number, title, limit
        self.note = ""

    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, exc_type, exc, tb):
        elapsed = time.perf_counter() - self.start
        status, reason = "PASS", self.note
        if exc is not None:
            status, reason = "FAIL", str(exc).splitlines()[0] if str(exc) else exc_type.__name__
        elif self.limit is not None and elapsed > self.limit:
            status, reason = "FAIL", f"took {elapsed:.2f}s"
        limit = f", limit {self.limit:g}s" if self.limit is not None else ""
        line = f"criterion {self.number:>2} {status}  {self.title} ({elapsed:.2f}s{limit})"
        self.lines[self.number] = line + (f": {reason}" if reason else "")
        print(self.lines[self.number])
        if exc is None and status == "FAIL":
            raise AssertionError(f"criterion {self.number} exceeded {self.limit}s ({elapsed:.2f}s)")
        return False


@pytest.fixture
def criterion(request):
    lines = request.config.stash.setdefault(_LINES, {})
    return lambda number, title, limit=None: Criterion(lines, number, title, limit)


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_LINES, {})
    if lines:
        terminalreporter.section("acceptance criteria")
        for number in sorted(lines):
            terminalreporter.write_line(lines[number])
