import time
from contextlib import contextmanager

import pytest

_LINES = pytest.StashKey[list]()


class Criterion:
    """Named sub-checks of one acceptance criterion; all are evaluated before failing."""

    def __init__(self, number, title, limit):
        self.number, self.title, self.limit = number, title, limit
        self.checks = []
        self.elapsed = None

    def check(self, name, ok):
        self.checks.append((name, bool(ok)))
        return bool(ok)

    @property
    def failed(self):
        out = [name for name, ok in self.checks if not ok]
        if self.elapsed is not None and self.elapsed >= self.limit:
            out.append(f"runtime {self.elapsed:.2f} s >= {self.limit} s")
        return out

    def line(self):
        verdict = "FAIL" if self.failed else "PASS"
        text = f"criterion {self.number:2d}: {verdict}  {self.title} ({self.elapsed:.2f} s, limit {self.limit} s)"
        if self.failed:
            text += "; failed: " + "; ".join(self.failed)
        return text


@pytest.fixture
def acceptance(request):
    lines = request.config.stash.setdefault(_LINES, [])

    @contextmanager
    def run(number, title, limit):
        c = Criterion(number, title, limit)
        start = time.perf_counter()
        try:
            yield c
        except Exception as exc:
            c.check(f"raised {type(exc).__name__}: {exc}", False)
        finally:
            c.elapsed = time.perf_counter() - start
            lines.append(c.line())
            print(c.line())
        assert not c.failed, c.line()

    return run


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_LINES, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
