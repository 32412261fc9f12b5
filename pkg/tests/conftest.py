import contextlib

import pytest

import runlog

runlog.install()

from plankcover import EngineConfig, gen_parallel, run_cover  # noqa: E402

_CRITERIA = []


@pytest.fixture
def criterion():
    """Context manager recording one acceptance criterion as pass/fail."""

    @contextlib.contextmanager
    def record(number, title):
        try:
            yield
        except BaseException as exc:
            msg = str(exc).strip().splitlines()[0] if str(exc).strip() else type(exc).__name__
            _CRITERIA.append((number, title, False, msg))
            raise
        _CRITERIA.append((number, title, True, ""))

    return record


def pytest_collection_modifyitems(items):
    # audits of the run log go last so they see every run of the session
    items.sort(key=lambda item: item.get_closest_marker("audit") is not None)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, ok, msg in sorted(_CRITERIA, key=lambda r: r[0]):
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {number:>2}: {title}"
        if msg:
            line += f"  ({msg})"
        terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def stacked10():
    inst = gen_parallel(10, 0.2, (0, 0, 1))
    return inst, run_cover(inst, EngineConfig(mode="fixed_order"))


@pytest.fixture(scope="session")
def stacked9():
    inst = gen_parallel(9, 0.2, (0, 0, 1))
    return inst, run_cover(inst, EngineConfig(mode="fixed_order"))
