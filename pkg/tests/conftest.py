from collections import defaultdict
from pathlib import Path

import pytest

DATA = Path(__file__).resolve().parents[1] / "src" / "treelift" / "data"
TESTDATA = Path(__file__).resolve().parent / "data"

# criterion number -> [(test id, passed)]
_CRITERIA: dict[int, list] = defaultdict(list)
_TITLES: dict[int, str] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion this test reproduces")


def pytest_runtest_makereport(item, call):
    marker = item.get_closest_marker("criterion")
    if marker is None or call.when != "call":
        return
    n = marker.args[0]
    if len(marker.args) > 1:
        _TITLES[n] = marker.args[1]
    _CRITERIA[n].append((item.nodeid, call.excinfo is None))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        results = _CRITERIA[n]
        ok = all(passed for _, passed in results)
        passed = sum(passed for _, passed in results)
        title = _TITLES.get(n, "")
        terminalreporter.write_line(
            f"criterion {n}: {'PASS' if ok else 'FAIL'}  ({passed}/{len(results)} checks)  {title}"
        )


@pytest.fixture(scope="session")
def data_dir():
    return DATA


@pytest.fixture(scope="session")
def grammar():
    from treelift import load_grammar

    cache = {}

    def get(name):
        if name not in cache:
            cache[name] = load_grammar(DATA / f"{name}.grammar")
        return cache[name]

    return get
