from __future__ import annotations

import warnings

import pytest

from casimir_cnt import CNTFilm, FilmSpec
from casimir_cnt.film import DiluteRegimeWarning


@pytest.fixture(scope="session")
def film():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DiluteRegimeWarning)
        return CNTFilm(FilmSpec())


ACCEPTANCE = pytest.StashKey[list]()


@pytest.fixture(scope="session")
def acceptance_log(request):
    """Callable recording one PASS/FAIL line per acceptance criterion."""
    lines = request.config.stash.setdefault(ACCEPTANCE, [])

    def record(number, name, passed, detail, extra=()):
        line = f"{'PASS' if passed else 'FAIL'}  criterion {number:>2} {name}: {detail}"
        lines.append(line)
        lines.extend(f"      {x}" for x in extra)
        print(line)
        for x in extra:
            print("     ", x)
        return passed

    return record


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(ACCEPTANCE, [])
    if lines:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
