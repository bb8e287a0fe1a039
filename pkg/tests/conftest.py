import warnings

import pytest
from hypothesis import settings

from leaderless_crn import corpus
from leaderless_crn.compiler import compile_spec
from leaderless_crn.kernels import compiled_available

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

KERNELS = ["python"] + (["compiled"] if compiled_available() else [])


@pytest.fixture(scope="session")
def intro():
    return corpus.load_crn("intro")


@pytest.fixture(scope="session")
def compiled():
    """Compiled corpus specs keyed by bundled name."""
    out = {}
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for name in corpus.CORPUS_SPECS:
            out[name] = compile_spec(corpus.load_spec(name))
    return out


# Acceptance results, printed once per criterion at the end of the session.
CRITERIA: dict[int, tuple[bool, str]] = {}


def record_criterion(number: int, ok: bool, detail: str) -> None:
    CRITERIA[number] = (bool(ok), detail)


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(CRITERIA):
        ok, detail = CRITERIA[number]
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
