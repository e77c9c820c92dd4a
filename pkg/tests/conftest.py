from functools import lru_cache
from pathlib import Path

import pytest

from histforcing import Const, Var, amalgamate, atomic
from histforcing.generate import corpus_file_name, corpus_specs
from histforcing.serialize import loads

CORPUS_DIR = Path(__file__).resolve().parent.parent / "corpus"


@lru_cache(maxsize=None)
def load_corpus():
    """The shipped corpus as (spec, condition) pairs in seed order."""
    return tuple((s, loads((CORPUS_DIR / corpus_file_name(s)).read_text())) for s in corpus_specs())


def trivial_amalgam():
    return amalgamate(0, Const(1), (), [(atomic(i, 3), ()) for i in range(3)])


def chain_amalgam(indices=(0, 1, 2, 3, 4, 5)):
    return amalgamate(0, Var(0), (), [(atomic(i, 6), (i,)) for i in indices])


@pytest.fixture
def trivial():
    return trivial_amalgam()


@pytest.fixture
def chain6():
    return chain_amalgam()


@pytest.fixture(scope="session")
def corpus():
    return load_corpus()


# one line per acceptance criterion, printed after the run
ACCEPTANCE_LINES = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[n])
