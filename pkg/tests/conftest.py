import sys
import time
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from stabwire import classify as cl  # noqa: E402
from stabwire.cli import load_enumeration  # noqa: E402
from stabwire.tensor import find_fixtures, representatives  # noqa: E402

from acceptance_log import LINES as ACCEPTANCE_LINES  # noqa: E402


@pytest.fixture(scope="session")
def cache_dir(tmp_path_factory):
    return tmp_path_factory.mktemp("stabwire-cache")


@pytest.fixture(scope="session")
def enumeration(cache_dir):
    """(all Lagrangians, canonical ordinals, seconds taken from scratch)."""
    t0 = time.perf_counter()
    tensors, canonical = load_enumeration(cache_dir, log=lambda s: None)
    return tensors, canonical, time.perf_counter() - t0


@pytest.fixture(scope="session")
def tensors(enumeration):
    return enumeration[0]


@pytest.fixture(scope="session")
def rep_ordinals(enumeration):
    tensors, canonical, _ = enumeration
    return representatives(tensors, canonical)


@pytest.fixture(scope="session")
def reps(tensors, rep_ordinals):
    return [tensors[i] for i in rep_ordinals]


@pytest.fixture(scope="session")
def swept(reps, rep_ordinals):
    t0 = time.perf_counter()
    report = cl.sweep(reps, rep_ordinals)
    return report, time.perf_counter() - t0


@pytest.fixture(scope="session")
def report(swept):
    return swept[0]


@pytest.fixture(scope="session")
def by_ordinal(reps, rep_ordinals):
    return dict(zip(rep_ordinals, reps))


@pytest.fixture(scope="session")
def fixtures(reps):
    return find_fixtures(reps)


@pytest.fixture(scope="session")
def class_reps(report, by_ordinal):
    """transmission class -> its first representative tensor."""
    return {c: by_ordinal[o] for c, o in cl.class_representatives(report).items()}


@pytest.fixture(scope="session")
def phi_reps(report, by_ordinal):
    """Phi letter -> first representative in that class."""
    out = {}
    for r in report.records:
        out.setdefault(r.phi_class, by_ordinal[r.canonical_ordinal])
    return out


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[k])
