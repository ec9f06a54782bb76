import os
from pathlib import Path

import hypothesis
import numpy as np
import pytest

from rnghorizon.embeddings import EmbeddingModel
from rnghorizon.similarity import CosineSpace, EuclideanSpace

hypothesis.settings.register_profile("default", max_examples=60, deadline=None)
hypothesis.settings.register_profile("fast", max_examples=10, deadline=None)
hypothesis.settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

DATA = Path(__file__).resolve().parent.parent / "data"


@pytest.fixture
def collinear():
    # a=(0,0), b=(1,0), c=(3,0)
    return EuclideanSpace([[0, 0], [1, 0], [3, 0]], vocab=["a", "b", "c"])


@pytest.fixture
def collinear_even():
    # a=(0,0), b=(1,0), c=(2,0)
    return EuclideanSpace([[0, 0], [1, 0], [2, 0]], vocab=["a", "b", "c"])


@pytest.fixture
def square():
    return EuclideanSpace([[0, 0], [1, 0], [1, 1], [0, 1]], vocab=["p0", "p1", "p2", "p3"])


@pytest.fixture
def orthogonal_mix():
    # v1, v2 unit orthogonal; v = v1 + v2
    m = EmbeddingModel(["v1", "v2", "v"], [[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]])
    return CosineSpace(m)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def corpus_path(name):
    p = DATA / name
    if not p.exists():
        pytest.fail(f"{p} missing; run `python scripts/fetch_corpus.py` first")
    return p


@pytest.fixture(scope="session")
def corpus_space():
    """Cosine space over a PPMI model of the ~12 MB desk corpus (built once, ~30 s)."""
    from rnghorizon.parallel import default_threads
    from rnghorizon.pmi import build_pmi_model, read_corpus

    docs = read_corpus(corpus_path("corpus.txt.gz"))
    model = build_pmi_model(docs, window=2, min_count=5, target_dim=2000, seed=0, threads=default_threads())
    return CosineSpace(model)


# ---------------------------------------------------------------- acceptance report

_criteria = {}


def pytest_runtest_logreport(report):
    mark = getattr(report, "criterion", None)
    if mark is None:
        return
    num, title = mark
    prev = _criteria.get(num, (title, "PASS", 0.0))
    status = prev[1]
    if report.failed:
        status = "FAIL"
    elif report.skipped and report.when == "setup":
        status = "SKIP"
    _criteria[num] = (title, status, prev[2] + report.duration)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    mark = item.get_closest_marker("criterion")
    if mark is not None:
        outcome.get_result().criterion = tuple(mark.args)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_criteria):
        title, status, secs = _criteria[num]
        terminalreporter.write_line(f"criterion {num:>2}  {status}  {title}  ({secs:.1f}s)")
