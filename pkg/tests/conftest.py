import os
from pathlib import Path

import pytest

from stlab.angles import build_sequence
from stlab.config import load_config


def pytest_addoption(parser):
    parser.addoption("--long", action="store_true", default=False,
                     help="run long-running table cells (minutes to hours)")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--long"):
        return
    skip = pytest.mark.skip(reason="needs --long")
    for item in items:
        if "long" in item.keywords:
            item.add_marker(skip)


@pytest.fixture(scope="session")
def run_long(request):
    return request.config.getoption("--long")


@pytest.fixture(scope="session")
def cfg():
    # trace caches are keyed by a curve fingerprint, so sharing the user
    # cache across runs is safe and saves minutes
    return load_config()


@pytest.fixture(scope="session")
def curves(cfg):
    return {c.label: c for c in cfg.curves}


@pytest.fixture(scope="session")
def sequence(cfg):
    memo = {}

    def get(label, length):
        have = memo.get(label)
        if have is None or have.length < length:
            memo[label] = build_sequence(cfg.curve(label), length, cfg.cache_dir,
                                         cfg.thresholds, cfg.threads)
        return memo[label].prefix(length)

    return get


# ---------------------------------------------------------------- acceptance
#
# Tests marked @pytest.mark.criterion(n, title) are summarised at the end of
# the run, one line per criterion.  Table cells outside tolerance are listed
# through the `flag_cells` fixture.

_criteria = {}
_flagged = []


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        entry = _criteria.setdefault(mark.args[0], {"title": mark.args[1], "outcomes": []})
        entry["outcomes"].append(rep.outcome)


@pytest.fixture
def flag_cells():
    def flag(criterion, cells):
        for c in cells:
            if c.within_tol is False:
                _flagged.append((criterion, c))
    return flag


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for n in sorted(_criteria):
        outcomes = _criteria[n]["outcomes"]
        if "failed" in outcomes:
            status = "FAIL"
        elif all(o == "skipped" for o in outcomes):
            status = "SKIP"
        else:
            status = "PASS"
        note = ""
        skipped = outcomes.count("skipped")
        if status == "PASS" and skipped:
            note = f" ({skipped} long part(s) not run; use --long)"
        tr.write_line(f"criterion {n}: {status}  {_criteria[n]['title']}{note}")
    for n, c in _flagged:
        tr.write_line(f"flagged cell (criterion {n}): figure {c.figure} {c.curve} K={c.K} "
                      f"computed {c.computed:.6f} printed {c.expected} "
                      f"|diff| {c.abs_diff:.2e}")
