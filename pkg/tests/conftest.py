import functools

import pytest

from johnforge.geometry import rasterize, whitney


@functools.lru_cache(maxsize=None)
def cached_mask(spec, level):
    return rasterize(spec, level)


@functools.lru_cache(maxsize=None)
def cached_whitney(spec, level):
    return whitney(cached_mask(spec, level))


@pytest.fixture(scope="session")
def mask_of():
    return cached_mask


@pytest.fixture(scope="session")
def whitney_of():
    return cached_whitney


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[n])
