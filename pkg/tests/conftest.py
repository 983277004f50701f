import itertools
import os
import sys

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("ci", max_examples=200, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


def all_bits(n):
    """Every 0/1 vector of length n, lexicographic."""
    return [tuple(b) for b in itertools.product((0, 1), repeat=n)]


def naive_qubo_energy(linear, quadratic, offset, x):
    """Direct sum over the given dicts, independent of the library."""
    e = offset
    for i, a in linear.items():
        e += a * x[i]
    for (i, j), b in quadratic.items():
        e += b * x[i] * x[j]
    return e


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(results):
        terminalreporter.write_line(results[k])
