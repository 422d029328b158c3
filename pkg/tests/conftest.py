import math

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from entiredyn.dynamics import detect_cycles
from entiredyn.presets import FUNCTION_PRESETS, preset_function
from entiredyn.zoo import singular_set

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

_cache = {}


def preset(name):
    if name not in _cache:
        _cache[name] = preset_function(name)
    return _cache[name]


def cycles_of(f):
    key = ("cycles", repr(f.to_json()))
    if key not in _cache:
        _cache[key] = detect_cycles(f, singular_set(f).values)
    return _cache[key]


@pytest.fixture(params=FUNCTION_PRESETS)
def any_preset(request):
    return preset(request.param)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_box(rng, lo=-3.0, hi=3.0, min_side=0.4):
    x0, y0 = rng.uniform(lo, hi - min_side, 2)
    w, h = rng.uniform(min_side, hi - x0), rng.uniform(min_side, hi - y0)
    return (float(x0), float(x0 + w), float(y0), float(y0 + h))


FIG1A_C = 2 + 0.5j * math.pi


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
