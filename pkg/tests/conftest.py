import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from baode.bao import Signature
from baode.frames import Frame, complex_algebra

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def two_point_frame(T0, T1=(), dim=2, D=None):
    """A 2-point frame with identity substitutions; D defaults to the whole universe."""
    sig = Signature(dim)
    rels = [list(T0), list(T1)][:dim]
    return Frame.from_pairs(2, sig, rels, D=D)


@pytest.fixture
def noncommuting():
    return complex_algebra(two_point_frame([(0, 1)], [(1, 0)]))


def random_complex_algebra(seed, dim, n, density=None):
    from baode.generators import random_frame

    rng = np.random.default_rng(seed)
    d = float(rng.uniform(0.1, 0.9)) if density is None else density
    return complex_algebra(random_frame(rng, Signature(dim), n, d))


ACCEPTANCE = {}


def record(k, passed, elapsed, limit, detail=""):
    ok = passed and elapsed < limit
    ACCEPTANCE[k] = f"criterion {k}: {'PASS' if ok else 'FAIL'} ({elapsed:.1f}s of {limit}s) {detail}".rstrip()
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[k])
