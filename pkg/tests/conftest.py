import numpy as np
import pytest

from rlncgf.fields import FIELDS, get_tables
from rlncgf.kernels import FeatureSet, alloc_region, available_kernels

EMULATED = FeatureSet.everything()


def poly_mul_lists(a, b, poly):
    """Independent oracle: coefficient lists, convolution mod 2, long division."""
    bits = lambda x: [(x >> i) & 1 for i in range(max(x.bit_length(), 1))]
    pa, pb, pm = bits(a), bits(b), bits(poly)
    prod = [0] * (len(pa) + len(pb) - 1)
    for i, x in enumerate(pa):
        for j, y in enumerate(pb):
            prod[i + j] ^= x & y
    deg = len(pm) - 1
    for top in range(len(prod) - 1, deg - 1, -1):
        if prod[top]:
            for k, m in enumerate(pm):
                prod[top - deg + k] ^= m
    return sum(v << i for i, v in enumerate(prod[:deg]))


def random_region(rng, n):
    r = alloc_region(n)
    r[:] = rng.integers(0, 256, size=r.size, dtype=np.uint8)
    return r


@pytest.fixture(params=list(FIELDS.values()), ids=lambda s: s.name)
def spec(request):
    return request.param


@pytest.fixture
def tables(spec):
    return get_tables(spec)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def kernel_cases():
    return [(s, k) for s in FIELDS.values() for k in available_kernels(s, EMULATED)]


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, label): acceptance criterion number and label")


def pytest_collection_modifyitems(items):
    for item in items:
        m = item.get_closest_marker("criterion")
        if m is not None:
            item.user_properties.append(("criterion", m.args))


_RANK = {"passed": 0, "skipped": 1, "failed": 2}


def pytest_terminal_summary(terminalreporter):
    """One line per acceptance criterion; the worst outcome of its tests wins."""
    results = {}
    for outcome in ("passed", "failed", "skipped"):
        for rep in terminalreporter.stats.get(outcome, []):
            props = dict(getattr(rep, "user_properties", []))
            if "criterion" not in props or (rep.when == "setup" and outcome == "passed"):
                continue
            key = props["criterion"]
            if _RANK[outcome] >= _RANK[results.get(key, "passed")]:
                results[key] = outcome
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for (n, label), outcome in sorted(results.items()):
        tag = {"passed": "PASS", "failed": "FAIL", "skipped": "SKIP"}[outcome]
        terminalreporter.write_line(f"[{tag}] criterion {n}: {label}")
