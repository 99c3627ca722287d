import numpy as np
import pytest

FIVE_P = [0.005, 0.049, 0.050, 0.051, 0.700]
FIVE_Z = [2.807, 1.969, 1.960, 1.951, 0.385]
FIVE_ADJ = [0.025, 0.064, 0.064, 0.064, 0.700]
FIVE_FDR = [0.025, 0.122, 0.083, 0.064, 0.700]
FIVE_LB = [0.019, 0.126, 0.128, 0.130, 0.481]


def even_grid(m):
    return (np.arange(1, m + 1) - 0.5) / m


def random_pvectors(n, seed, max_m=200, ties=True):
    """Random p-vectors; every other one draws from a small pool to force ties."""
    rng = np.random.default_rng(seed)
    out = []
    for k in range(n):
        m = int(rng.integers(1, max_m + 1))
        if ties and k % 2:
            pool = rng.random(max(1, m // 3))
            out.append(rng.choice(pool, m))
        else:
            out.append(rng.random(m))
    return out


_acceptance = []


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(name): exit criterion for the build")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    if rep.when == "call" or (rep.when == "setup" and rep.outcome != "passed"):
        _acceptance.append((marker.args[0], item.name, rep.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for name, test, outcome in _acceptance:
        status = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"{status}  {name}  [{test}]")
