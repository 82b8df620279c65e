import numpy as np
import pytest

SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (SX, SY, SZ)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_hermitian(n, rng):
    a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return (a + a.conj().T) / 2


def random_complex(n, m, rng):
    return rng.standard_normal((n, m)) + 1j * rng.standard_normal((n, m))


_ACCEPTANCE: dict[int, tuple[str, str]] = {}


@pytest.fixture
def criterion_log(request):
    """Collect a one-line summary for an acceptance criterion."""
    def log(line: str):
        request.node.user_properties.append(("criterion_detail", line))

    return log


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or rep.when not in ("call", "setup"):
        return
    n = marker.args[0]
    if rep.when == "setup" and rep.passed:
        return
    detail = "; ".join(v for k, v in item.user_properties if k == "criterion_detail")
    if rep.failed:
        msg = str(rep.longrepr).strip().splitlines()[-1] if rep.longrepr else ""
        detail = f"{detail}; {msg}" if detail else msg
    _ACCEPTANCE[n] = ("PASS" if rep.passed else "FAIL", detail)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_ACCEPTANCE):
        status, detail = _ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:>2}: {status}  {detail}")
