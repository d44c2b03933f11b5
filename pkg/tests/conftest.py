import pytest

from teachlab import kernels
from teachlab.concepts import Domain, build_class
from teachlab.headtail import HTParams, build_headtail
from teachlab.rectangles import build_rectangles


@pytest.fixture(scope="session")
def rect2():
    """Rectangles, N=2, widths (4, 16): 42 points."""
    return build_rectangles(2, (4, 16))


@pytest.fixture(scope="session")
def ht2():
    """Head/tail, k=2, N=2, widths (2, 12): 60 points, 171528 concepts."""
    return build_headtail(HTParams(2, 2, (2, 12)))


@pytest.fixture(scope="session")
def ht1():
    return build_headtail(HTParams(1, 2, (2,)))


@pytest.fixture(scope="session", params=sorted(kernels.available_backends()))
def backend(request):
    return kernels.get_backend(request.param)


def cls(*bits):
    """Ad-hoc class from bitstrings, e.g. cls("00", "01")."""
    return build_class(Domain.plain(len(bits[0])), bits)


_ACCEPTANCE: list[str] = []


@pytest.fixture
def criterion():
    """Record one acceptance line: criterion(number, ok, detail)."""

    def record(number, ok, detail):
        line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}"
        _ACCEPTANCE.append(line)
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE:
            terminalreporter.write_line(line)
