import pytest

from creditbackbone import _kernels
from creditbackbone.model import AttributeClass, AttributeTable, EntityId, Snapshot

_ACCEPTANCE: dict[str, str] = {}


@pytest.fixture(params=["numba", "numpy"])
def backend(request, monkeypatch):
    """Run the test once per kernel implementation."""
    if request.param == "numpy":
        monkeypatch.setenv(_kernels.ENV_FLAG, "1")
    else:
        if _kernels.NUMBA_KERNELS is None:
            pytest.skip("numba unavailable")
        monkeypatch.setenv(_kernels.ENV_FLAG, "0")
    assert _kernels.active().name == request.param
    return request.param


def snap(records, year=2000, attrs=None):
    """Snapshot from ``(bank, firm, amount)`` tuples."""
    return Snapshot.from_records(year, records, attrs)


def attrs(banks=None, sectors=None, locations=None):
    recs = []
    for code, v in (banks or {}).items():
        recs.append((EntityId.bank(code), AttributeClass.BANK_TYPE, v))
    for code, v in (sectors or {}).items():
        recs.append((EntityId.firm(code), AttributeClass.SECTOR, v))
    for code, v in (locations or {}).items():
        recs.append((EntityId.firm(code), AttributeClass.LOCATION, v))
    return AttributeTable(recs)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None or rep.when != "call":
        return
    label = marker.args[0]
    status = "PASS" if rep.passed else "FAIL"
    if _ACCEPTANCE.get(label) != "FAIL":
        _ACCEPTANCE[label] = status


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for label in sorted(_ACCEPTANCE, key=lambda s: int(s.split()[0])):
        terminalreporter.write_line(f"[{_ACCEPTANCE[label]}] {label}")
