import pytest

_acceptance: dict[str, dict] = {}


def pytest_runtest_makereport(item, call):
    marker = item.get_closest_marker("acceptance")
    if marker is None or call.when not in ("setup", "call"):
        return
    crit_id, title = marker.args
    entry = _acceptance.setdefault(crit_id, {"title": title, "ok": True, "seconds": 0.0})
    if call.excinfo is not None and not call.excinfo.errisinstance(pytest.skip.Exception):
        entry["ok"] = False
    entry["seconds"] += call.duration


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for crit_id in sorted(_acceptance, key=lambda c: int(c.lstrip("AC"))):
        e = _acceptance[crit_id]
        status = "PASS" if e["ok"] else "FAIL"
        terminalreporter.write_line(f"{crit_id:<4} {status}  {e['title']}  ({e['seconds']:.2f}s)")
