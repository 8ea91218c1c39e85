import pytest

# criterion -> [title, passed, seconds]
_ACCEPTANCE: dict = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(k, title): test belongs to acceptance criterion k")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None or (rep.when != "call" and not rep.failed):
        return
    k = marker.args[0]
    entry = _ACCEPTANCE.setdefault(k, [marker.kwargs.get("title", ""), True, 0.0])
    entry[1] = entry[1] and rep.passed
    entry[2] += rep.duration


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(_ACCEPTANCE):
        title, ok, secs = _ACCEPTANCE[k]
        terminalreporter.write_line(f"ACCEPTANCE {k:>2} {'PASS' if ok else 'FAIL'}  {title} ({secs:.1f} s)")
