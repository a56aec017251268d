import dataclasses

import pytest

from ptvsim.model import ScenarioConfig, ScenarioKind


@pytest.fixture
def base():
    return ScenarioConfig()


def with_(cfg: ScenarioConfig, **sections):
    """Replace fields inside config sections: with_(cfg, irs={"element_count": 0})."""
    changes = {}
    for name, values in sections.items():
        current = getattr(cfg, name)
        if dataclasses.is_dataclass(current):
            changes[name] = dataclasses.replace(current, **values)
        else:
            changes[name] = values
    return cfg.replace(**changes)


ALL_KINDS = list(ScenarioKind)


# -- acceptance reporting ---------------------------------------------------

_CRITERIA: dict[str, tuple[str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(id, text): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    cid, text = marker.args
    if rep.when == "call" or (rep.when == "setup" and rep.outcome != "passed"):
        _CRITERIA[cid] = ("PASS" if rep.passed else "FAIL", text)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for cid in sorted(_CRITERIA, key=lambda c: int(c[1:])):
        status, text = _CRITERIA[cid]
        terminalreporter.write_line(f"{status} {cid}: {text}")
