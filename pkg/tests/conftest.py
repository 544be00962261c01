import pathlib

import pytest

FIXTURES = pathlib.Path(__file__).parent / "fixtures"
CORPUS = pathlib.Path(__file__).parent.parent / "corpus"


@pytest.fixture(scope="session")
def fixtures_dir() -> pathlib.Path:
    return FIXTURES


@pytest.fixture(scope="session")
def corpus_dir() -> pathlib.Path:
    assert CORPUS.is_dir(), "bundled corpus missing; run `boilercut make-corpus --out corpus`"
    return CORPUS


@pytest.fixture(scope="session")
def real_page_bytes(fixtures_dir) -> bytes:
    return (fixtures_dir / "real_page.html").read_bytes()


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    # one visible pass/fail line per acceptance criterion
    if report.when == "call" and item.get_closest_marker("acceptance"):
        status = "PASS" if report.passed else "FAIL"
        capman = item.config.pluginmanager.getplugin("capturemanager")
        if capman:
            with capman.global_and_fixture_disabled():
                print(f"\n[acceptance] {item.name}: {status}")
        else:
            print(f"\n[acceptance] {item.name}: {status}")


def pytest_configure(config):
    config.addinivalue_line(
        "markers", "acceptance: end-to-end acceptance criterion")
