import pytest


@pytest.fixture(scope="session")
def cache_dir(tmp_path_factory):
    """One census cache shared by the whole session, so each E7 census is built once."""
    return tmp_path_factory.mktemp("census-cache")


def pytest_terminal_summary(terminalreporter):
    import sys

    module = sys.modules.get("tests.test_acceptance")
    if module is None or not module.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(module.RESULTS):
        terminalreporter.write_line(module.RESULTS[number])
