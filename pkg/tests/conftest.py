import pytest

_REPORT: list[str] = []


@pytest.fixture(scope="session")
def report():
    """Collects one verdict line per acceptance criterion for the terminal summary."""

    def record(criterion: int, ok: bool, detail: str) -> None:
        line = f"criterion {criterion}: {'PASS' if ok else 'FAIL'}  {detail}"
        _REPORT.append(line)
        print(line)

    return record


def pytest_terminal_summary(terminalreporter):
    if _REPORT:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_REPORT):
            terminalreporter.write_line(line)
