import pytest

from shortlists import kernels
from shortlists.combinators import PipelineConfig, build_hk
from shortlists.demo import demo_machine_table
from shortlists.shortlist import HkFamily, StandardMachine


@pytest.fixture(params=kernels.available())
def backend(request, monkeypatch):
    """Run the test once per kernel backend (module-level selection patched)."""
    be = kernels.get_backend(request.param)
    monkeypatch.setattr(kernels, "backend", be)
    return be


@pytest.fixture(scope="session")
def hk_graphs():
    return {k: build_hk(PipelineConfig(k=k, seed=42)) for k in (2, 3)}


@pytest.fixture(scope="session")
def demo_machine():
    return StandardMachine(demo_machine_table(7), HkFamily(k_max=4, seed=0))


_acceptance_lines: list[str] = []


@pytest.fixture
def acceptance():
    """Record one pass/fail line for an acceptance criterion."""

    def record(number, title, ok, detail=""):
        line = f"criterion {number} [{'PASS' if ok else 'FAIL'}] {title}" + (f" :: {detail}" if detail else "")
        _acceptance_lines.append(line)
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if _acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_acceptance_lines):
            terminalreporter.write_line(line)
