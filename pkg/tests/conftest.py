import pytest

from uprsma.scene import DropConfig, Scenario, UserRadio, generate_drop

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def report():
    """Record one acceptance verdict line; printed again in the terminal summary."""

    def _report(number: int, ok: bool, detail: str):
        line = f"[acceptance {number:>2}] {'PASS' if ok else 'FAIL'}  {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)

    return _report


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def make_scenario(gains, p_max=0.2, packets=(8000, 8000), bandwidth=1e6, noise=4e-21):
    users = [UserRadio(i, g, p_max if not isinstance(p_max, (list, tuple)) else p_max[i], pl)
             for i, (g, pl) in enumerate(zip(gains, packets))]
    return Scenario(users, bandwidth, noise)


@pytest.fixture
def drop4():
    return generate_drop(DropConfig(n_users=4, seed=7))
