import functools

from crossing_lab.dynamics import DimensionlessLZProblem, integrate_dimensionless

ACCEPTANCE_LINES = []


@functools.lru_cache(maxsize=None)
def trajectory(lam, s0=-10.0, s_end=50.0, step=5e-4, stride=1):
    """Shared default-resolution runs; integrations dominate the suite's runtime."""
    return integrate_dimensionless(
        DimensionlessLZProblem(lam, s0=s0, s_end=s_end, step=step, stride=stride)
    )


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
