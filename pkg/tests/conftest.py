"""Shared hypothesis strategies and helpers."""

from fractions import Fraction

from hypothesis import strategies as st

from dyadiff.dyadic import DyadicInterval, DyadicPoint

points = st.builds(
    DyadicPoint,
    mantissa=st.integers(min_value=0, max_value=1 << 24),
    exponent=st.integers(min_value=0, max_value=16),
)

intervals = st.builds(
    DyadicInterval,
    level=st.integers(min_value=-8, max_value=16),
    index=st.integers(min_value=0, max_value=1 << 10),
)


def frac(x) -> Fraction:
    return Fraction(x)


# one line per acceptance criterion, echoed after the test summary so the
# verdicts survive pytest's output capture
acceptance_lines: list[tuple[int, str]] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(acceptance_lines):
            terminalreporter.write_line(line)
