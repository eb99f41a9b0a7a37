"""Shared expensive fixtures: fully trained models reused across files.

Everything here is session-scoped and lazy, so running a single unit
test file never triggers training it does not need.
"""

import sys

import pytest

import noma_ae as na


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    # surface the acceptance pass/fail lines even when capture hides them
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "REPORT_LINES", None) if mod else None
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def lambda10_model():
    """Reference-scale run with all loss weight on user 1 at equal 6 dB
    SNRs; exercises the extreme end of the weighted loss."""
    cfg = na.TrainingConfig(
        dims=na.SystemDims(k=(2, 2), n=2),
        weights=na.LossWeights((1.0, 0.0)),
        channel=na.ChannelSpec((6.0, 6.0)),
        seed=0,
    )
    return na.train(cfg)
