import numpy as np
import pytest

from vpmcf.grid import TorusGrid
from vpmcf.initial import InitialSpec, make_initial_phase, smoothed_signed_distance
from vpmcf.obstacles import Ball, ObstacleSet, build_forcing_template


def circle_phase(grid, eps, r=0.3, center=(0.5, 0.5), L=0.2):
    spec = InitialSpec((Ball(center, r),), saturation=L)
    return make_initial_phase(smoothed_signed_distance(spec, grid), eps)


@pytest.fixture
def free_template():
    grid = TorusGrid(2, 128)
    return build_forcing_template(ObstacleSet(), grid, 0.04)


ACCEPTANCE = pytest.StashKey[dict]()


@pytest.fixture
def criterion(request):
    """Record one PASS/FAIL line for an acceptance criterion, then assert it."""

    def record(number, title, checks):
        lines = request.config.stash.setdefault(ACCEPTANCE, {})
        ok = all(passed for _, passed in checks)
        detail = "; ".join(f"{'ok' if passed else 'FAILED'} {text}" for text, passed in checks)
        lines[number] = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {title} | {detail}"
        print(lines[number])
        assert ok, lines[number]

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(ACCEPTANCE, {})
    if lines:
        terminalreporter.section("acceptance criteria")
        for number in sorted(lines):
            terminalreporter.write_line(lines[number])
