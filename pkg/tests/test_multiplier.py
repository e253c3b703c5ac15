import math

import numpy as np
import pytest

from vpmcf.errors import ConfigError
from vpmcf.grid import TorusGrid
from vpmcf.multiplier import MultiplierState, lambda_value, weighted_phase_volume
from vpmcf.obstacles import Ball, ObstacleSet, build_forcing_template
from vpmcf.profile import k_fn

from conftest import circle_phase


def test_weighted_volume_examples(free_template):
    g = free_template.grid
    assert weighted_phase_volume(np.zeros(g.shape), free_template) == 0.0
    assert weighted_phase_volume(np.ones(g.shape), free_template) == pytest.approx(2 / 3, abs=1e-14)


def test_weighted_volume_with_obstacle():
    g = TorusGrid(2, 256)
    eps = 0.04
    tpl = build_forcing_template(ObstacleSet((Ball((0.5, 0.5), 0.25),), (), 0.2), g, eps)
    # quadrature oracle: radial integral of a(s) over the ball plus the outside
    s = np.linspace(0, 0.25, 200001)
    rho = 0.25 - s
    from vpmcf.obstacles import cutoff_eta
    inside = np.trapezoid(cutoff_eta(s, eps) * 2 * math.pi * rho, s)
    expect = (2 / 3) * (1 - math.pi * 0.25**2 + inside)
    v = weighted_phase_volume(np.ones(g.shape), tpl)
    assert v == pytest.approx(expect, rel=2e-3)
    assert (2 / 3) * (1 - math.pi * 0.25**2) < v < 2 / 3


def test_lambda_examples(free_template):
    g = free_template.grid
    phi0 = circle_phase(g, 0.04)
    st = MultiplierState.from_initial(phi0, free_template, 0.5)
    assert lambda_value(st, phi0, free_template) == 0.0
    assert lambda_value(st, phi0 - 0.01, free_template) > 0
    st2 = MultiplierState(0.01, 0.04, 0.5)
    assert st2.lambda_from_volume(0.0) == pytest.approx(0.05, abs=1e-15)
    assert st2.last_lambda == pytest.approx(0.05, abs=1e-15)
    assert st2.lambda_from_volume(-0.01) == pytest.approx(2 * 0.05, abs=1e-15)


def test_alpha_and_eps_checks(free_template):
    for a in (0.0, 1.0, 1.5):
        with pytest.raises(ConfigError):
            MultiplierState(0.0, 0.04, a)
    with pytest.raises(ConfigError):
        lambda_value(MultiplierState(0.0, 0.02, 0.5), np.zeros(free_template.grid.shape), free_template)
