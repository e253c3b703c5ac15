import math
import warnings

import numpy as np
import pytest

from vpmcf.errors import ConfigError, ConfigWarning, MaxPrincipleError
from vpmcf.grid import TorusGrid, grad_sq, integrate
from vpmcf.initial import (InitialSpec, WellPreparedContext, check_compatibility, energy_budget,
                           format_initial, make_initial_phase, parse_initial,
                           signed_distance_u0, smoothed_signed_distance, validate_well_prepared)
from vpmcf.obstacles import Ball, ObstacleSet, build_forcing_template


def ctx_for(grid, eps, obs=ObstacleSet(), spec=None, alpha=0.5):
    tpl = build_forcing_template(obs, grid, eps)
    budget = energy_budget(spec, grid.d) if spec is not None else math.inf
    return WellPreparedContext(grid, obs, tpl, eps, alpha, budget)


def test_rtilde_examples():
    g = TorusGrid(2, 200)
    spec = InitialSpec((Ball((0.5, 0.5), 0.3),), saturation=0.2)
    rt = smoothed_signed_distance(spec, g)
    # grid point (0.5, 0.79) sits 0.01 inside the circle
    assert rt[100, 158] == pytest.approx(0.2 * math.tanh(0.05), abs=1e-12)
    assert rt[100, 158] == pytest.approx(0.0099917, abs=1e-7)
    assert rt[100, 160] == pytest.approx(0.0, abs=1e-12)
    assert rt[100, 100] < 0.2 and rt[100, 100] > 0.2 * math.tanh(1.4)


def test_rtilde_is_one_lipschitz():
    g = TorusGrid(2, 128)
    spec = InitialSpec((Ball((0.3, 0.3), 0.15), Ball((0.7, 0.6), 0.2)), saturation=0.1)
    rt = smoothed_signed_distance(spec, g)
    assert np.max(grad_sq(rt, g)) <= 1 + 1e-3


def test_saturation_warning():
    g = TorusGrid(2, 64)
    with pytest.warns(ConfigWarning):
        smoothed_signed_distance(InitialSpec((Ball((0.5, 0.5), 0.3),), saturation=0.1), g, 0.04)


def test_make_initial_phase():
    rt = np.array([0.0, 0.04, -0.3, 0.3])
    phi = make_initial_phase(rt, 0.04)
    assert phi[0] == 0.0
    assert phi[1] == pytest.approx(0.761594, abs=1e-6)
    assert np.all(np.sign(phi) == np.sign(rt))
    assert np.all(np.abs(phi) < 1)


def test_holes_and_complement():
    g = TorusGrid(2, 64)
    coords = g.mesh()
    spec = InitialSpec((Ball((0.5, 0.5), 0.1),), (Ball((0.5, 0.5), 0.3),))
    r = signed_distance_u0(spec, coords)
    assert r[32, 32] > 0          # island
    assert r[32, 44] < 0          # annulus between island and hole edge
    assert r[0, 0] > 0            # outside the hole
    comp = InitialSpec((Ball((0.5, 0.5), 0.1),), complement=True)
    assert signed_distance_u0(comp, coords)[32, 32] < 0


def test_validate_single_ball():
    g = TorusGrid(2, 256)
    eps = 0.04
    spec = InitialSpec((Ball((0.5, 0.5), 0.3),))
    phi0 = make_initial_phase(smoothed_signed_distance(spec, g, eps), eps)
    rep = validate_well_prepared(phi0, ctx_for(g, eps, spec=spec))
    assert rep.max_xi0 <= 1e-10
    assert rep.energy0 == pytest.approx(2 * math.pi * 0.3, rel=0.15)
    assert rep.omega_margin > 0 and rep.barrier_ok and rep.passed
    assert rep.density_ratio0 > 0.5


def test_validate_everything_has_tiny_margin():
    g = TorusGrid(2, 64)
    eps = 0.04
    spec = InitialSpec((), complement=True, saturation=0.1)
    phi0 = make_initial_phase(smoothed_signed_distance(spec, g), eps)
    assert np.all(phi0 == math.tanh(0.1 / eps))
    rep = validate_well_prepared(phi0, ctx_for(g, eps))
    q = math.tanh(2.5)
    expect = (2 / 3 - (q - q**3 / 3)) / 2
    # the margin is positive only by the saturation deficit and vanishes as L / eps grows
    assert rep.omega_margin == pytest.approx(expect, rel=1e-9)
    assert 0 < rep.omega_margin < 1e-4


def test_validate_rejects_out_of_range():
    g = TorusGrid(2, 32)
    with pytest.raises(MaxPrincipleError):
        validate_well_prepared(np.ones(g.shape), ctx_for(g, 0.04))


def test_validate_barrier_with_obstacle():
    g = TorusGrid(2, 256)
    eps = 0.02
    obs = ObstacleSet.build([Ball((0.5, 0.5), 0.32)], eps=eps)
    spec = InitialSpec((Ball((0.5, 0.5), 0.37),))
    check_compatibility(spec, obs, g, eps)
    phi0 = make_initial_phase(smoothed_signed_distance(spec, g, eps), eps)
    rep = validate_well_prepared(phi0, ctx_for(g, eps, obs, spec))
    assert rep.barrier_ok and rep.passed


def test_compatibility_rejects_obstacle_outside_u0():
    g = TorusGrid(2, 128)
    obs = ObstacleSet((Ball((0.2, 0.2), 0.1),), (), 0.1)
    with pytest.raises(ConfigError):
        check_compatibility(InitialSpec((Ball((0.6, 0.6), 0.2),)), obs, g)
    with pytest.raises(ConfigError):
        check_compatibility(InitialSpec((Ball((0.2, 0.2), 0.1),)), obs, g)


def test_energy_uniform_across_eps():
    spec = InitialSpec((Ball((0.5, 0.5), 0.3),), saturation=0.4)
    mus = []
    for eps, n in ((0.08, 128), (0.04, 256), (0.02, 512)):
        g = TorusGrid(2, n)
        phi0 = make_initial_phase(smoothed_signed_distance(spec, g), eps)
        mus.append(validate_well_prepared(phi0, ctx_for(g, eps)).energy0)
    assert max(mus) / min(mus) < 1.10


def test_l1_convergence_to_indicator():
    spec = InitialSpec((Ball((0.5, 0.5), 0.3),), saturation=0.4)
    g = TorusGrid(2, 512)
    rt = smoothed_signed_distance(spec, g)
    diffs = []
    for eps in (0.08, 0.04, 0.02):
        a, b = make_initial_phase(rt, eps), make_initial_phase(rt, eps / 2)
        diffs.append(integrate(np.abs(a - b), g))
    assert diffs[0] / diffs[1] >= 1.5 and diffs[1] / diffs[2] >= 1.5


def test_parse_and_format_initial():
    spec = parse_initial("balls:0.5,0.5,0.3;0.5,0.5,0.45,hole;complement;saturation=0.2", 2)
    assert len(spec.balls) == 1 and len(spec.holes) == 1 and spec.complement
    assert spec.saturation == 0.2
    assert parse_initial(format_initial(spec), 2) == spec
    with pytest.raises(ConfigError):
        parse_initial("0.5,0.5,0.3")
    with pytest.raises(ConfigError):
        parse_initial("balls:0.5,0.5,0.1,0.3", 2)
