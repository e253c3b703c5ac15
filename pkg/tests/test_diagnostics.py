import math

import numpy as np
import pytest
from scipy.optimize import brentq

from vpmcf.diagnostics import (CSV_COLUMNS, Monitor, barrier_check, bv_k, component_radii,
                               conservation_report, density_ratio, discrepancy_stats,
                               energy_total, interface_radius, mu_density)
from vpmcf.errors import DegenerateWarning, DomainError
from vpmcf.grid import TorusGrid
from vpmcf.multiplier import MultiplierState
from vpmcf.obstacles import Ball, ObstacleSet, build_forcing_template
from vpmcf.profile import SIGMA

from conftest import circle_phase


def slab(grid, eps, scale=1.0):
    x = grid.mesh()[0]
    return np.tanh(scale * (0.25 - np.abs(x - 0.5)) / eps)


def test_energy_of_well_is_zero(free_template):
    phi = np.full(free_template.grid.shape, 1 - 1e-9)
    E, mu, pen = energy_total(phi, phi, free_template, 0.04, 0.5)
    assert E <= 1e-8 and pen == 0.0


def test_mu_total_of_circle():
    g = TorusGrid(2, 256)
    tpl = build_forcing_template(ObstacleSet(), g, 0.04)
    phi = circle_phase(g, 0.04, r=0.25)
    _, mu, _ = energy_total(phi, phi, tpl, 0.04, 0.5)
    assert mu == pytest.approx(2 * math.pi * 0.25, rel=0.10)


def test_penalty_value(free_template):
    g = free_template.grid
    c = brentq(lambda x: x - x**3 / 3 + 0.01, -1, 1)
    phi0, phi = np.zeros(g.shape), np.full(g.shape, c)
    _, _, pen = energy_total(phi, phi0, free_template, 0.04, 0.5)
    assert pen == pytest.approx(0.5 * 0.04**-0.5 * 1e-4, rel=1e-10)
    assert pen == pytest.approx(2.5e-4, rel=1e-10)


def test_discrepancy_examples():
    g = TorusGrid(2, 64)
    xi, iabs, sup = discrepancy_stats(np.zeros(g.shape), 0.05, g)
    np.testing.assert_allclose(xi, -0.5 / 0.05)
    assert sup < 0 and iabs == pytest.approx(10 / SIGMA)
    g = TorusGrid(2, 256)
    assert discrepancy_stats(slab(g, 0.04, 2.0), 0.04, g)[2] > 0


def test_discrepancy_planar_profile_is_second_order():
    eps, sups = 0.05, []
    for n in (128, 256, 512):
        g = TorusGrid(2, n)
        xi, _, _ = discrepancy_stats(slab(g, eps), eps, g)
        sups.append(np.max(np.abs(xi)))
    assert 3.5 < sups[0] / sups[1] < 4.5 and 3.5 < sups[1] / sups[2] < 4.5
    assert sups[-1] <= 10 * (1 / 512) ** 2 / eps**3


def test_density_ratio_planar():
    g = TorusGrid(2, 256)
    eps = 0.02
    phi = slab(g, eps)
    iface = np.ravel_multi_index((64, 100), g.shape)
    ratio = density_ratio(phi, eps, g, centers=[iface], radii=[0.05, 0.1])
    assert ratio == pytest.approx(1.0, rel=0.15)


def test_density_ratio_far_from_interface():
    g = TorusGrid(2, 256)
    phi = slab(g, 0.02)
    deep = np.ravel_multi_index((128, 10), g.shape)
    assert density_ratio(phi, 0.02, g, centers=[deep], radii=[4 * g.h]) <= 1e-3


def test_density_ratio_circle():
    g = TorusGrid(2, 256)
    phi = circle_phase(g, 0.02, r=0.25)
    on = np.ravel_multi_index((128 + 64, 128), g.shape)
    assert density_ratio(phi, 0.02, g, centers=[on], radii=[0.06]) == pytest.approx(1.0, rel=0.15)


def test_density_ratio_errors():
    g = TorusGrid(2, 64)
    with pytest.raises(DomainError):
        density_ratio(np.ones(g.shape), 0.05, g, n_background=0)
    with pytest.raises(DomainError):
        density_ratio(np.zeros(g.shape), 0.05, g, radii=[g.h])


def test_sampled_density_is_deterministic():
    g = TorusGrid(2, 128)
    phi = circle_phase(g, 0.04)
    assert density_ratio(phi, 0.04, g, seed=5) == density_ratio(phi, 0.04, g, seed=5)


def test_barrier_check_examples():
    g = TorusGrid(2, 64)
    eps, r0 = 0.04, 0.2
    obs = ObstacleSet((Ball((0.5, 0.5), r0 + 2 * math.sqrt(eps)),), (), r0)
    assert barrier_check(np.ones(g.shape), obs, eps, g) == (0.0, 0.0)
    vp, vm = barrier_check(-np.ones(g.shape), obs, eps, g)
    assert vp == pytest.approx(math.tanh(2.5) + 1, abs=1e-12)
    assert vp == pytest.approx(1.98661, abs=1e-5) and vm == 0.0


def test_conservation_report(free_template):
    g = free_template.grid
    phi0 = circle_phase(g, 0.04, r=0.3)
    mult = MultiplierState.from_initial(phi0, free_template, 0.5)
    drift, vi, vs = conservation_report(phi0, phi0, free_template, mult)
    assert drift == 0.0
    assert vi == pytest.approx(math.pi * 0.09, abs=2 * math.pi * 0.3 * 2 * g.h)
    _, vi2, vs2 = conservation_report(-phi0, phi0, free_template, mult)
    boundary = np.count_nonzero(phi0 == 0) * g.cell_volume
    assert abs(vi + vi2 - 1) <= boundary + 1e-15
    assert vs + vs2 == pytest.approx(1.0, abs=1e-12)


def test_interface_radius():
    g = TorusGrid(2, 256)
    phi = circle_phase(g, 0.02, r=0.25)
    assert interface_radius(phi, (0.5, 0.5)) == pytest.approx(0.25, abs=2 * g.h)
    with pytest.warns(DegenerateWarning):
        assert interface_radius(np.ones(g.shape), (0.1, 0.1)) == pytest.approx(1 / math.sqrt(math.pi))
    with pytest.raises(DomainError):
        interface_radius(-np.ones(g.shape), (0.5, 0.5))


def test_component_radii_periodic_merge():
    g = TorusGrid(2, 128)
    x, y = g.mesh()
    d1 = np.hypot(np.minimum(np.abs(x), 1 - np.abs(x)), np.minimum(np.abs(y), 1 - np.abs(y)))
    d2 = np.hypot(x - 0.5, y - 0.5)
    phi = np.where((d1 < 0.15) | (d2 < 0.2), 1.0, -1.0)
    radii = component_radii(phi)
    assert len(radii) == 2
    assert radii[0] == pytest.approx(0.2, abs=2 * g.h) and radii[1] == pytest.approx(0.15, abs=2 * g.h)
    assert interface_radius(phi, (0.0, 0.0)) == pytest.approx(0.15, abs=2 * g.h)


def test_bv_k_bounded_by_surface_energy():
    g = TorusGrid(2, 128)
    rng = np.random.default_rng(0)
    for phi in (circle_phase(g, 0.04), np.tanh(rng.normal(size=g.shape))):
        mu = np.sum(mu_density(phi, 0.04, g)) * g.cell_volume
        assert bv_k(phi, g) <= SIGMA * mu + 1e-9


def test_monitor_matches_direct_functions():
    g = TorusGrid(2, 256)
    eps = 0.02
    obs = ObstacleSet.build([Ball((0.5, 0.5), 0.4)], eps=eps)
    assert obs.certified(eps)[2] == []
    tpl = build_forcing_template(obs, g, eps)
    phi0 = circle_phase(g, eps, r=0.45)
    phi = np.clip(phi0 * 0.97 + 0.01, -1, 1)
    phi[128, 128] = 0.2
    mult = MultiplierState.from_initial(phi0, tpl, 0.5)
    mon = Monitor(g, tpl, mult, eps, 0.5, obstacles=obs)
    m = mon.measure(phi)
    rec = mon.record(0.1, m, mon.lam(m), 0.0)
    E, mu, pen = energy_total(phi, phi0, tpl, eps, 0.5)
    _, iabs, sup = discrepancy_stats(phi, eps, g)
    drift, vi, vs = conservation_report(phi, phi0, tpl, mult)
    vp, vm = barrier_check(phi, obs, eps, g)
    for got, want in ((rec.energy_total, E), (rec.mu_total, mu), (rec.penalty, pen),
                      (rec.int_abs_xi, iabs), (rec.sup_xi, sup), (rec.vol_weighted_drift, drift),
                      (rec.vol_indicator, vi), (rec.vol_smooth, vs), (rec.bv_k, bv_k(phi, g)),
                      (rec.barrier_violation_plus, vp), (rec.barrier_violation_minus, vm)):
        assert got == pytest.approx(want, rel=1e-10, abs=1e-13)
    assert rec.barrier_violation_plus > 0.1


def test_record_row_format():
    g = TorusGrid(2, 32)
    tpl = build_forcing_template(ObstacleSet(), g, 0.2)
    mult = MultiplierState(0.0, 0.2, 0.5)
    mon = Monitor(g, tpl, mult, 0.2, 0.5)
    rec = mon.record(0.0, mon.measure(np.zeros(g.shape)), 0.0, 0.0)
    row = rec.row()
    assert len(row) == len(CSV_COLUMNS)
    assert row[CSV_COLUMNS.index("density_ratio")] == ""
    assert row[0] == "0"
    assert all(float(v) == getattr(rec, f) for v, f in zip(row[1:3], ("lam", "energy_total")))
