"""Time integration of

    d phi/dt = Lap phi - W'(phi) / eps^2 + g sqrt(2 W(phi)) / eps,   g = lam a + b,

with lam frozen over each step. The reaction is explicit; ``imex`` treats the
stencil Laplacian implicitly through its Fourier symbol.
"""

import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np
import scipy.fft

from . import kernels
from .config import SimConfig
from .diagnostics import MAX_PRINCIPLE_TOL, Monitor, density_ratio
from .errors import MaxPrincipleError, NonFiniteError, ValidationError
from .initial import (WellPreparedContext, check_compatibility, energy_budget,
                      make_initial_phase, smoothed_signed_distance, validate_well_prepared)
from .multiplier import MultiplierState
from .obstacles import barrier_fields, build_forcing_template


def select_dt(cfg: SimConfig) -> float:
    reaction = cfg.eps**2 / 4.0
    if cfg.scheme == "explicit":
        h = 1.0 / cfg.n
        return cfg.dt_safety * min(h * h / (2.0 * cfg.d), reaction)
    return cfg.dt_safety * reaction


@dataclass
class SimState:
    t: float
    step: int
    phi: np.ndarray
    lambda_l2: float = 0.0
    ring: deque = field(default_factory=lambda: deque(maxlen=64))


class Integrator:
    """One-step map for a fixed configuration; caches dt and the implicit
    denominator."""

    def __init__(self, cfg: SimConfig, template, mult):
        self.cfg, self.template, self.mult = cfg, template, mult
        self.grid = template.grid
        self.dt = select_dt(cfg)
        if cfg.scheme == "imex":
            self.denom = 1.0 - self.dt * self.grid.stencil_symbol

    def advance(self, phi, lam):
        cfg, tpl, dt = self.cfg, self.template, self.dt
        if cfg.scheme == "explicit":
            return kernels.explicit_update(phi, tpl.a, tpl.b, lam, cfg.eps, dt, self.grid.h)
        rhs = kernels.imex_rhs(phi, tpl.a, tpl.b, lam, cfg.eps, dt)
        spec = scipy.fft.rfftn(rhs, workers=kernels.THREADS)
        return scipy.fft.irfftn(spec / self.denom, s=phi.shape, workers=kernels.THREADS)


def check_phi(phi, step, maxabs=None, nonfinite=0):
    """Abort on non-finite values or |phi| beyond 1 + 1e-12."""
    if maxabs is None or nonfinite or not math.isfinite(maxabs):
        if not np.all(np.isfinite(phi)):
            idx = tuple(int(i) for i in np.argwhere(~np.isfinite(phi))[0])
            raise NonFiniteError(f"non-finite phi at step {step}, index {idx}")
        maxabs = float(np.max(np.abs(phi)))
    if maxabs > 1.0 + MAX_PRINCIPLE_TOL:
        idx = tuple(int(i) for i in np.unravel_index(np.argmax(np.abs(phi)), phi.shape))
        raise MaxPrincipleError(
            f"maximum principle violated at step {step}: |phi|={maxabs!r} at index {idx}",
            step=step, location=idx, value=maxabs,
        )


def step(state: SimState, cfg: SimConfig, template, mult) -> SimState:
    """Advance one step; lam is evaluated from the beginning-of-step field."""
    from .multiplier import lambda_value

    integ = Integrator(cfg, template, mult)
    lam = lambda_value(mult, state.phi, template)
    phi = integ.advance(state.phi, lam)
    check_phi(phi, state.step + 1)
    return SimState(
        t=(state.step + 1) * integ.dt,
        step=state.step + 1,
        phi=phi,
        lambda_l2=state.lambda_l2 + lam * lam * integ.dt,
        ring=state.ring,
    )


@dataclass
class RunResult:
    cfg: SimConfig
    dt: float
    phi0: np.ndarray
    snapshots: list
    records: list
    report: object
    template: object
    obstacles: object
    final: SimState = None

    @property
    def phi(self):
        return self.final.phi


class Simulation:
    """Builds every frozen ingredient of a run from its configuration."""

    def __init__(self, cfg: SimConfig, planned_eps=()):
        cfg.validate()
        self.cfg = cfg
        self.grid = grid = cfg.grid
        self.obstacles = obs = cfg.obstacles()
        self.template = build_forcing_template(obs, grid, cfg.eps)
        check_compatibility(cfg.initial, obs, grid, cfg.eps)
        rt = smoothed_signed_distance(cfg.initial, grid, cfg.eps, planned_eps)
        self.phi0 = make_initial_phase(rt, cfg.eps)
        self.mult = MultiplierState.from_initial(self.phi0, self.template, cfg.alpha)
        self.barrier = barrier_fields(obs, grid, cfg.eps) if not obs.empty else (None, None, [])
        self.monitor = Monitor(grid, self.template, self.mult, cfg.eps, cfg.alpha, barrier=self.barrier)
        self.integrator = Integrator(cfg, self.template, self.mult)
        self.dt = self.integrator.dt

    def validate_initial(self):
        ctx = WellPreparedContext(
            self.grid, self.obstacles, self.template, self.cfg.eps, self.cfg.alpha,
            energy_budget(self.cfg.initial, self.grid.d), self.cfg.seed,
        )
        return validate_well_prepared(self.phi0, ctx)

    def _density(self, phi, step):
        k = self.cfg.density_ratio_every
        if k and step % k == 0:
            return density_ratio(phi, self.cfg.eps, self.grid, seed=self.cfg.seed)
        return math.nan

    def run(self, validate=True, keep_snapshots=True, progress=None) -> RunResult:
        cfg, mon, integ = self.cfg, self.monitor, self.integrator
        report = self.validate_initial() if validate else None
        if report is not None and not report.passed:
            raise ValidationError("initial data are not well prepared: " + "; ".join(report.failures()))
        dt = self.dt
        nsteps = int(math.ceil(cfg.t_end / dt - 1e-9)) if cfg.t_end > 0 else 0
        state = SimState(0.0, 0, self.phi0.copy())
        m = mon.measure(state.phi)
        check_phi(state.phi, 0, m.maxabs, m.nonfinite)
        lam = mon.lam(m)
        records = [mon.record(0.0, m, lam, 0.0, 0.0, self._density(state.phi, 0))]
        state.ring.append(records[-1])
        snaps = [(0, 0.0, state.phi.copy())]
        every = cfg.snapshot_every
        for k in range(1, nsteps + 1):
            phi = integ.advance(state.phi, lam)
            m_new = mon.measure(phi)
            check_phi(phi, k, m_new.maxabs, m_new.nonfinite)
            res = mon.residual(m, m_new, kernels.diff_sq_sum(phi, state.phi), dt)
            l2 = state.lambda_l2 + lam * lam * dt
            state = SimState(k * dt, k, phi, l2, state.ring)
            m = m_new
            lam = mon.lam(m)
            rec = mon.record(state.t, m, lam, l2, res, self._density(phi, k))
            records.append(rec)
            state.ring.append(rec)
            if keep_snapshots and ((every and k % every == 0) or k == nsteps):
                snaps.append((k, state.t, phi.copy()))
            if progress is not None:
                progress(k, nsteps)
        return RunResult(cfg, dt, self.phi0, snaps, records, report, self.template,
                         self.obstacles, state)


def run(cfg: SimConfig, **kw) -> RunResult:
    return Simulation(cfg).run(**kw)
