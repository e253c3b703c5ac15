"""Sharp-interface reference: round interfaces moving by curvature under a
volume-preserving multiplier, with pinning against enclosed obstacles.

Each ball carries an orientation: +1 for an island of the positive phase,
-1 for a hole. Free balls obey

    dR_i/dt = -(d-1)/R_i + o_i * lam,
    lam = (d-1) * sum(o_i R_i^(d-2)) / sum(R_i^(d-1))     (free balls only),

which keeps sum(o_i R_i^d) constant. A free ball reaching its ``pin_at``
radius is pinned; a pinned ball is released once its free velocity turns
positive.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError

PIN_TOL = 1e-12
EVENT_TIME_TOL = 1e-10


@dataclass
class BallConfig:
    radii: list
    pin_at: list = None
    pinned: list = None
    orientation: list = None
    alive: list = None

    def __post_init__(self):
        k = len(self.radii)
        self.radii = [float(r) for r in self.radii]
        self.pin_at = list(self.pin_at) if self.pin_at is not None else [None] * k
        self.pinned = [bool(p) for p in self.pinned] if self.pinned is not None else [False] * k
        self.orientation = [int(o) for o in self.orientation] if self.orientation is not None else [1] * k
        self.alive = [bool(a) for a in self.alive] if self.alive is not None else [True] * k
        if not (len(self.pin_at) == len(self.pinned) == len(self.orientation) == len(self.alive) == k):
            raise ConfigError("BallConfig fields must have one entry per ball")
        for r, a, p, pa, o in zip(self.radii, self.alive, self.pinned, self.pin_at, self.orientation):
            if a and not r > 0:
                raise ConfigError(f"radius must be positive, got {r}")
            if o not in (1, -1):
                raise ConfigError(f"orientation must be +1 or -1, got {o}")
            if p and (pa is None or abs(r - pa) > PIN_TOL):
                raise ConfigError("a pinned ball must sit at its pin_at radius")

    def copy(self):
        return BallConfig(list(self.radii), list(self.pin_at), list(self.pinned),
                          list(self.orientation), list(self.alive))

    def free(self):
        return [i for i in range(len(self.radii)) if self.alive[i] and not self.pinned[i]]

    def signed_volume(self, d):
        return sum(o * r**d for o, r, a in zip(self.orientation, self.radii, self.alive) if a)


def _lambda(radii, orientation, free, d):
    num = sum(orientation[i] * radii[i] ** (d - 2) for i in free)
    den = sum(radii[i] ** (d - 1) for i in free)
    return (d - 1) * num / den


def _velocities(radii, cfg, free, d):
    if not free:
        return [0.0] * len(radii), math.nan
    lam = _lambda(radii, cfg.orientation, free, d)
    dr = [0.0] * len(radii)
    for i in free:
        dr[i] = -(d - 1) / radii[i] + cfg.orientation[i] * lam
    return dr, lam


def constrained_rhs(cfg: BallConfig, d):
    """Return ``(dR, lam, pin_updates, degenerate)``.

    ``pin_updates`` lists ``(index, 'pin' | 'release')`` complementarity
    changes at this state; they are reported, not applied.
    """
    free = cfg.free()
    dr, lam = _velocities(cfg.radii, cfg, free, d)
    updates = []
    for i in free:
        if cfg.pin_at[i] is not None and cfg.radii[i] <= cfg.pin_at[i] + PIN_TOL and dr[i] <= 0:
            updates.append((i, "pin"))
    for i, (a, p) in enumerate(zip(cfg.alive, cfg.pinned)):
        if a and p and free:
            if -(d - 1) / cfg.radii[i] + cfg.orientation[i] * lam > 0:
                updates.append((i, "release"))
    return dr, lam, updates, not free


@dataclass
class OracleTrajectory:
    d: int
    t: list = field(default_factory=list)
    radii: list = field(default_factory=list)
    pinned: list = field(default_factory=list)
    lam: list = field(default_factory=list)
    events: list = field(default_factory=list)

    def append(self, t, cfg, lam):
        self.t.append(t)
        self.radii.append([r if a else 0.0 for r, a in zip(cfg.radii, cfg.alive)])
        self.pinned.append(list(cfg.pinned))
        self.lam.append(lam)

    def radii_at(self, t):
        """Linear interpolation of the radii at time ``t``."""
        ts = np.asarray(self.t)
        R = np.asarray(self.radii)
        return np.array([np.interp(t, ts, R[:, j]) for j in range(R.shape[1])])


def _rk4(radii, cfg, free, d, h):
    def f(r):
        return _velocities(r, cfg, free, d)[0]

    k1 = f(radii)
    k2 = f([r + 0.5 * h * k for r, k in zip(radii, k1)])
    k3 = f([r + 0.5 * h * k for r, k in zip(radii, k2)])
    k4 = f([r + h * k for r, k in zip(radii, k3)])
    return [r + h / 6.0 * (a + 2 * b + 2 * c + e) for r, a, b, c, e in zip(radii, k1, k2, k3, k4)]


def _apply_complementarity(cfg, d, t, traj):
    for _ in range(2 * len(cfg.radii) + 1):
        _, _, updates, _ = constrained_rhs(cfg, d)
        if not updates:
            return
        i, kind = updates[0]
        if kind == "pin":
            cfg.pinned[i] = True
            cfg.radii[i] = cfg.pin_at[i]
        else:
            cfg.pinned[i] = False
        traj.events.append((t, kind, i))


def integrate_oracle(cfg: BallConfig, d, t_end, dt, r_vanish=None) -> OracleTrajectory:
    """Classical RK4 with pin, release and vanish events located by bisection
    in time to 1e-10. A free radius falling to ``r_vanish`` (default
    ``4 sqrt(dt)``, where the curvature term stops being resolved) removes the
    ball."""
    alive_r = [r for r, a in zip(cfg.radii, cfg.alive) if a]
    if alive_r and dt > 1e-4 * min(alive_r) ** 2 * (1 + 1e-12):
        raise ConfigError(f"dt={dt:g} exceeds 1e-4 * min radius^2 = {1e-4 * min(alive_r) ** 2:g}")
    if r_vanish is None:
        r_vanish = 4.0 * math.sqrt(dt)
    cfg = cfg.copy()
    traj = OracleTrajectory(d)
    t = 0.0
    _apply_complementarity(cfg, d, t, traj)
    traj.append(t, cfg, constrained_rhs(cfg, d)[1])

    def triggered(radii, free):
        hits = []
        _, lam = _velocities(radii, cfg, free, d)
        for i in free:
            if cfg.pin_at[i] is not None and radii[i] <= cfg.pin_at[i]:
                hits.append((i, "pin"))
            elif radii[i] <= r_vanish:
                hits.append((i, "vanish"))
        if free:
            for i, (a, p) in enumerate(zip(cfg.alive, cfg.pinned)):
                if a and p and -(d - 1) / radii[i] + cfg.orientation[i] * lam > 0:
                    hits.append((i, "release"))
        return hits

    while t < t_end - 1e-15:
        free = cfg.free()
        h = min(dt, t_end - t)
        new = _rk4(cfg.radii, cfg, free, d, h)
        hits = triggered(new, free)
        if hits:
            lo, hi = 0.0, h
            while hi - lo > EVENT_TIME_TOL:
                mid = 0.5 * (lo + hi)
                if triggered(_rk4(cfg.radii, cfg, free, d, mid), free):
                    hi = mid
                else:
                    lo = mid
            h = hi
            new = _rk4(cfg.radii, cfg, free, d, h)
            hits = triggered(new, free)
        cfg.radii = new
        t += h
        for i, kind in hits:
            if kind == "pin":
                cfg.pinned[i] = True
                cfg.radii[i] = cfg.pin_at[i]
            elif kind == "vanish":
                cfg.alive[i] = False
                cfg.radii[i] = 0.0
            else:
                cfg.pinned[i] = False
            traj.events.append((t, kind, i))
        _apply_complementarity(cfg, d, t, traj)
        traj.append(t, cfg, constrained_rhs(cfg, d)[1])
    return traj


def oracle_dt(cfg: BallConfig):
    return 1e-4 * min(r for r, a in zip(cfg.radii, cfg.alive) if a) ** 2
