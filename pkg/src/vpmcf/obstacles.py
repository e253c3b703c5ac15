"""Obstacles as unions of periodic balls, their signed distance, the cutoff
eta_eps and the frozen spatial parts of the forcing g = lambda * a + b."""

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, ConfigWarning
from .grid import TorusGrid, periodic_distance

EMPTY_SENTINEL = -0.5


@dataclass(frozen=True)
class Ball:
    center: tuple
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", tuple(float(c) for c in self.center))
        if not self.radius > 0:
            raise ConfigError(f"ball radius must be positive, got {self.radius}")
        if any(not 0.0 <= c < 1.0 for c in self.center):
            raise ConfigError(f"ball center {self.center} must lie in [0,1)^d")


def _torus_dist(c1, c2):
    return float(periodic_distance([np.array(a) for a in c1], c2))


@dataclass(frozen=True)
class ObstacleSet:
    plus: tuple = ()
    minus: tuple = ()
    r0: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "plus", tuple(self.plus))
        object.__setattr__(self, "minus", tuple(self.minus))
        dims = {len(b.center) for b in self.balls}
        if len(dims) > 1:
            raise ConfigError("obstacle balls mix dimensions")
        if not self.r0 > 0:
            raise ConfigError(f"r0 must be positive, got {self.r0}")
        if self.balls and self.r0 > min(b.radius for b in self.balls):
            raise ConfigError("r0 must not exceed the smallest obstacle radius")
        for p in self.plus:
            for m in self.minus:
                if _torus_dist(p.center, m.center) <= p.radius + m.radius:
                    raise ConfigError("closures of O+ and O- must be disjoint")

    @property
    def balls(self):
        return self.plus + self.minus

    @property
    def empty(self):
        return not self.balls

    @property
    def dim(self):
        return len(self.balls[0].center) if self.balls else None

    @classmethod
    def build(cls, plus=(), minus=(), eps=None, r0=None):
        """Assemble an obstacle set, choosing r0 when not given.

        The automatic r0 is ``min radius - 2 sqrt(eps)`` so that every ball is
        certified for the barrier comparison. If that is not positive, r0 is the
        smallest radius and no ball can be certified.
        """
        plus, minus = tuple(plus), tuple(minus)
        radii = [b.radius for b in plus + minus]
        if r0 is None:
            if not radii:
                r0 = 1.0
            elif eps is not None and min(radii) - 2.0 * math.sqrt(eps) > 0:
                r0 = min(radii) - 2.0 * math.sqrt(eps)
            else:
                r0 = min(radii)
        return cls(plus, minus, float(r0))

    def certified(self, eps):
        """Split balls into (certified plus, certified minus, skipped)."""
        need = self.r0 + 2.0 * math.sqrt(eps)
        cp = [b for b in self.plus if b.radius >= need - 1e-12]
        cm = [b for b in self.minus if b.radius >= need - 1e-12]
        skipped = [b for b in self.balls if b.radius < need - 1e-12]
        return cp, cm, skipped


def signed_distance_at(obs: ObstacleSet, coords):
    """Signed distance to the obstacle boundary at arbitrary points (positive
    inside). ``coords`` is a sequence of d coordinate arrays."""
    if obs.empty:
        return np.full(np.shape(coords[0]), EMPTY_SENTINEL)
    return _signed_parts(obs.balls, coords)


def _signed_parts(balls, coords):
    s = None
    for b in balls:
        v = b.radius - periodic_distance(coords, b.center)
        s = v if s is None else np.maximum(s, v)
    return s


def signed_distance(obs: ObstacleSet, grid: TorusGrid):
    _check_dim(obs, grid)
    return signed_distance_at(obs, grid.mesh())


def _check_dim(obs, grid):
    if obs.dim is not None and obs.dim != grid.d:
        raise ConfigError(f"obstacles are {obs.dim}-dimensional but the grid has d={grid.d}")


def cutoff_eta(r, eps):
    """Nonincreasing C^2 cutoff: 1 for r <= 0, 0 for r >= sqrt(eps)/2."""
    if not 0.0 < eps < 0.25:
        raise ConfigError(f"eps must lie in (0, 1/4), got {eps}")
    u = np.clip(np.asarray(r, dtype=float) / (0.5 * math.sqrt(eps)), 0.0, 1.0)
    # 1 - S(u) = S(1 - u) for the quintic smoothstep S; this form hits 0 and 1 exactly
    v = 1.0 - u
    return np.clip(v * v * v * (10.0 + v * (-15.0 + 6.0 * v)), 0.0, 1.0)


@dataclass(frozen=True, eq=False)
class ForcingTemplate:
    grid: TorusGrid
    eps: float
    a: np.ndarray
    b: np.ndarray
    s: np.ndarray
    obstacles: ObstacleSet = field(default_factory=ObstacleSet)

    @property
    def outer_mask(self):
        """Points with s > sqrt(eps)/2, where a vanishes and g = b."""
        return self.s > 0.5 * math.sqrt(self.eps)


def build_forcing_template(obs: ObstacleSet, grid: TorusGrid, eps: float) -> ForcingTemplate:
    _check_dim(obs, grid)
    root = math.sqrt(eps)
    for ball in obs.balls:
        if not root < ball.radius:
            raise ConfigError(
                f"collar does not fit: need sqrt(eps) = {root:.6g} < obstacle radius {ball.radius:.6g}"
            )
    coords = grid.mesh()
    s = signed_distance_at(obs, coords)
    a = cutoff_eta(s, eps)
    b = np.zeros(grid.shape)
    if not obs.empty:
        ramp = (grid.d / obs.r0) * (1.0 - cutoff_eta(s - 0.5 * root, eps))
        if obs.plus:
            b = np.where(_signed_parts(obs.plus, coords) > 0, ramp, b)
        if obs.minus:
            b = np.where(_signed_parts(obs.minus, coords) > 0, -ramp, b)
    for arr in (a, b, s):
        arr.setflags(write=False)
    return ForcingTemplate(grid, float(eps), a, b, s, obs)


def barrier_fields(obs: ObstacleSet, grid: TorusGrid, eps: float, warn=True):
    """Pointwise envelope of the barriers of all certified balls.

    Returns ``(under, over, skipped)``: ``under`` is the max over certified
    O+ balls of tanh(rbar_y / eps), ``over`` the min over certified O- balls of
    -tanh(rbar_z / eps), each ``None`` when there is no such ball.
    """
    _check_dim(obs, grid)
    cp, cm, skipped = obs.certified(eps)
    if warn and skipped:
        warnings.warn(
            f"{len(skipped)} obstacle ball(s) too small for barrier certification "
            f"(need radius >= r0 + 2 sqrt(eps)); skipped",
            ConfigWarning,
            stacklevel=2,
        )
    coords = grid.mesh()
    under = over = None
    for b in cp:
        v = np.tanh(barrier_radius(coords, b.center, obs.r0) / eps)
        under = v if under is None else np.maximum(under, v)
    for b in cm:
        v = -np.tanh(barrier_radius(coords, b.center, obs.r0) / eps)
        over = v if over is None else np.minimum(over, v)
    return under, over, skipped


def barrier_radius(coords, y, r0):
    dist = periodic_distance(coords, y)
    return (r0 * r0 - dist * dist) / (2.0 * r0)


def parse_balls(text, d=None):
    """Parse ``cx,cy[,cz],r; ...`` into balls plus an optional ``r0=`` item."""
    balls, r0 = [], None
    for item in (text or "").split(";"):
        item = item.strip()
        if not item:
            continue
        if item.startswith("r0="):
            r0 = _num(item[3:], "r0")
            continue
        parts = [p.strip() for p in item.split(",")]
        vals = [_num(p, "ball") for p in parts]
        if len(vals) not in (3, 4) or (d is not None and len(vals) != d + 1):
            raise ConfigError(f"ball entry {item!r} needs d+1 numbers")
        balls.append(Ball(tuple(vals[:-1]), vals[-1]))
    return balls, r0


def _num(text, key):
    try:
        v = float(text)
    except ValueError:
        raise ConfigError(f"{key}: malformed number {text!r}") from None
    if not math.isfinite(v):
        raise ConfigError(f"{key}: non-finite number {text!r}")
    return v


def format_balls(balls, r0=None):
    items = [",".join(repr(float(c)) for c in b.center) + "," + repr(float(b.radius)) for b in balls]
    if r0 is not None:
        items.append(f"r0={float(r0)!r}")
    return ";".join(items)
