"""Well-prepared initial data: phi0 = tanh(rtilde / eps) with rtilde a
saturated signed distance to the boundary of a union of balls."""

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, ConfigWarning, MaxPrincipleError
from .grid import TorusGrid, periodic_distance
from .obstacles import Ball, ObstacleSet, _num, barrier_fields, signed_distance
from .profile import k_fn, tanh_profile

DEFAULT_SATURATION = 0.1


@dataclass(frozen=True)
class InitialSpec:
    """U0 = (union of ``balls``) united with the exterior of all ``holes`` when
    any hole is given; ``complement`` replaces U0 by its complement.
    ``saturation`` is the far-field length L (None selects the default)."""

    balls: tuple = ()
    holes: tuple = ()
    complement: bool = False
    saturation: float = None

    def __post_init__(self):
        object.__setattr__(self, "balls", tuple(self.balls))
        object.__setattr__(self, "holes", tuple(self.holes))
        if self.saturation is not None and not self.saturation > 0:
            raise ConfigError(f"saturation must be positive, got {self.saturation}")

    @property
    def dim(self):
        allb = self.balls + self.holes
        return len(allb[0].center) if allb else None

    def resolved_saturation(self, eps):
        if self.saturation is not None:
            return self.saturation
        return max(DEFAULT_SATURATION, 5.0 * eps)

    def sharp_perimeter(self, d):
        unit = 2.0 * math.pi if d == 2 else 4.0 * math.pi
        return sum(unit * b.radius ** (d - 1) for b in self.balls + self.holes)


def signed_distance_u0(spec: InitialSpec, coords):
    """Signed distance to the boundary of U0, positive inside U0."""
    shape = np.shape(coords[0])
    r = np.full(shape, -np.inf)
    for b in spec.balls:
        r = np.maximum(r, b.radius - periodic_distance(coords, b.center))
    if spec.holes:
        inside_hole = np.full(shape, -np.inf)
        for b in spec.holes:
            inside_hole = np.maximum(inside_hole, b.radius - periodic_distance(coords, b.center))
        r = np.maximum(r, -inside_hole)
    return -r if spec.complement else r


def smoothed_signed_distance(spec: InitialSpec, grid: TorusGrid, eps=None, planned_eps=()):
    """L tanh(r / L), with r the exact periodic signed distance to dU0."""
    if spec.dim is not None and spec.dim != grid.d:
        raise ConfigError(f"initial balls are {spec.dim}-dimensional but the grid has d={grid.d}")
    epss = [e for e in (eps, *planned_eps) if e is not None]
    L = spec.resolved_saturation(max(epss) if epss else 0.0)
    if epss and L <= 4.0 * max(epss):
        warnings.warn(
            f"saturation L={L:g} does not dominate the interface width (L <= 4 eps = {4 * max(epss):g})",
            ConfigWarning,
            stacklevel=2,
        )
    r = signed_distance_u0(spec, grid.mesh())
    return L * np.tanh(r / L)


def make_initial_phase(rtilde, eps):
    return tanh_profile(rtilde, eps)


def check_compatibility(spec: InitialSpec, obs: ObstacleSet, grid: TorusGrid, eps=None):
    """O+ inside U0, O- outside U0, and dU0 at least 2h away from dO."""
    if obs.empty:
        return
    coords = grid.mesh()
    r = signed_distance_u0(spec, coords)
    s = signed_distance(obs, grid)
    h = grid.h
    for label, balls, sign in (("O+", obs.plus, 1.0), ("O-", obs.minus, -1.0)):
        for b in balls:
            inside = periodic_distance(coords, b.center) <= b.radius
            if np.any(sign * r[inside] <= 0):
                side = "inside" if sign > 0 else "outside"
                raise ConfigError(f"{label} ball {b.center} r={b.radius} is not strictly {side} U0")
    near = np.abs(r) <= h
    if np.any(near) and np.min(np.abs(s[near])) <= 2.0 * h:
        raise ConfigError("initial interface comes within 2h of an obstacle boundary")
    if eps is not None:
        L = spec.resolved_saturation(eps)
        if L < 0.6 * obs.r0:
            raise ConfigError(f"saturation L={L:g} must be >= 0.6 r0 = {0.6 * obs.r0:g}")


@dataclass(frozen=True)
class WellPreparedContext:
    grid: TorusGrid
    obstacles: ObstacleSet
    template: object
    eps: float
    alpha: float
    energy_budget: float = math.inf
    seed: int = 0


@dataclass(frozen=True)
class WellPreparedReport:
    energy0: float
    omega_margin: float
    max_xi0: float
    density_ratio0: float
    barrier_ok: bool
    energy_budget: float = math.inf

    @property
    def passed(self):
        return (
            self.energy0 <= self.energy_budget
            and self.omega_margin > 0
            and self.max_xi0 <= 1e-10
            and self.barrier_ok
        )

    def failures(self):
        out = []
        if not self.energy0 <= self.energy_budget:
            out.append(f"energy0={self.energy0:.6g} exceeds budget {self.energy_budget:.6g}")
        if not self.omega_margin > 0:
            out.append(f"omega_margin={self.omega_margin:.6g} is not positive")
        if not self.max_xi0 <= 1e-10:
            out.append(f"max_xi0={self.max_xi0:.6g} exceeds 1e-10")
        if not self.barrier_ok:
            out.append("initial data violate an obstacle barrier")
        return out


def energy_budget(spec: InitialSpec, d, factor=1.25, slack=0.05):
    """Default energy budget: a margin over the sharp perimeter of U0."""
    return factor * spec.sharp_perimeter(d) + slack


def validate_well_prepared(phi0, ctx: WellPreparedContext) -> WellPreparedReport:
    from .diagnostics import density_ratio, discrepancy_stats, mu_density

    phi0 = np.asarray(phi0, dtype=float)
    grid, eps = ctx.grid, ctx.eps
    m = float(np.max(np.abs(phi0)))
    if not m < 1.0:
        idx = np.unravel_index(np.argmax(np.abs(phi0)), phi0.shape)
        raise MaxPrincipleError(f"initial |phi| reaches {m!r} at {idx}", step=0, location=idx, value=m)
    _, _, sup_xi = discrepancy_stats(phi0, eps, grid)
    energy0 = float(np.sum(mu_density(phi0, eps, grid)) * grid.cell_volume)
    free = ctx.template.s < 0 if ctx.template is not None else np.ones(grid.shape, bool)
    mean_k = float(np.mean(k_fn(phi0[free]))) if np.any(free) else 0.0
    omega = (2.0 / 3.0 - abs(mean_k)) / 2.0
    try:
        dr = density_ratio(phi0, eps, grid, seed=ctx.seed)
    except Exception:
        dr = math.nan
    ok = True
    if not ctx.obstacles.empty:
        under, over, _ = barrier_fields(ctx.obstacles, grid, eps, warn=False)
        if under is not None and np.any(phi0 < under - 1e-9):
            ok = False
        if over is not None and np.any(phi0 > over + 1e-9):
            ok = False
    return WellPreparedReport(float(energy0), float(omega), float(sup_xi), float(dr), ok, ctx.energy_budget)


def parse_initial(text, d=None):
    """Parse ``balls:cx,cy[,cz],r[,hole];...`` with optional ``complement`` and
    ``saturation=L`` items."""
    text = (text or "").strip()
    if not text.startswith("balls:"):
        raise ConfigError("initial: expected 'balls:' prefix")
    balls, holes, comp, sat = [], [], False, None
    for item in text[len("balls:"):].split(";"):
        item = item.strip()
        if not item:
            continue
        if item == "complement":
            comp = True
            continue
        if item.startswith("saturation="):
            sat = _num(item[len("saturation="):], "saturation")
            continue
        parts = [p.strip() for p in item.split(",")]
        hole = parts[-1] == "hole"
        if hole:
            parts = parts[:-1]
        vals = [_num(p, "initial") for p in parts]
        if len(vals) not in (3, 4) or (d is not None and len(vals) != d + 1):
            raise ConfigError(f"initial: ball entry {item!r} needs d+1 numbers")
        (holes if hole else balls).append(Ball(tuple(vals[:-1]), vals[-1]))
    return InitialSpec(tuple(balls), tuple(holes), comp, sat)


def format_initial(spec: InitialSpec):
    items = []
    for b, hole in [(b, False) for b in spec.balls] + [(b, True) for b in spec.holes]:
        s = ",".join(repr(float(c)) for c in b.center) + "," + repr(float(b.radius))
        items.append(s + (",hole" if hole else ""))
    if spec.complement:
        items.append("complement")
    if spec.saturation is not None:
        items.append(f"saturation={float(spec.saturation)!r}")
    return "balls:" + ";".join(items)
