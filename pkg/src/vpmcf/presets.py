"""Experiment presets and their sharp-interface twins."""

from .errors import ConfigError
from .oracle import BallConfig
from .grid import periodic_distance

_COMMON = {"d": "2", "scheme": "imex", "density_ratio_every": "25", "seed": "0"}

CATALOG = {
    "single_ball": dict(
        _COMMON, n="256", epsilon="0.04", alpha="0.5", dt_safety="0.2", t_end="0.01",
        snapshot_every="25", initial="balls:0.5,0.5,0.3",
    ),
    "two_balls": dict(
        _COMMON, n="256", epsilon="0.02", alpha="0.5", dt_safety="0.2", t_end="0.01",
        snapshot_every="100", initial="balls:0.28,0.28,0.12;0.68,0.68,0.2",
    ),
    # A circle closing onto an enclosed O+ ball while a concentric hole
    # boundary moves freely.
    "pinned_inner": dict(
        _COMMON, n="256", epsilon="0.02", alpha="0.9", dt_safety="0.4", t_end="0.05",
        snapshot_every="250", initial="balls:0.5,0.5,0.37;0.5,0.5,0.45,hole",
        obstacle_plus="0.5,0.5,0.32",
    ),
    # A hole of the positive phase enclosing an O- ball.
    "outer_obstacle": dict(
        _COMMON, n="256", epsilon="0.02", alpha="0.5", dt_safety="0.4", t_end="0.03",
        snapshot_every="250", initial="balls:0.5,0.5,0.38;complement",
        obstacle_minus="0.5,0.5,0.32",
    ),
}

DESCRIPTIONS = {
    "single_ball": "one circle r=0.3, no obstacles (stationarity)",
    "two_balls": "circles r=0.12 and r=0.2, no obstacles (coarsening against the ODE)",
    "pinned_inner": "circle r=0.37 around an O+ ball r=0.32, inside a hole r=0.45 (pinning)",
    "outer_obstacle": "hole r=0.38 of the positive phase around an O- ball r=0.32 (exclusion)",
    "epsilon_sweep": "meta-preset: a base preset at eps 0.08/0.04/0.02 with n 128/256/512",
}

SWEEP = {
    "base": "single_ball",
    "epsilons": (0.08, 0.04, 0.02),
    "ns": (128, 256, 512),
    "saturation": 0.4,
}

META = ("epsilon_sweep",)


def names():
    return list(CATALOG) + list(META)


def preset_pairs(name):
    if name in META:
        raise ConfigError(f"preset: {name} is a meta-preset; use the sweep command")
    if name not in CATALOG:
        raise ConfigError(f"preset: unknown preset {name!r}; available: {', '.join(names())}")
    return dict(CATALOG[name])


def presets():
    """Catalog as {name: description}."""
    return dict(DESCRIPTIONS)


def oracle_twin(cfg):
    """Sharp-interface counterpart of a configuration's initial set.

    Islands get orientation +1 and holes -1 (swapped under ``complement``).
    A ball that encloses an obstacle of the matching sign pins at that
    obstacle's radius.
    """
    spec = cfg.initial
    entries = [(b, 1) for b in spec.balls] + [(b, -1) for b in spec.holes]
    if spec.complement:
        entries = [(b, -o) for b, o in entries]
    radii, pin_at, orient = [], [], []
    for b, o in entries:
        obstacles = cfg.plus if o > 0 else cfg.minus
        enclosed = [ob.radius for ob in obstacles
                    if float(periodic_distance(list(ob.center), b.center)) + ob.radius < b.radius]
        radii.append(b.radius)
        pin_at.append(max(enclosed) if enclosed else None)
        orient.append(o)
    if not radii:
        raise ConfigError("initial set has no balls; no oracle twin")
    return BallConfig(radii, pin_at, orientation=orient)
