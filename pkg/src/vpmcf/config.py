"""Run configuration: the ``key=value`` text format, validation and rendering."""

import math
from dataclasses import dataclass, field, replace

from .errors import ConfigError
from .grid import TorusGrid
from .initial import InitialSpec, format_initial, parse_initial
from .multiplier import check_alpha
from .obstacles import ObstacleSet, _num, format_balls, parse_balls

KEYS = (
    "d", "n", "epsilon", "alpha", "scheme", "dt_safety", "t_end", "snapshot_every",
    "preset", "initial", "obstacle_plus", "obstacle_minus", "output_dir",
    "density_ratio_every", "seed",
)
SCHEMES = ("explicit", "imex")


@dataclass(frozen=True)
class SimConfig:
    d: int = 2
    n: int = 256
    eps: float = 0.04
    alpha: float = 0.5
    scheme: str = "imex"
    dt_safety: float = 0.2
    t_end: float = 0.01
    snapshot_every: int = 0
    initial: InitialSpec = field(default_factory=InitialSpec)
    plus: tuple = ()
    minus: tuple = ()
    r0: float = None
    output_dir: str = "out"
    density_ratio_every: int = 0
    seed: int = 0
    preset: str = None

    @property
    def grid(self):
        return TorusGrid(self.d, self.n)

    @property
    def h(self):
        return 1.0 / self.n

    def obstacles(self):
        return ObstacleSet.build(self.plus, self.minus, eps=self.eps, r0=self.r0)

    def replace(self, **kw):
        return replace(self, **kw)

    def validate(self):
        grid = self.grid
        if not self.eps > 0 or not self.eps < 0.25:
            raise ConfigError(f"epsilon: must lie in (0, 1/4), got {self.eps}")
        if self.eps < 4.0 * grid.h:
            raise ConfigError(
                f"epsilon: eps={self.eps:g} < 4h={4.0 * grid.h:g} (interface needs >= 4 cells)"
            )
        try:
            check_alpha(self.alpha)
        except ConfigError as e:
            raise ConfigError(f"alpha: {e}") from None
        if self.scheme not in SCHEMES:
            raise ConfigError(f"scheme: must be one of {SCHEMES}, got {self.scheme!r}")
        if not 0.0 < self.dt_safety <= 1.0:
            raise ConfigError(f"dt_safety: must lie in (0,1], got {self.dt_safety}")
        if not (self.t_end >= 0 and math.isfinite(self.t_end)):
            raise ConfigError(f"t_end: must be finite and >= 0, got {self.t_end}")
        if self.snapshot_every < 0 or self.density_ratio_every < 0:
            raise ConfigError("snapshot_every and density_ratio_every must be >= 0")
        dims = {("initial", len(b.center)) for b in self.initial.balls + self.initial.holes}
        dims |= {("obstacles", len(b.center)) for b in tuple(self.plus) + tuple(self.minus)}
        for name, dim in sorted(dims):
            if dim != self.d:
                raise ConfigError(f"{name}: balls are {dim}-dimensional but d={self.d}")
        root = math.sqrt(self.eps)
        for b in tuple(self.plus) + tuple(self.minus):
            if not root < b.radius:
                raise ConfigError(
                    f"epsilon: collar does not fit, need sqrt(eps)={root:.6g} < obstacle radius {b.radius:g}"
                )
        obs = self.obstacles()
        if not obs.empty:
            if self.d / obs.r0 >= 2.0 / self.eps:
                raise ConfigError(
                    f"r0: need d/r0 < 2/eps (d/r0={self.d / obs.r0:.4g}, 2/eps={2.0 / self.eps:.4g}); "
                    "otherwise roundoff beyond the wells grows inside the obstacles"
                )
            from .dynamics import select_dt

            dt = select_dt(self)
            diff = 2.0 * self.d / grid.h**2 if self.scheme == "explicit" else 0.0
            stiff = dt * (diff + 4.0 / self.eps**2 + 2.0 * (self.d / obs.r0) / self.eps)
            if stiff > 1.0:
                raise ConfigError(
                    f"dt_safety: obstacle forcing d/r0={self.d / obs.r0:.4g} makes the step "
                    f"non-monotone (dt*(stiffness)={stiff:.3g} > 1); lower dt_safety"
                )
        return self


def _int(text, key):
    v = _num(text, key)
    if v != int(v):
        raise ConfigError(f"{key}: expected an integer, got {text!r}")
    return int(v)


def parse_pairs(text):
    """Ordered ``key=value`` pairs from config text (``#`` starts a comment)."""
    pairs = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        for tok in line.split():
            if "=" not in tok:
                raise ConfigError(f"line {lineno}: expected key=value, got {tok!r}")
            k, v = tok.split("=", 1)
            pairs.append((k.strip(), v.strip()))
    return pairs


def expand(pairs):
    """Apply preset defaults first, then explicit keys."""
    from .presets import preset_pairs

    keys = [k for k, _ in pairs]
    for k in keys:
        if k not in KEYS:
            raise ConfigError(f"{k}: unknown key")
    merged = {}
    explicit = dict(pairs)
    if "preset" in explicit:
        merged.update(preset_pairs(explicit["preset"]))
    merged.update(explicit)
    return merged


def config_from_mapping(m):
    kw = {}
    if "d" in m:
        kw["d"] = _int(m["d"], "d")
    if "n" in m:
        kw["n"] = _int(m["n"], "n")
    d = kw.get("d", 2)
    for key, attr in (("epsilon", "eps"), ("alpha", "alpha"), ("dt_safety", "dt_safety"),
                      ("t_end", "t_end")):
        if key in m:
            kw[attr] = _num(m[key], key)
    for key in ("snapshot_every", "density_ratio_every", "seed"):
        if key in m:
            kw[key] = _int(m[key], key)
    if "scheme" in m:
        kw["scheme"] = m["scheme"]
    if "output_dir" in m:
        kw["output_dir"] = m["output_dir"]
    if "preset" in m:
        kw["preset"] = m["preset"]
    if "initial" in m:
        kw["initial"] = parse_initial(m["initial"], d)
    r0s = []
    for key, attr in (("obstacle_plus", "plus"), ("obstacle_minus", "minus")):
        if key in m:
            balls, r0 = parse_balls(m[key], d)
            kw[attr] = tuple(balls)
            if r0 is not None:
                r0s.append(r0)
    if len(set(r0s)) > 1:
        raise ConfigError("r0: conflicting values in obstacle_plus and obstacle_minus")
    if r0s:
        kw["r0"] = r0s[0]
    try:
        return SimConfig(**kw)
    except ConfigError:
        raise
    except (TypeError, ValueError) as e:
        raise ConfigError(str(e)) from None


def parse_config(text) -> SimConfig:
    return config_from_mapping(expand(parse_pairs(text))).validate()


def render_config(cfg: SimConfig) -> str:
    """Render every field explicitly; ``parse_config(render_config(c)) == c``."""
    lines = [
        f"d={cfg.d}",
        f"n={cfg.n}",
        f"epsilon={cfg.eps!r}",
        f"alpha={cfg.alpha!r}",
        f"scheme={cfg.scheme}",
        f"dt_safety={cfg.dt_safety!r}",
        f"t_end={cfg.t_end!r}",
        f"snapshot_every={cfg.snapshot_every}",
        f"initial={format_initial(cfg.initial)}",
    ]
    lines.append(f"obstacle_plus={format_balls(cfg.plus, cfg.r0)}")
    lines.append(f"obstacle_minus={format_balls(cfg.minus)}")
    lines += [
        f"output_dir={cfg.output_dir}",
        f"density_ratio_every={cfg.density_ratio_every}",
        f"seed={cfg.seed}",
    ]
    if cfg.preset is not None:
        lines.insert(0, f"preset={cfg.preset}")
    return "\n".join(lines) + "\n"
