"""Runs of one preset across a ladder of (eps, n) and the scaled statistics
compared across it."""

import math
import os
from dataclasses import dataclass

import numpy as np

from .config import KEYS, config_from_mapping, parse_pairs
from .dynamics import Simulation
from .errors import ConfigError
from .initial import InitialSpec
from .obstacles import _num
from .presets import SWEEP, preset_pairs

META_KEYS = ("base", "epsilons", "ns", "saturation")


@dataclass
class SweepRow:
    eps: float
    n: int
    alpha: float
    mu0: float
    sup_lambda_scaled: float
    lambda_l2: float
    drift_scaled: float
    mean_int_abs_xi: float
    sup_xi: float
    sup_xi_scaled: float
    density_ratio_max: float
    grad_scaled: float


def parse_meta(text):
    """Sweep meta-config: ``base``, ``epsilons``, ``ns``, ``saturation`` plus
    ordinary config keys applied to every run."""
    pairs = parse_pairs(text)
    meta = dict(SWEEP)
    overrides = {}
    for k, v in pairs:
        if k == "preset":
            if v != "epsilon_sweep":
                meta["base"] = v
        elif k == "base":
            meta["base"] = v
        elif k == "epsilons":
            meta["epsilons"] = tuple(_num(x, k) for x in v.split(","))
        elif k == "ns":
            meta["ns"] = tuple(int(_num(x, k)) for x in v.split(","))
        elif k == "saturation":
            meta["saturation"] = _num(v, k)
        elif k in ("epsilon", "n"):
            raise ConfigError(f"{k}: set by the sweep ladder; use epsilons/ns")
        elif k not in KEYS:
            raise ConfigError(f"{k}: unknown key")
        else:
            overrides[k] = v
    if len(meta["epsilons"]) != len(meta["ns"]):
        raise ConfigError("epsilons and ns must have the same length")
    return meta, overrides


def sweep_configs(meta, overrides=None):
    base = preset_pairs(meta["base"])
    base["preset"] = meta["base"]
    base.update(overrides or {})
    out_root = base.get("output_dir", "out")
    cfgs = []
    for eps, n in zip(meta["epsilons"], meta["ns"]):
        m = dict(base, epsilon=repr(float(eps)), n=str(n))
        m["output_dir"] = os.path.join(out_root, f"eps{eps:g}_n{n}")
        cfg = config_from_mapping(m)
        spec = cfg.initial
        if meta.get("saturation") is not None:
            spec = InitialSpec(spec.balls, spec.holes, spec.complement, meta["saturation"])
        cfgs.append(cfg.replace(initial=spec).validate())
    return cfgs


def summarize(result):
    cfg, recs = result.cfg, result.records
    eps, a = cfg.eps, cfg.alpha
    lam = np.array([r.lam for r in recs])
    xi = np.array([r.int_abs_xi for r in recs])
    drift = np.array([r.vol_weighted_drift for r in recs])
    sup_xi = max(r.sup_xi for r in recs)
    dens = [r.density_ratio for r in recs if not math.isnan(r.density_ratio)]
    return SweepRow(
        eps=eps,
        n=cfg.n,
        alpha=a,
        mu0=recs[0].mu_total,
        sup_lambda_scaled=float(np.max(np.abs(lam))) * eps ** (a / 2),
        lambda_l2=recs[-1].lambda_l2_cum,
        drift_scaled=float(np.max(drift)) * eps ** (-a / 2),
        mean_int_abs_xi=float(np.mean(xi)),
        sup_xi=sup_xi,
        sup_xi_scaled=sup_xi * eps ** ((1 + a / 2) / 2),
        density_ratio_max=max(dens) if dens else math.nan,
        grad_scaled=eps * max(r.grad_max for r in recs),
    )


def spread(values):
    """max/min of positive values; inf when a value is not positive."""
    v = [float(x) for x in values]
    if any(not x > 0 for x in v):
        return math.inf
    return max(v) / min(v)


def positive_spread(values):
    """Spread of the positive parts of an upper-bound quantity. Nonpositive
    entries satisfy any positive bound and are left out; fewer than two
    positive entries give 1."""
    v = [float(x) for x in values if x > 0]
    return max(v) / min(v) if len(v) >= 2 else 1.0


def run_sweep(meta, overrides=None, progress=None):
    cfgs = sweep_configs(meta, overrides)
    planned = tuple(c.eps for c in cfgs)
    results = []
    for cfg in cfgs:
        results.append(Simulation(cfg, planned_eps=planned).run())
        if progress:
            progress(cfg)
    return results, [summarize(r) for r in results]


SWEEP_COLUMNS = tuple(SweepRow.__dataclass_fields__)


def sweep_csv_text(rows):
    from .diagnostics import fmt

    out = [",".join(SWEEP_COLUMNS)]
    for r in rows:
        out.append(",".join(fmt(getattr(r, c)) for c in SWEEP_COLUMNS))
    return "\n".join(out) + "\n"
