"""Command line: ``run``, ``preset list``, ``oracle``, ``sweep``."""

import argparse
import os
import sys

from . import presets as presets_mod
from .config import parse_config
from .diagnostics import fmt
from .dynamics import Simulation
from .errors import ConfigError, VpmcfError
from .io import emit, oracle_csv_text
from .kernels import BACKEND
from .oracle import integrate_oracle, oracle_dt
from .sweep import parse_meta, run_sweep, sweep_csv_text

EXIT_CODES = {"config": 2, "validation": 3, "max_principle": 4, "non_finite": 4,
              "domain": 5, "io": 6}


def _read(path):
    try:
        with open(path) as f:
            return f.read()
    except OSError as e:
        raise ConfigError(f"cannot read {path}: {e.strerror}") from None


def _oracle_for(cfg):
    """Sharp-interface trajectory matching a configuration, or None."""
    try:
        twin = presets_mod.oracle_twin(cfg)
    except ConfigError:
        return None
    return integrate_oracle(twin, cfg.d, cfg.t_end, oracle_dt(twin))


def cmd_run(args):
    cfg = parse_config(_read(args.config))
    outdir = args.output_dir or cfg.output_dir
    result = Simulation(cfg).run()
    traj = _oracle_for(cfg) if cfg.preset in presets_mod.CATALOG else None
    emit(result, outdir, traj, {"kernel_backend": BACKEND})
    last = result.records[-1]
    print(f"wrote {outdir}: {len(result.records) - 1} steps, dt={fmt(result.dt)}, "
          f"t={fmt(last.t)}, max|phi|={fmt(last.max_abs_phi)}")
    return 0


def cmd_preset(args):
    for name, desc in presets_mod.presets().items():
        print(f"{name}\t{desc}")
    return 0


def cmd_oracle(args):
    cfg = parse_config(_read(args.config))
    traj = _oracle_for(cfg)
    if traj is None:
        raise ConfigError("initial: no balls, nothing to integrate")
    outdir = args.output_dir or cfg.output_dir
    os.makedirs(outdir, exist_ok=True)
    path = os.path.join(outdir, "oracle.csv")
    with open(path, "w") as f:
        f.write(oracle_csv_text(traj))
    print(f"wrote {path}: {len(traj.t)} rows, events={traj.events}")
    return 0


def cmd_sweep(args):
    meta, overrides = parse_meta(_read(args.meta_config))
    if args.output_dir:
        overrides["output_dir"] = args.output_dir
    results, rows = run_sweep(meta, overrides)
    root = overrides.get("output_dir", "out")
    for res in results:
        emit(res, res.cfg.output_dir, None, {"kernel_backend": BACKEND})
    os.makedirs(root, exist_ok=True)
    with open(os.path.join(root, "sweep.csv"), "w") as f:
        f.write(sweep_csv_text(rows))
    for r in rows:
        print(f"eps={r.eps:g} n={r.n}: eps^(a/2) sup|lam|={r.sup_lambda_scaled:.4g} "
              f"int lam^2={r.lambda_l2:.4g} <|xi|>={r.mean_int_abs_xi:.4g}")
    return 0


def build_parser():
    p = argparse.ArgumentParser(prog="vpmcf", description=__doc__)
    sub = p.add_subparsers(dest="cmd", required=True)
    r = sub.add_parser("run", help="run a configuration and write its outputs")
    r.add_argument("config")
    r.add_argument("--output-dir")
    r.set_defaults(func=cmd_run)
    pr = sub.add_parser("preset", help="list presets")
    pr.add_argument("action", choices=["list"])
    pr.set_defaults(func=cmd_preset)
    o = sub.add_parser("oracle", help="integrate the sharp-interface twin of a configuration")
    o.add_argument("config")
    o.add_argument("--output-dir")
    o.set_defaults(func=cmd_oracle)
    s = sub.add_parser("sweep", help="run a preset across the eps ladder")
    s.add_argument("meta_config")
    s.add_argument("--output-dir")
    s.set_defaults(func=cmd_sweep)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except VpmcfError as e:
        print(f"error category={e.category}: {e}", file=sys.stderr)
        return EXIT_CODES.get(e.category, 1)


if __name__ == "__main__":
    sys.exit(main())
