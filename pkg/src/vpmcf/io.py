"""File formats: binary snapshots, diagnostics and oracle CSVs, run manifest."""

import hashlib
import os

import numpy as np

from .config import KEYS, render_config
from .diagnostics import CSV_COLUMNS, fmt
from .errors import VpmcfError

MAGIC = "VPMCF1"


class OutputError(VpmcfError, OSError):
    category = "io"


def snapshot_name(step):
    return f"snap_{step:08d}.fld"


def snapshot_bytes(phi, t):
    phi = np.asarray(phi, dtype=float)
    header = f"{MAGIC}\nd={phi.ndim}\nn={phi.shape[0]}\nt={fmt(t)}\n".encode("ascii")
    return header + np.ascontiguousarray(phi).astype("<f8").tobytes(order="C")


def write_snapshot(path, phi, t):
    with open(path, "wb") as f:
        f.write(snapshot_bytes(phi, t))


def read_snapshot(path):
    """Return ``(phi, t)``."""
    with open(path, "rb") as f:
        data = f.read()
    lines = data.split(b"\n", 4)
    if len(lines) < 5 or lines[0] != MAGIC.encode():
        raise OutputError(f"{path}: not a {MAGIC} snapshot")
    try:
        d = int(lines[1].split(b"=")[1])
        n = int(lines[2].split(b"=")[1])
        t = float(lines[3].split(b"=")[1])
    except (IndexError, ValueError):
        raise OutputError(f"{path}: malformed snapshot header") from None
    payload = lines[4]
    if len(payload) != 8 * n**d:
        raise OutputError(f"{path}: payload has {len(payload)} bytes, expected {8 * n**d}")
    return np.frombuffer(payload, dtype="<f8").reshape((n,) * d).astype(float), t


def diag_csv_text(records):
    out = [",".join(CSV_COLUMNS)]
    out += [",".join(r.row()) for r in records]
    return "\n".join(out) + "\n"


def oracle_csv_text(traj):
    k = len(traj.radii[0]) if traj.radii else 0
    out = [",".join(["t"] + [f"R{i + 1}" for i in range(k)] + ["lambda", "pinned_mask"])]
    for t, R, lam, pin in zip(traj.t, traj.radii, traj.lam, traj.pinned):
        mask = "".join("1" if p else "0" for p in pin)
        out.append(",".join([fmt(t)] + [fmt(r) for r in R] + [fmt(lam), mask]))
    return "\n".join(out) + "\n"


def read_csv(path):
    """Columns of a CSV written by this package as {name: list of float}."""
    with open(path) as f:
        header = f.readline().strip().split(",")
        cols = {h: [] for h in header}
        for line in f:
            for h, v in zip(header, line.rstrip("\n").split(",")):
                cols[h].append(float(v) if v not in ("",) and h != "pinned_mask" else v)
    return cols


def sha256(path):
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def manifest_text(cfg, digests, extra=None):
    lines = [render_config(cfg).rstrip("\n")]
    for k, v in (extra or {}).items():
        lines.append(f"{k}={v}")
    for name in sorted(digests):
        lines.append(f"digest.{name}=sha256:{digests[name]}")
    return "\n".join(lines) + "\n"


def config_text_from_manifest(text):
    """Keep only the configuration keys of a manifest, for a rerun."""
    keep = [ln for ln in text.splitlines() if ln.split("=", 1)[0] in KEYS]
    return "\n".join(keep) + "\n"


def emit(result, outdir, oracle_traj=None, extra=None):
    """Write every output of a run; remove partial outputs on failure."""
    written = []
    try:
        os.makedirs(outdir, exist_ok=True)

        def put(name, data, mode="w"):
            path = os.path.join(outdir, name)
            written.append(path)
            with open(path, mode) as f:
                f.write(data)

        put("diag.csv", diag_csv_text(result.records))
        for step, t, phi in result.snapshots:
            put(snapshot_name(step), snapshot_bytes(phi, t), "wb")
        if oracle_traj is not None:
            put("oracle.csv", oracle_csv_text(oracle_traj))
        digests = {os.path.basename(p): sha256(p) for p in written}
        info = {"dt": fmt(result.dt)}
        info.update(extra or {})
        put("manifest.txt", manifest_text(result.cfg, digests, info))
        return digests
    except OSError as e:
        for p in written:
            try:
                os.remove(p)
            except OSError:
                pass
        raise OutputError(f"writing outputs to {outdir}: {e}") from e
