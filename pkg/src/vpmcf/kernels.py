"""Backend selection for the hot loops.

The compiled extension is used when it imports; otherwise the numpy twin is
used. Setting ``VPMCF_BACKEND=python`` forces the numpy twin. Each backend is
bitwise deterministic on its own; the two agree to roundoff.
"""

import os
from collections import namedtuple

import numpy as np

from . import _fallback

Moments = namedtuple(
    "Moments",
    "e_c xi_abs xi_max e_f vol_a bk ksum npos maxabs bv grad_max viol_plus viol_minus nonfinite",
)

_EMPTY = np.empty(0)


def _load(name):
    if name == "python":
        return _fallback, "python"
    try:
        from . import _kernels
    except ImportError:
        if name == "compiled":
            raise
        return _fallback, "python"
    return _kernels, "compiled"


_impl, BACKEND = _load(os.environ.get("VPMCF_BACKEND", "auto"))
THREADS = max(1, int(os.environ.get("VPMCF_THREADS", "1")))


def backend(name=None):
    """Return the kernel module for ``name`` ('compiled', 'python') or the active one."""
    if name is None:
        return _impl
    return _load(name)[0]


def _flat(x):
    return np.ascontiguousarray(x, dtype=float).reshape(-1)


def explicit_update(phi, a, b, lam, eps, dt, h, impl=None, threads=None):
    k = impl or _impl
    n, d = phi.shape[0], phi.ndim
    out = k.explicit_update(_flat(phi), _flat(a), _flat(b), float(lam), float(eps), float(dt),
                            n, d, float(h), threads or THREADS)
    return out.reshape(phi.shape)


def imex_rhs(phi, a, b, lam, eps, dt, impl=None, threads=None):
    k = impl or _impl
    out = k.imex_rhs(_flat(phi), _flat(a), _flat(b), float(lam), float(eps), float(dt),
                     threads or THREADS)
    return out.reshape(phi.shape)


def laplacian(f, h, impl=None, threads=None):
    k = impl or _impl
    return k.laplacian(_flat(f), f.shape[0], f.ndim, float(h), threads or THREADS).reshape(f.shape)


def moments(phi, a, b, eps, h, under=None, over=None, impl=None):
    k = impl or _impl
    u = _EMPTY if under is None else _flat(under)
    o = _EMPTY if over is None else _flat(over)
    return Moments(*k.moments(_flat(phi), _flat(a), _flat(b), u, o, float(eps),
                              phi.shape[0], phi.ndim, float(h)))


def diff_sq_sum(x, y, impl=None):
    k = impl or _impl
    return float(k.diff_sq_sum(_flat(x), _flat(y)))
