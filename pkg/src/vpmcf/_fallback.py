"""Pure numpy twins of the compiled kernels (same signatures, flattened
arrays). ``threads`` is accepted and ignored."""

import numpy as np


def _view(f, n, d):
    return f.reshape((n,) * d)


def laplacian(f, n, d, h, threads=1):
    g = _view(f, n, d)
    acc = np.zeros_like(g)
    for ax in range(d):
        acc = acc + ((np.roll(g, -1, ax) - 2.0 * g) + np.roll(g, 1, ax))
    return (acc / (h * h)).reshape(-1)


def _react(p, g, eps):
    q = 1.0 - p * p
    return (2.0 * p * q) * (1.0 / (eps * eps)) + (g * np.abs(q)) * (1.0 / eps)


def explicit_update(phi, a, b, lam, eps, dt, n, d, h, threads=1):
    return phi + dt * (laplacian(phi, n, d, h) + _react(phi, lam * a + b, eps))


def imex_rhs(phi, a, b, lam, eps, dt, threads=1):
    return phi + dt * _react(phi, lam * a + b, eps)


def moments(phi, a, b, under, over, eps, n, d, h):
    with np.errstate(invalid="ignore", over="ignore"):
        return _moments(phi, a, b, under, over, eps, n, d, h)


def _moments(phi, a, b, under, over, eps, n, d, h):
    m = phi.shape[0]
    g = _view(phi, n, d)
    gc = np.zeros_like(g)
    gf = np.zeros_like(g)
    for ax in range(d):
        up, dn = np.roll(g, -1, ax), np.roll(g, 1, ax)
        t = (up - dn) * (1.0 / (2.0 * h))
        gc += t * t
        t = (up - g) * (1.0 / h)
        gf += t * t
    gc, gf = gc.reshape(-1), gf.reshape(-1)
    q = 1.0 - phi * phi
    w = 0.5 * q * q
    kp = phi - phi * phi * phi / 3.0
    xi = 0.5 * eps * gc - w / eps
    vp = float(max(np.max(under - phi), 0.0)) if under.shape[0] == m else 0.0
    vm = float(max(np.max(phi - over), 0.0)) if over.shape[0] == m else 0.0
    return (
        float(np.sum(0.5 * eps * gc + w / eps)),
        float(np.sum(np.abs(xi))),
        float(np.max(xi)),
        float(np.sum(0.5 * eps * gf + w / eps)),
        float(np.sum(a * kp)),
        float(np.sum(b * kp)),
        float(np.sum(kp)),
        int(np.count_nonzero(phi > 0.0)),
        float(np.max(np.abs(phi))),
        float(np.sum(np.abs(q) * np.sqrt(gc))),
        float(np.sqrt(np.max(gc))),
        vp,
        vm,
        int(np.count_nonzero(~np.isfinite(phi))),
    )


def diff_sq_sum(x, y):
    t = x - y
    return float(np.sum(t * t))
