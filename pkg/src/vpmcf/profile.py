"""Double-well potential and the 1-D profile functions built from it."""

import numpy as np

from .errors import ConfigError, DomainError

SIGMA = 4.0 / 3.0  # integral of sqrt(2 W) over [-1, 1]


def well(r):
    """Return ``(W, W', sqrt(2W))`` for W(r) = (1 - r^2)^2 / 2.

    ``sqrt(2W)`` is evaluated as |1 - r^2| so it stays real off [-1, 1].
    """
    r = np.asarray(r, dtype=float)
    q = 1.0 - r * r
    return 0.5 * q * q, -2.0 * r * q, np.abs(q)


def k_fn(r):
    """Primitive of sqrt(2W): k(r) = r - r^3 / 3."""
    r = np.asarray(r, dtype=float)
    return r - r * r * r / 3.0


def K_fn(r):
    """Normalized primitive K(r) = 1/2 + k(r) / sigma on [-1, 1]."""
    r = np.asarray(r, dtype=float)
    if np.any(~(np.abs(r) <= 1.0)):
        raise DomainError("K_fn is defined on [-1, 1] only; got a value outside")
    return 0.5 + k_fn(r) / SIGMA


def tanh_profile(r, eps):
    if not eps > 0:
        raise ConfigError(f"eps must be positive, got {eps}")
    return np.tanh(np.asarray(r, dtype=float) / eps)
