"""Periodic uniform grid on the unit torus and the discrete operators on it.

Fields are plain numpy arrays of shape ``(n,) * d``. Grid points sit at
``x_i = i * h`` with ``h = 1 / n``.
"""

from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.fft

from .errors import ConfigError, NonFiniteError


@dataclass(frozen=True)
class TorusGrid:
    d: int
    n: int

    def __post_init__(self):
        if self.d not in (2, 3):
            raise ConfigError(f"d must be 2 or 3, got {self.d}")
        if int(self.n) != self.n or self.n < 16:
            raise ConfigError(f"n must be an integer >= 16, got {self.n}")

    @property
    def h(self) -> float:
        return 1.0 / self.n

    @property
    def shape(self):
        return (self.n,) * self.d

    @property
    def size(self) -> int:
        return self.n**self.d

    @property
    def cell_volume(self) -> float:
        return self.h**self.d

    def axis(self):
        return np.arange(self.n) * self.h

    def mesh(self):
        """Coordinate arrays, one per axis, each of the full grid shape."""
        return np.meshgrid(*([self.axis()] * self.d), indexing="ij")

    def periodic_distance(self, center):
        """Distance from every grid point to ``center`` on the torus."""
        return periodic_distance(self.mesh(), center)

    @cached_property
    def stencil_symbol(self):
        """Eigenvalues of the periodic (2d+1)-point Laplacian, rfft layout."""
        return _symbol(self, "stencil")

    @cached_property
    def spectral_symbol(self):
        return _symbol(self, "spectral")


def periodic_distance(coords, center):
    sq = 0.0
    for x, c in zip(coords, center):
        dx = np.abs(np.asarray(x, dtype=float) - c)
        dx = np.minimum(dx, 1.0 - dx)
        sq = sq + dx * dx
    return np.sqrt(sq)


def _symbol(grid, kind):
    n, h = grid.n, grid.h
    k_full = np.fft.fftfreq(n, d=1.0 / n)
    k_half = np.fft.rfftfreq(n, d=1.0 / n)
    if kind == "stencil":
        per = lambda k: -(2.0 / h**2) * (1.0 - np.cos(2.0 * np.pi * k * h))
    else:
        per = lambda k: -4.0 * np.pi**2 * k**2
    axes = [per(k_full)] * (grid.d - 1) + [per(k_half)]
    out = np.zeros([len(a) for a in axes])
    for i, a in enumerate(axes):
        shape = [1] * grid.d
        shape[i] = len(a)
        out = out + a.reshape(shape)
    return out


def check_field(f, grid: TorusGrid):
    f = np.asarray(f, dtype=float)
    if f.shape != grid.shape:
        raise ConfigError(f"field shape {f.shape} does not match grid shape {grid.shape}")
    return f


def laplacian(f, grid: TorusGrid, mode: str = "stencil"):
    """Periodic Laplacian.

    ``stencil`` is the centered (2d+1)-point stencil. ``stencil_fft`` applies
    the same operator through its Fourier symbol. ``spectral`` uses the
    analytic symbol -4 pi^2 |k|^2.
    """
    f = check_field(f, grid)
    if mode == "stencil":
        out = np.zeros_like(f)
        for ax in range(grid.d):
            out += np.roll(f, -1, ax) - 2.0 * f + np.roll(f, 1, ax)
        return out / grid.h**2
    if mode == "stencil_fft":
        sym = grid.stencil_symbol
    elif mode == "spectral":
        sym = grid.spectral_symbol
    else:
        raise ConfigError(f"unknown laplacian mode {mode!r}")
    return scipy.fft.irfftn(sym * scipy.fft.rfftn(f), s=f.shape)


def integrate(f, grid: TorusGrid) -> float:
    """Rectangle rule on the unit torus (numpy's fixed pairwise summation)."""
    f = check_field(f, grid)
    return float(np.sum(f) * grid.cell_volume)


def grad_sq(f, grid: TorusGrid):
    """Squared centered-difference gradient."""
    f = check_field(f, grid)
    out = np.zeros_like(f)
    for ax in range(grid.d):
        g = (np.roll(f, -1, ax) - np.roll(f, 1, ax)) / (2.0 * grid.h)
        out += g * g
    return out


def forward_grad_sq(f, grid: TorusGrid):
    """Squared forward-difference gradient; the energy density the stencil
    Laplacian is the exact variational derivative of."""
    f = check_field(f, grid)
    out = np.zeros_like(f)
    for ax in range(grid.d):
        g = (np.roll(f, -1, ax) - f) / grid.h
        out += g * g
    return out


def require_finite(f, what="field"):
    if not np.all(np.isfinite(f)):
        idx = np.unravel_index(np.argmin(np.isfinite(f)), np.shape(f))
        raise NonFiniteError(f"{what} has a non-finite value at index {tuple(int(i) for i in idx)}")
