"""Measured quantities along a trajectory: energy, surface measure,
discrepancy, density ratio, barrier violations, volume drifts."""

import math
import warnings
from dataclasses import asdict, dataclass, fields

import numpy as np
import scipy.fft
from scipy import ndimage

from . import kernels
from .errors import DegenerateWarning, DomainError, MaxPrincipleError
from .grid import TorusGrid, forward_grad_sq, grad_sq, integrate, periodic_distance
from .multiplier import weighted_phase_volume
from .obstacles import barrier_fields
from .profile import SIGMA, K_fn, k_fn, well

MAX_PRINCIPLE_TOL = 1e-12

CSV_COLUMNS = (
    "t", "lambda", "energy_total", "mu_total", "penalty", "int_abs_xi", "sup_xi",
    "max_abs_phi", "barrier_violation_plus", "barrier_violation_minus",
    "vol_weighted_drift", "vol_indicator", "vol_smooth", "lambda_l2_cum",
    "dissipation_residual", "density_ratio", "bv_k",
)


def grid_of(phi):
    phi = np.asarray(phi)
    return TorusGrid(phi.ndim, phi.shape[0])


def mu_density(phi, eps, grid=None):
    """Pointwise (eps |grad phi|^2 / 2 + W(phi) / eps) / sigma."""
    grid = grid or grid_of(phi)
    W, _, _ = well(phi)
    return (0.5 * eps * grad_sq(phi, grid) + W / eps) / SIGMA


def _penalty(phi, phi0, template, eps, alpha):
    dv = integrate(template.a * (k_fn(phi0) - k_fn(phi)), template.grid)
    return 0.5 * eps ** (-alpha) * dv * dv


def energy_total(phi, phi0, template, eps, alpha):
    """Return ``(E, mu_total, penalty)``."""
    grid = template.grid
    W, _, _ = well(phi)
    mu_part = integrate(0.5 * eps * grad_sq(phi, grid) + W / eps, grid)
    pen = _penalty(phi, phi0, template, eps, alpha)
    return mu_part + pen, mu_part / SIGMA, pen


def stencil_energy(phi, phi0, template, eps, alpha):
    """Energy with the forward-difference gradient, whose variational
    derivative is exactly the stencil Laplacian. Used for the discrete
    dissipation balance."""
    grid = template.grid
    W, _, _ = well(phi)
    return integrate(0.5 * eps * forward_grad_sq(phi, grid) + W / eps, grid) + _penalty(
        phi, phi0, template, eps, alpha
    )


def discrepancy_stats(phi, eps, grid=None):
    """Return ``(xi, int |xi| / sigma, max xi)``."""
    grid = grid or grid_of(phi)
    W, _, _ = well(phi)
    xi = 0.5 * eps * grad_sq(phi, grid) - W / eps
    return xi, integrate(np.abs(xi), grid) / SIGMA, float(np.max(xi))


def bv_k(phi, grid=None):
    """Total variation of k(phi) via the chain rule with the centered gradient."""
    grid = grid or grid_of(phi)
    _, _, s2w = well(phi)
    return integrate(s2w * np.sqrt(grad_sq(phi, grid)), grid)


def default_radii(grid: TorusGrid):
    radii, r = [], 4.0 * grid.h
    while r <= 0.25 + 1e-12:
        radii.append(r)
        r *= 2.0
    return radii


def sample_centers(phi, seed=0, n_interface=256, n_background=32):
    """Flat indices: up to ``n_interface`` points of {|phi| < 0.9} and
    ``n_background`` uniform points, drawn with a fixed seed."""
    rng = np.random.default_rng(seed)
    flat = np.abs(np.asarray(phi)).reshape(-1)
    iface = np.flatnonzero(flat < 0.9)
    if iface.size > n_interface:
        iface = np.sort(rng.choice(iface, size=n_interface, replace=False))
    bg = rng.integers(0, flat.size, size=n_background) if n_background else np.empty(0, int)
    return np.concatenate([iface, bg]).astype(np.int64)


def _ball_masses(density, grid, r):
    """mu-mass of the closed periodic ball of radius r around every grid point."""
    ind = (periodic_distance(grid.mesh(), (0.0,) * grid.d) <= r + 1e-12).astype(float)
    conv = scipy.fft.irfftn(scipy.fft.rfftn(density) * scipy.fft.rfftn(ind), s=density.shape)
    return conv * grid.cell_volume


def density_ratio(phi, eps, grid=None, centers=None, radii=None, seed=0,
                  n_interface=256, n_background=32):
    """Sampled lower bound of sup mu(B_r(x)) / (omega_{d-1} r^{d-1})."""
    phi = np.asarray(phi, dtype=float)
    grid = grid or grid_of(phi)
    if centers is None:
        centers = sample_centers(phi, seed, n_interface, n_background)
    centers = np.asarray(centers, dtype=np.int64).reshape(-1)
    if centers.size == 0:
        raise DomainError("density ratio needs at least one sample center")
    radii = default_radii(grid) if radii is None else list(radii)
    for r in radii:
        if not 2.0 * grid.h < r < 0.5:
            raise DomainError(f"density ratio radius {r} outside (2h, 0.5)")
    if not radii:
        raise DomainError("density ratio needs at least one radius")
    omega = 2.0 if grid.d == 2 else math.pi
    dens = mu_density(phi, eps, grid)
    best = 0.0
    for r in radii:
        m = _ball_masses(dens, grid, r).reshape(-1)[centers]
        best = max(best, float(np.max(m)) / (omega * r ** (grid.d - 1)))
    return best


def barrier_check(phi, obs, eps, grid=None, fields=None):
    """Largest violation of the certified barrier ordering, ``(plus, minus)``."""
    phi = np.asarray(phi, dtype=float)
    grid = grid or grid_of(phi)
    under, over, _ = fields if fields is not None else barrier_fields(obs, grid, eps)
    vp = float(max(np.max(under - phi), 0.0)) if under is not None else 0.0
    vm = float(max(np.max(phi - over), 0.0)) if over is not None else 0.0
    return vp, vm


def clip_roundoff(phi):
    """Clip excursions up to the max-principle tolerance; larger ones raise."""
    m = float(np.max(np.abs(phi)))
    if m > 1.0 + MAX_PRINCIPLE_TOL:
        raise MaxPrincipleError(f"|phi| reaches {m!r}", value=m)
    return np.clip(phi, -1.0, 1.0)


def conservation_report(phi, phi0, template, mult):
    """Return ``(|V0 - V|, measure of {phi > 0}, int K(phi))``."""
    grid = template.grid
    drift = abs(mult.v0 - weighted_phase_volume(phi, template))
    vol_ind = np.count_nonzero(np.asarray(phi) > 0) * grid.cell_volume
    vol_smooth = integrate(K_fn(clip_roundoff(phi)), grid)
    return float(drift), float(vol_ind), float(vol_smooth)


def _periodic_labels(mask):
    labels, count = ndimage.label(mask)
    parent = np.arange(count + 1)

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for ax in range(mask.ndim):
        lo = np.take(labels, 0, axis=ax).reshape(-1)
        hi = np.take(labels, -1, axis=ax).reshape(-1)
        for u, v in zip(lo[(lo > 0) & (hi > 0)], hi[(lo > 0) & (hi > 0)]):
            ru, rv = find(u), find(v)
            if ru != rv:
                parent[max(ru, rv)] = min(ru, rv)
    roots = np.array([find(i) for i in range(count + 1)])
    return roots[labels]


def _equiv_radius(vol, d):
    return math.sqrt(vol / math.pi) if d == 2 else (3.0 * vol / (4.0 * math.pi)) ** (1.0 / 3.0)


def component_radii(phi, positive=True):
    """Equivalent radii of every periodic component of {phi > 0} (or {phi < 0}),
    largest first."""
    phi = np.asarray(phi)
    grid = grid_of(phi)
    mask = phi > 0 if positive else phi < 0
    if mask.all():
        warnings.warn("phase region covers the whole torus", DegenerateWarning, stacklevel=2)
    labels = _periodic_labels(mask)
    counts = np.bincount(labels.reshape(-1))[1:]
    vols = sorted((c * grid.cell_volume for c in counts if c > 0), reverse=True)
    return [_equiv_radius(v, grid.d) for v in vols]


def _nearest_index(grid, center):
    return tuple(int(round(c * grid.n)) % grid.n for c in center)


def component_volume(phi, center, positive=True):
    phi = np.asarray(phi)
    grid = grid_of(phi)
    mask = phi > 0 if positive else phi < 0
    idx = _nearest_index(grid, center)
    if not mask[idx]:
        raise DomainError(f"center {tuple(center)} is not inside the selected phase")
    if mask.all():
        warnings.warn("phase region covers the whole torus; radius is degenerate",
                      DegenerateWarning, stacklevel=3)
    labels = _periodic_labels(mask)
    return np.count_nonzero(labels == labels[idx]) * grid.cell_volume


def interface_radius(phi, center, positive=True):
    """Equivalent radius of the component of {phi > 0} containing ``center``."""
    phi = np.asarray(phi)
    return _equiv_radius(component_volume(phi, center, positive), phi.ndim)


@dataclass
class DiagnosticsRecord:
    t: float
    lam: float
    energy_total: float
    mu_total: float
    penalty: float
    int_abs_xi: float
    sup_xi: float
    max_abs_phi: float
    barrier_violation_plus: float
    barrier_violation_minus: float
    vol_weighted_drift: float
    vol_indicator: float
    vol_smooth: float
    lambda_l2_cum: float
    dissipation_residual: float
    density_ratio: float
    bv_k: float
    # not written to the CSV
    lyapunov: float = math.nan
    energy_stencil: float = math.nan
    grad_max: float = math.nan

    def row(self):
        vals = [getattr(self, f.name) for f in fields(self)][: len(CSV_COLUMNS)]
        return [fmt(v, blank_nan=(i == CSV_COLUMNS.index("density_ratio")))
                for i, v in enumerate(vals)]

    def as_dict(self):
        return asdict(self)


def fmt(v, blank_nan=False):
    """17 significant digits: round-trips every float64 exactly."""
    if blank_nan and (v is None or (isinstance(v, float) and math.isnan(v))):
        return ""
    return "%.17g" % v


class Monitor:
    """Per-step diagnostics on the fused kernel path."""

    def __init__(self, grid, template, mult, eps, alpha, obstacles=None, barrier=None):
        self.grid, self.template, self.mult = grid, template, mult
        self.eps, self.alpha = eps, alpha
        if barrier is None and obstacles is not None and not obstacles.empty:
            barrier = barrier_fields(obstacles, grid, eps, warn=False)
        self.under, self.over = (barrier[0], barrier[1]) if barrier else (None, None)
        self.hd = grid.cell_volume

    def measure(self, phi):
        return kernels.moments(phi, self.template.a, self.template.b, self.eps, self.grid.h,
                               self.under, self.over)

    def volume(self, m):
        return m.vol_a * self.hd

    def lam(self, m):
        return self.mult.lambda_from_volume(self.volume(m))

    def penalty(self, m):
        dv = self.mult.v0 - self.volume(m)
        return 0.5 * self.eps ** (-self.alpha) * dv * dv

    def stencil_energy(self, m):
        return m.e_f * self.hd + self.penalty(m)

    def lyapunov(self, m):
        return self.stencil_energy(m) - m.bk * self.hd

    def residual(self, m_old, m_new, diff_sq, dt):
        """E_h(new) - E_h(old) + eps int ((new-old)/dt)^2 dt - int b (k(new) - k(old))."""
        return (
            self.stencil_energy(m_new) - self.stencil_energy(m_old)
            + self.eps * diff_sq * self.hd / dt
            - (m_new.bk - m_old.bk) * self.hd
        )

    def record(self, t, m, lam, lambda_l2, residual=0.0, density=math.nan):
        hd, pen = self.hd, self.penalty(m)
        mu_part = m.e_c * hd
        return DiagnosticsRecord(
            t=t,
            lam=lam,
            energy_total=mu_part + pen,
            mu_total=mu_part / SIGMA,
            penalty=pen,
            int_abs_xi=m.xi_abs * hd / SIGMA,
            sup_xi=m.xi_max,
            max_abs_phi=m.maxabs,
            barrier_violation_plus=m.viol_plus,
            barrier_violation_minus=m.viol_minus,
            vol_weighted_drift=abs(self.mult.v0 - self.volume(m)),
            vol_indicator=m.npos * hd,
            vol_smooth=0.5 + m.ksum * hd / SIGMA,
            lambda_l2_cum=lambda_l2,
            dissipation_residual=residual,
            density_ratio=density,
            bv_k=m.bv * hd,
            lyapunov=self.lyapunov(m),
            energy_stencil=self.stencil_energy(m),
            grad_max=m.grad_max,
        )
