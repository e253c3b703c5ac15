"""The nonlocal multiplier lambda = eps^-alpha (V0 - V(t)) with V = int a k(phi)."""

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .grid import integrate
from .profile import k_fn


def check_alpha(alpha):
    if not 0.0 < alpha < 1.0:
        raise ConfigError(f"alpha must lie in (0,1), got {alpha}")


@dataclass
class MultiplierState:
    v0: float
    eps: float
    alpha: float
    last_lambda: float = 0.0

    def __post_init__(self):
        check_alpha(self.alpha)

    @classmethod
    def from_initial(cls, phi0, template, alpha):
        return cls(weighted_phase_volume(phi0, template), template.eps, alpha)

    @property
    def scale(self):
        return self.eps ** (-self.alpha)

    def lambda_from_volume(self, v):
        lam = self.scale * (self.v0 - v)
        self.last_lambda = lam
        return lam


def weighted_phase_volume(phi, template) -> float:
    return integrate(template.a * k_fn(phi), template.grid)


def lambda_value(state: MultiplierState, phi, template) -> float:
    if state.eps != template.eps:
        raise ConfigError(f"template built for eps={template.eps} but multiplier uses eps={state.eps}")
    return state.lambda_from_volume(weighted_phase_volume(phi, template))
