"""Phase-field simulator for volume-preserving mean curvature flow with
obstacles on the periodic unit torus, with diagnostics and a sharp-interface
reference."""

from .config import SimConfig, parse_config, render_config
from .dynamics import Simulation, run, select_dt, step
from .errors import (ConfigError, DomainError, MaxPrincipleError, NonFiniteError,
                     ValidationError, VpmcfError)
from .grid import TorusGrid
from .kernels import BACKEND

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "ConfigError", "DomainError", "MaxPrincipleError", "NonFiniteError",
    "SimConfig", "Simulation", "TorusGrid", "ValidationError", "VpmcfError",
    "parse_config", "render_config", "run", "select_dt", "step",
]
