"""Lagrangian solver and diagnostics for radially symmetric radiative Euler flow in an annulus."""

from .eos import DomainError, GasParams, equilibrium_constants, rho_from_P_s, theta_from_P_s
from .geometry import AnnulusGeometry, MassGrid, mass_coordinate, r0_from_x, reconstruct_r
from .radiation import EllipticProblem, EllipticSolveError, solve_radiative_flux
from .evolution import Model, SimState, StateInvalidError, integrate, make_state, stable_dt, step
from .initial_data import (InitialDataSpec, build, check_compatibility, equilibrium_data, model_for,
                           time_derivatives_at_zero)
from .picard import FrozenFields, picard_iterate, solve_linearized
from .diagnostics import (NormReport, apriori_monitor, build_report, discrete_norm, energy_m0,
                          norm_record, perturbation_residuals)
from .config import ConfigError, RunConfig, parse_config
from .driver import Trajectory, run

__version__ = "0.1.0"
