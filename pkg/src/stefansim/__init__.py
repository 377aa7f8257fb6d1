"""Similarity solutions of a two-phase Stefan problem with temperature-dependent coefficients."""

__version__ = "0.1.0"

from .exceptions import (ConvergenceError, DomainError, ModelDomainError, NoRootError,
                         QuadratureError, SpecError, StefanError)
from .thermal import (Affine, Constant, CoefficientModel, EnvelopeParams, Power, ProblemSpec,
                      Tabulated, default_exponents, dimensionless_model, estimate_envelopes,
                      validate_window)
from .profile import Profile, make_liquid_grid, make_solid_grid
from .solver import SolveOptions, Solution, apply_V, apply_W, beta_residual, fixed_point, solve
from .field import FieldSolution, ode_residual, reconstruct, stefan_residuals
from .config import load_config
