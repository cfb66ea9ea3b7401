"""Toeplitz determinants of Taylor coefficients of univalent functions."""

from .classes import (
    FunctionSpec,
    HerglotzAtoms,
    bounded_turning_from_caratheodory,
    caratheodory_coeffs,
    close_to_convex_from,
    convex_from_caratheodory,
    membership_check,
    named_function,
    starlike_from_caratheodory,
)
from .determinants import ToeplitzResult, functional_library, t2_closed, t3_closed, toeplitz_det
from .experiments import EXPERIMENT_IDS, extremal_experiment
from .series import TaylorSeries, UnitSeries, ps_derivative, ps_div, ps_eval, ps_mul, ps_z_derivative
from .typically_real import (
    RegionHull,
    RobertsonMeasure,
    chebyshev_u,
    region_hull,
    two_atom_family,
    typically_real_coeffs,
)

__version__ = "0.1.0"
