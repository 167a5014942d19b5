"""Traveling fronts for reaction-diffusion equations with (p,q)-Laplacian diffusion.

The package is organised around the reduced first-order problem

    y'(u) = c R(y(u)) - f(u),    y(0) = y(H) = 0,

obtained from a monotone front u(x + ct) through y = Q(u'):

* :mod:`pqfronts.operator`  the kernel Q, its inverse R and their asymptotics
* :mod:`pqfronts.reaction`  Fisher-type reactions and their slope constants
* :mod:`pqfronts.bounds`    analytic and subsolution-based speed bounds
* :mod:`pqfronts.shooting`  backward shooting, speed classification and c*
* :mod:`pqfronts.profile`   wave profiles rebuilt from a shoot
* :mod:`pqfronts.pdesim`    explicit finite differences for the full equation
* :mod:`pqfronts.figures`   data behind the five reference plots
* :mod:`pqfronts.cli`       command-line front end
"""

import math

from .bounds import (BoundSet, CompetitiveBounds, SubsolutionParams, competitive_bounds,
                     g_script, lower_bound, minimize_g_script, numeric_cplus, speed_bounds,
                     upper_bound_cplus)
from .errors import (BlowUp, BoundaryContamination, BoundUndefined, BracketFailure,
                     DomainBreach, IntegrationFailure, NoCertificate)
from .operator import (AsymptoticConstants, Mode, OperatorSpec, invertibility_limit,
                       q_derivative, q_value, r_asymptotic_constants, r_closed_form_2q,
                       r_inverse)
from .pdesim import FrontTrack, GridSpec, PdeRun, run, step
from .profile import TailRates, WaveProfile, profile_on_grid, reconstruct_profile, tail_exponents
from .reaction import (Family, ReactionSpec, SlopeLimits, evaluate_f, linear_cap_k,
                       load_tabulated_csv, rescale_to_unit, slope_limits)
from .shooting import (Classification, CriticalSpeedResult, ShootOutcome, ShootSettings,
                       WindowScan, classify_speed, competitive_window, critical_speed,
                       integrate_backward, tail_equilibria)

__version__ = "0.1.0"

__all__ = [name for name, obj in globals().items()
           if not name.startswith("_") and not isinstance(obj, type(math))]
