"""Strong-coupling asymptotics of the principal Robin eigenvalue on domains with corners."""
from .corner_constants import (ConeBounds, bounds_codim3, bounds_codim_j, c2d,
                               cone_constant, domain_constant, polygon_constant)
from .errors import *  # noqa: F401,F403
from .fem2d import Mesh, gamma_sweep, mesh_polygon, principal_eigenvalue
from .geometry import (CornerDescriptor, PlanarPolygon, PolyhedralCone,
                       load_domain, max_min_distance_direction, section_profile)
from .model_solvers import ModelDomain, model_lambda
from .special_functions import ball_lambda_root, bessel_ratio, mu_tanh_root

__version__ = "0.1.0"
