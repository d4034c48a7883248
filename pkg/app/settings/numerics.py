import math
from .base import env

# Kernel parameter defaults (rho1 = DEFAULT_RHO1_RATIO * rho)
DEFAULT_RHO = env.float("CARLEMAN_DEFAULT_RHO", 1.0)
DEFAULT_A = env.float("CARLEMAN_DEFAULT_A", 3.0)
DEFAULT_RHO1_RATIO = env.float("CARLEMAN_DEFAULT_RHO1_RATIO", 0.5)

# Quadrature
QUAD_ABS_TOL = env.float("QUAD_ABS_TOL", 1e-12)
QUAD_REL_TOL = env.float("QUAD_REL_TOL", 1e-10)
QUAD_MAX_SUBDIVISIONS = env.int("QUAD_MAX_SUBDIVISIONS", 200)
QUAD_MAX_SEGMENTS = env.int("QUAD_MAX_SEGMENTS", 64)

# Kernel evaluation
SMALL_ETA_FACTOR = env.float("SMALL_ETA_FACTOR", 1e-6)  # eta_switch = SMALL_ETA_FACTOR * h
POLE_TOLERANCE = env.float("POLE_TOLERANCE", 1e-12)

# Truncation of the boundary integrals
TRUNCATION_MARGIN = env.float("TRUNCATION_MARGIN", math.log(100.0))

# Domains
NEAR_BOUNDARY_TOL = env.float("NEAR_BOUNDARY_TOL", 1e-3)
DOMAIN_SAMPLE_SPAN = env.float("DOMAIN_SAMPLE_SPAN", 50.0)
DOMAIN_SAMPLE_COUNT = env.int("DOMAIN_SAMPLE_COUNT", 2001)

# Growth certificates
GROWTH_FIT_TOLERANCE = env.float("GROWTH_FIT_TOLERANCE", 0.05)
