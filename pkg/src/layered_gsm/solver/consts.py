"""Numerical constants shared by the solver modules."""

from typing import Final

from scipy import constants

EPS0: Final[float] = constants.epsilon_0
MU0: Final[float] = constants.mu_0
C0: Final[float] = constants.c

# Magnitude cap for intermediate Legendre values.
LEGENDRE_OVERFLOW_CAP: Final[float] = 1e280

MAX_LEGENDRE_DEGREE: Final[int] = 64
MAX_QUADRATURE_ORDER: Final[int] = 512
KAPPA_RULE_MAX_LMAX: Final[int] = 20
KAPPA_FLOOR: Final[float] = 1.0 + 1e-6

DEFAULT_IOTA: Final[float] = 0.55
DEFAULT_QUAD_ORDER: Final[int] = 33

# Denominators below this magnitude are treated as singular.
SINGULAR_DENOMINATOR: Final[float] = 1e-300

DEFAULT_RCOND_FLOOR: Final[float] = 1e-12
MAX_SYNTHESIS_ATTEMPTS: Final[int] = 10
