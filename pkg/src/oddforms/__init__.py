"""Systems of odd-degree integer forms: ranks, regularization, local solutions,
scaling and almost-prime solution counts."""

from .counting import CountQuery, CountRecord, almost_prime_count, growth_fit, weighted_prime_count
from .errors import (
    CapExceeded, DimensionError, EvenDegreeError, HomogeneityError, NoSolutionFound, OddFormsError,
    SystemSyntaxError, VerificationError,
)
from .forms import Form, FormSystem, Monomial, format_system, parse_system
from .kernels import available_backends, backend_name, set_backend, use_backend
from .local import count_points, exponential_sum, find_nonsingular_unit_solutions, real_nonsingular_solution
from .padic import PAdicPoint, find_padic_nonzero_solution, hensel_lift
from .rank import birch_rank, linear_rank, schmidt_rank, schmidt_rank_system
from .regularize import GrowthFunctions, hyperplane_cleanup, linear_cleanup, prepare_reduced_system, regularize
from .scaling import apply_signs, build_multipliers, detect_bad_primes, verify_scaled_local

__version__ = "0.1.0"
