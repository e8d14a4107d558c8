"""Meshfree Gaussian RBF collocation for the fractional Laplacian."""

from .collocation import (CollocationProblem, LinearSystem, RbfApproximant, SolveReport,
                          apply_operator, assemble, condition_number, evaluate, interpolate,
                          operator_rows, rms_error, solve)
from .errors import AssemblyError, ConditioningError, DataError, DomainError, QuadratureError
from .geometry import (Disk, Domain, Interval, PointCloud, Rectangle, SquareMinusDisk,
                       annulus_mapped, chebyshev_1d, disk_radial, tensor_2d, uniform_1d)
from .kernel import RbfKernel
from .quadrature import QuadratureSpec, exterior_data_integral, exterior_kernel_integral
from .reference import CASES, ProblemCase, get_case
from .specfun import coeff_C, coeff_c, gamma, hyp1f1, hyp2f1

__version__ = "0.1.0"
