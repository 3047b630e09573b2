"""Distances from matrix polynomials to polynomials with prescribed eigenvalues.

Only the constant coefficient is perturbed. Distances are computed through
inner/outer singular value optimization on structured Kronecker matrices,
and the optimal perturbation is constructed and verified.
"""

from .linalg_core import NumericalFailure, SvdResult, svd_full, pencil_eigenvalues
from .polynomial import MatrixPolynomial, CompanionPencil, random_polynomial
from .structured import (
    build_C,
    build_Q_kronecker,
    build_Q_divdiff,
    dQ_dgamma,
    gamma_pairs,
    increasing_sequences,
    index_of,
)
from .objective import ObjectiveEval, Certificates, evaluate, certificates
from .optimizer import (
    OptimizerConfig,
    InnerResult,
    DistanceReport,
    maximize_inner,
    tau_r,
    mult_distance,
    nearest_multiple_eig,
)
from .perturbation import PerturbationVerdict, optimal_delta, verify
from .pseudospectrum import Region, PseudospectrumGrid, grid_sigma_min, contour_extract
from .oracle import scan_inner_r2, penalty_min_distance, random_ball_sampler
from .io import read_poly, write_poly, report_to_dict, FormatError

__version__ = "0.1.0"
