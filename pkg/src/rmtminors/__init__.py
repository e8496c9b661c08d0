"""Extreme eigenvalues of principal minors of Wishart and Wigner matrices."""

__version__ = "0.1.0"

from ._backend import BACKEND  # noqa: E402
from .errors import CapacityError, DomainError, InputError  # noqa: E402
from .linalg import (SymMatrix, Spectrum, eigh, lambda1, lambda_min,  # noqa: E402
                     principal_minor, avg_sum_lower_bound, spectral_norm, log_det_psd,
                     read_matrix, write_matrix, format_matrix, parse_matrix)
from .rng import GENERATOR, RngStream, derive_stream  # noqa: E402
from .ensembles import (EnsembleSpec, sample, sample_gaussian_matrix,  # noqa: E402
                        sample_wigner, sample_wishart)
from .minors import (SubsetExtremeResult, greedy_max, max_minor_lambda1,  # noqa: E402
                     max_minor_lambda1_upto, min_minor_lambdam)

__all__ = [
    "__version__", "BACKEND", "CapacityError", "DomainError", "InputError",
    "SymMatrix", "Spectrum", "eigh", "lambda1", "lambda_min", "principal_minor",
    "avg_sum_lower_bound", "spectral_norm", "log_det_psd", "read_matrix", "write_matrix",
    "format_matrix", "parse_matrix", "GENERATOR", "RngStream", "derive_stream",
    "EnsembleSpec", "sample", "sample_gaussian_matrix", "sample_wigner", "sample_wishart",
    "SubsetExtremeResult", "greedy_max", "max_minor_lambda1", "max_minor_lambda1_upto",
    "min_minor_lambdam",
]
