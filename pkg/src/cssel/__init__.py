"""Column subset selection with spectral and Frobenius reconstruction guarantees."""
from .errors import EarlyExact, InvalidInput, NumericalBreakdown
from .linalg import (Svd, frobenius_norm_sq, orthonormal_basis, pseudo_inverse,
                     spectral_norm, svd, truncate_rank_k)
from .projection import ProjectionResult, project_rank_k, reconstruction_errors
from .sparsify import (WeightedSelection, dual_set_spectral,
                       dual_set_spectral_frobenius)
from .approx_svd import (RngSpec, fast_frobenius_factorization,
                         fast_spectral_factorization, gaussian_matrix,
                         power_iteration_sketch)
from .selection import (ErrorReport, Method, RelErrParams, SelectionResult,
                        adaptive_sample, assemble_bound, det_frobenius,
                        det_spectral, det_spectral_vk_only, evaluate_selection,
                        fast_frobenius, fast_spectral, norm_sampling,
                        relative_error_css, select_columns,
                        draw_columns, norm_sampling_probabilities)
from .testbeds import gen_frobenius_lb, gen_spectral_lb, gen_spectrum
