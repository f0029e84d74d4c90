"""Least-squares moment matching for SISO LTI systems."""

from .analysis import (ErrorSystem, SteadyStateReport, relative_error_response, rms_gain_bound, rms_periodic,
                       simulate_interconnection, steady_state_row)
from .bench import FSSConfig, BENCH_FREQUENCIES, build_fss, run_benchmark_experiment
from .generator import (CanonicalTransform, InterpolationSpec, SignalGenerator, build_generator, build_transform,
                        check_excitable)
from .moments import (MomentVector, ls_index, moment_oracle, moments, moments_via_sylvester, signature_for,
                      verify_norm_identity)
from .reduction import (ReductionParameters, check_admissible, dominant_eigenvalues, dominant_invariant_basis,
                        dominant_parameters, full_order_family, injection_basis, ls_family, place_output_injection,
                        weighted_pinv)
from .statespace import (FrequencyResponse, ReducedModel, StateSpace, check_minimal, frequency_response, is_hurwitz,
                         transfer_eval)
from .sylvester import SylvesterSolution, solve_sylvester, spectra_disjoint

__version__ = "0.1.0"
