"""torwave: wavelet paraproducts, singular integrals, Hardy/BMO estimators and
commutator decompositions on the periodic torus, with a verification harness."""

from .core import (DyadicCube, SampledFunction, constant, distance_field, inner,
                   sup_norm, torus_distance, zeros)
from .errors import (CancellationError, ConfigurationError, ContractError,
                     DegeneracyError, DomainError, FileFormatError,
                     HypothesisError, ResolutionError, ShapeError, TorwaveError,
                     UsageError)
from .wavelets import (CoefficientTree, PsiAtomCheck, WaveletBasis, analyze,
                       build_basis, default_coarse_level, min_coarse_level,
                       projection_stack, sampled_wavelet, synthesize,
                       validate_psi_atom, wavelet_square_function)
from .paraproducts import (ProductDecomposition, diagonal_coefficient_sum,
                           paraproducts, s_operator, shift_invariance_check)
from .operators import (MultiplierOperator, PdeltaEnvelope, WaveletMatrixOperator,
                        almost_diagonal_envelope_fit, apply_multiplier_operator,
                        fractional_integral_operator, hilbert_operator,
                        identity_operator, k_class_ratio, operator_from_config,
                        p_delta, pdelta_composition_check, riesz_operator,
                        wavelet_matrix)
from .sublinear import (GrandMaximal, LusinArea, grand_maximal, lusin_area,
                        lusin_area_integral, maximal_function)
from .norms import (AtomCheck, NormReport, hardy_norm, hardy_square_parts,
                    llog_quasinorm, lp_norm, norm_report, oscillation_norm,
                    validate_atom, weak_lp_quasinorm)
from .commutators import (AtomicDecomposition, CommutatorDecomposition,
                          FractionalReport, H1bReport, SubbilinearEnvelope,
                          antisymmetric_paraproduct, atomic_decompose,
                          bilinear_decomposition, commutator_apply,
                          fractional_commutator_decomposition,
                          h1b_characterizations, make_qb_atom, molecule_norm,
                          subbilinear_envelope)
from .samples import (derive_rng, random_bmo, random_classical_atom, random_cube,
                      random_function, random_h1_tree, random_psi_atom,
                      random_tree, truncated_log, two_sided_atom)
from .hlf import read_hlf, write_hlf
from .harness import (CSV_SCHEMAS, SUITES, ExperimentConfig, ExperimentReport,
                      emit_report, parse_report, run_suite)

__version__ = "0.1.0"
