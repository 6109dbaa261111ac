"""Geodesic combings of hyperbolic groups at desk scale.

Word-acceptor digraphs and their Perron-Frobenius/Markov structure, combable
functions and counting quasimorphisms, and the central limit statistics
(drift E, deviation sigma) of their values on long geodesics.
"""

__version__ = "0.1.0"

from .digraph import (ComponentDecomposition, DigraphError, DirectedPath,
                      IncomingEdgeToInitial, InsufficientGrowth, LabeledDigraph,
                      NondeterministicLabel, NotAccepted, Rejection,
                      SemisimplicityReport, UnreachableVertex, accept,
                      build_digraph, check_almost_semisimple, components,
                      count_paths, growth_counts, is_accepted, iter_words,
                      load_digraph, save_digraph)
from .groups import (Ball, CyclicGroup, DirectProduct, FreeGroup,
                     FreeProductCyclic, GeneratingSet, GroupOracle,
                     RadiusExceeded, UnknownLetter, WrongKind, oracle_from_dict)
from .combing import (Combing, CombingValidation, ConeDepthExceeded,
                      OutsideVerifiedRadius, combing_from_dict, combing_to_dict,
                      lex_first_combing, reduced_word_combing, validate_combing)
from .combable import (CombableFunction, LipschitzReport, SubdivisionReport,
                       SynthesisFailure, check_lipschitz, check_subdivision,
                       function_from_dict, function_to_dict, synthesize_dphi,
                       verify_conformance, word_length_function)
from .quasimorphism import (BigCountingQuasimorphism, CountingQuasimorphism,
                            DefectReport, GensetQuasimorphism, HolderReport,
                            Pattern, SearchBudgetExceeded, big_count,
                            counting_function, counting_qm, counting_values,
                            defect_estimate, genset_qm, greedy_count,
                            gromov_product, holder_diagnostic, make_pattern,
                            max_disjoint_count, max_disjoint_multi)
from .spectral import (ConeWeight, DegenerateEigenstructure, PoincareReport,
                       SpectralData, SupportVerdict, TransitionMatrix, analyze,
                       cesaro_projection, chain, cone_weight, perron,
                       poincare_diagnostics, project_ell, project_rho,
                       support_analysis, transition_matrix)
from .cltstats import (CltReport, ComponentStats, DeadEnd, EmpiricalCltReport,
                       GensetComparison, MismatchedDigraph, MomentReport,
                       SampleBatch, SingularPoisson, TooShort,
                       TypicalityProfile, compare_gensets, drift_variance,
                       empirical_clt, moment_oracle, sample, sample_phi_sums,
                       sample_ray, typicality_profile)
from .fixtures import (DIGRAPH_FIXTURES, GROUP_FIXTURES, Fixture,
                       UnknownFixture, digraph_fixture, fixture,
                       random_digraph, s2_length)
