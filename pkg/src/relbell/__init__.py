"""Quantum-cognition diagnostics for multidimensional relevance judgments.

Documents live in two-dimensional real Hilbert spaces whose bases are
relevance dimensions; pairs of documents are tested for order effects,
Bell-type inequality violations and Schmidt separability.
"""

from .bell import (
    BellResult,
    Form,
    SuiteConfig,
    chsh_composite,
    chsh_probability,
    chsh_trace,
    n_settings,
    optimal_chsh_observables,
    pair_expectation_independent,
    run_suite,
)
from .composite import (
    CompositeObservable,
    CompositeState,
    SchmidtDecomposition,
    bell_state,
    composite_expectation,
    rotation_basis,
    rotational_invariance_check,
    schmidt_decompose,
    tensor_observable,
    tensor_product,
)
from .hilbert import (
    DEFAULT_DIMENSIONS,
    AmplitudePair,
    DensityMatrix,
    DocumentState,
    InputError,
    Observable,
    amplitudes_from_scores,
    basis_change,
    expectation,
    observable_from_dimension,
    order_effect,
    projection_probability,
    sequential_projection,
)
from .loglab import (
    Case,
    DocumentPair,
    JudgmentRecord,
    LogFormatError,
    QueryGroup,
    build_states,
    parse_log,
    select_case1,
    select_case2,
    select_case3,
    select_correlated,
)
from .pipeline import RunConfig, run_pipeline

__version__ = "0.1.0"
