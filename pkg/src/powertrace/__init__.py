"""powertrace: desk-scale simulation and verification of quantum
trace-power estimation.

The package estimates Tr(rho^k O) under purified access by combining
Chebyshev approximations of the power function, block-encoding algebra,
an exact eigenvalue-transform stand-in for the singular-value transform,
and a Hadamard-test + amplitude-estimation readout; a generalized swap
test provides the sample-access baseline, and lower-bound constructions
make the sample-vs-query separation runnable. Every estimate ships with
the exact dense-matrix oracle value for self-validation.
"""

from .errors import (
    ConstructionError,
    ContractError,
    NumericalError,
    PowertraceError,
    ResourceError,
    UnreliableEstimateError,
    ValidationError,
)
from .linalg import (
    DensityMatrix,
    EighResult,
    Observable,
    eigh,
    fidelity,
    get_qubit_cap,
    kron,
    matrix_from_json,
    matrix_to_json,
    op_norm,
    partial_trace,
    schatten1,
    set_qubit_cap,
    trace_distance,
    trace_power_obs_oracle,
)
from .chebyshev import (
    ChebyshevPoly,
    TruncationReport,
    clenshaw_eval,
    degree_lower_bound_solve,
    minimal_empirical_degree,
    power_expansion,
    required_degree,
    sup_error_scan,
    truncate,
)
from .blockenc import (
    BlockEncoding,
    PurifiedState,
    be_product,
    density_block_encoding,
    halmos_dilate,
    observable_block_encoding,
    purify,
    verify_block_encoding,
)
from .qsvt import QueryLedger, QsvtRequest, apply_poly, power_block_encoding, power_times_obs
from .estimator import (
    AE_SUCCESS_PROB,
    AeOutcome,
    EntropyEstimate,
    EstimationReport,
    HadamardTestResult,
    VdRatioResult,
    amplitude_estimate,
    estimate_trace_power,
    hadamard_test_prob,
    renyi_entropy,
    tsallis_entropy,
    vd_ratio,
)
from .bounds import (
    BqpInstance,
    DiscriminationInstance,
    HelstromTable,
    HybridBoundTable,
    SwapTestResult,
    bqp_instance,
    cyclic_permutation,
    discrimination_instance,
    helstrom_experiment,
    hybrid_bound_demo,
    lecam_construction,
    swap_test_estimate,
    swap_test_moments,
)
from .instances import InstanceSpec, make_observable, make_state, pauli_string, random_density, random_unitary

__version__ = "0.1.0"

__all__ = [
    "AE_SUCCESS_PROB",
    "AeOutcome",
    "BlockEncoding",
    "BqpInstance",
    "ChebyshevPoly",
    "ConstructionError",
    "ContractError",
    "DensityMatrix",
    "DiscriminationInstance",
    "EighResult",
    "EntropyEstimate",
    "EstimationReport",
    "HadamardTestResult",
    "HelstromTable",
    "HybridBoundTable",
    "InstanceSpec",
    "NumericalError",
    "Observable",
    "PowertraceError",
    "PurifiedState",
    "QsvtRequest",
    "QueryLedger",
    "ResourceError",
    "SwapTestResult",
    "TruncationReport",
    "UnreliableEstimateError",
    "ValidationError",
    "VdRatioResult",
    "amplitude_estimate",
    "apply_poly",
    "be_product",
    "bqp_instance",
    "clenshaw_eval",
    "cyclic_permutation",
    "degree_lower_bound_solve",
    "density_block_encoding",
    "discrimination_instance",
    "eigh",
    "estimate_trace_power",
    "fidelity",
    "get_qubit_cap",
    "hadamard_test_prob",
    "halmos_dilate",
    "helstrom_experiment",
    "hybrid_bound_demo",
    "kron",
    "lecam_construction",
    "make_observable",
    "make_state",
    "matrix_from_json",
    "matrix_to_json",
    "minimal_empirical_degree",
    "observable_block_encoding",
    "op_norm",
    "partial_trace",
    "pauli_string",
    "power_block_encoding",
    "power_expansion",
    "power_times_obs",
    "purify",
    "random_density",
    "random_unitary",
    "renyi_entropy",
    "required_degree",
    "schatten1",
    "set_qubit_cap",
    "sup_error_scan",
    "swap_test_estimate",
    "swap_test_moments",
    "trace_distance",
    "trace_power_obs_oracle",
    "truncate",
    "tsallis_entropy",
    "vd_ratio",
    "verify_block_encoding",
]
