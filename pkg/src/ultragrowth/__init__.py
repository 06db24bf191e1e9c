"""Log-domain toolkit for weight sequences, weight functions and weight matrices.

Computes associated weight functions and their inverses, Young conjugates,
regularity-condition checks, growth-relation decision procedures with
witnesses, an oscillating-sequence construction, and sequence-space norms,
all in natural-log domain with tri-state finite-window verdicts.
"""

from .config import DEFAULT_CONFIG, RunConfig
from .verdicts import Status, Verdict, combine
from .seqcore import (
    Block,
    BlockSequence,
    LogSequence,
    QuotientView,
    SEQUENCE_CONDITIONS,
    check_LC,
    check_sequence_condition,
    eval_block,
    make_gevrey,
    quotients,
)
from .assocfn import (
    WEIGHT_CONDITIONS,
    WeightFn,
    associated,
    check_weight_condition,
    classify_triviality,
    omega_of_sequence,
    power,
    sampled_weight,
    sequence_of_omega,
    shifted_log,
    trunc_log,
)
from .conjugate import ConjugateTable, conjugate_table, matrix_of_weight, young_conjugate
from .matrices import (
    MATRIX_CONDITIONS,
    WeightMatrix,
    check_matrix_condition,
    constant_matrix,
    matrix_nqa,
    relate_matrices,
)
from .relations import (
    RelationReport,
    crosscheck_transfer,
    oscillation_probe,
    seq_relate,
    wf_relate,
)
from .oscillator import (
    OscillatorPlan,
    OscillatorResult,
    build,
    critical_case,
    plan,
    validate_target,
    verify,
)
from .lambdanorms import (
    CoefficientFamily,
    NormValue,
    empirical_domination,
    explicit_coefficients,
    kronecker,
    lambda_norm,
    matrix_norm,
    weight_witness,
)
from .suites import SUITES, run_suite

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_CONFIG",
    "RunConfig",
    "Status",
    "Verdict",
    "combine",
    "Block",
    "BlockSequence",
    "LogSequence",
    "QuotientView",
    "SEQUENCE_CONDITIONS",
    "check_LC",
    "check_sequence_condition",
    "eval_block",
    "make_gevrey",
    "quotients",
    "WEIGHT_CONDITIONS",
    "WeightFn",
    "associated",
    "check_weight_condition",
    "classify_triviality",
    "omega_of_sequence",
    "power",
    "sampled_weight",
    "sequence_of_omega",
    "shifted_log",
    "trunc_log",
    "ConjugateTable",
    "conjugate_table",
    "matrix_of_weight",
    "young_conjugate",
    "MATRIX_CONDITIONS",
    "WeightMatrix",
    "check_matrix_condition",
    "constant_matrix",
    "matrix_nqa",
    "relate_matrices",
    "RelationReport",
    "crosscheck_transfer",
    "oscillation_probe",
    "seq_relate",
    "wf_relate",
    "OscillatorPlan",
    "OscillatorResult",
    "build",
    "critical_case",
    "plan",
    "validate_target",
    "verify",
    "CoefficientFamily",
    "NormValue",
    "empirical_domination",
    "explicit_coefficients",
    "kronecker",
    "lambda_norm",
    "matrix_norm",
    "weight_witness",
    "SUITES",
    "run_suite",
    "__version__",
]
