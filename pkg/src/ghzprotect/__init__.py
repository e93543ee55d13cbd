"""Weak-measurement feed-forward protection of GHZ states under amplitude damping."""

from ghzprotect.closedform import (
    class_probability,
    eta_opt_probability,
    fid_total,
    metrics_closedform,
    prob_total,
    qfi_total,
)
from ghzprotect.dense import (
    DENSE_MAX_QUBITS,
    BranchRun,
    DenseState,
    aggregate_metrics_dense,
    do_nothing_baseline,
    fidelity_pure,
    ghz_state,
    ghz_vector,
    phase_imprint,
    qfi_general,
    run_all_branches,
    run_protocol_average,
    run_protocol_branch,
)
from ghzprotect.operators import (
    adc_basis_action,
    adc_kraus,
    decay_probability,
    flip_op,
    rotation_op,
    weak_meas_op,
)
from ghzprotect.optimize import (
    UNIT_PROBABILITY,
    ConstraintInfeasibleError,
    GridSpec,
    Objective,
    OptResult,
    ParetoPoint,
    ParetoScanResult,
    maximize_fidelity_at_unit_probability,
    maximize_metric,
    pareto_scan,
    sweep_r,
)
from ghzprotect.params import (
    BranchClass,
    Convention,
    DegeneracyError,
    Engine,
    FormulaVariant,
    MetricsRow,
    ProtocolParams,
    branch_classes,
    validate_params,
)
from ghzprotect.structured import (
    BranchElements,
    aggregate_complex,
    aggregate_metrics,
    branch_elements,
    branch_qfi,
    metrics_grid,
    state_export,
)
from ghzprotect.validate import CheckResult, format_report, run_validation

__version__ = "0.1.0"

__all__ = [
    "BranchClass",
    "BranchElements",
    "BranchRun",
    "CheckResult",
    "ConstraintInfeasibleError",
    "Convention",
    "DegeneracyError",
    "DenseState",
    "DENSE_MAX_QUBITS",
    "Engine",
    "FormulaVariant",
    "GridSpec",
    "MetricsRow",
    "Objective",
    "OptResult",
    "ParetoPoint",
    "ParetoScanResult",
    "ProtocolParams",
    "UNIT_PROBABILITY",
    "adc_basis_action",
    "adc_kraus",
    "aggregate_complex",
    "aggregate_metrics",
    "aggregate_metrics_dense",
    "branch_classes",
    "branch_elements",
    "branch_qfi",
    "class_probability",
    "decay_probability",
    "do_nothing_baseline",
    "eta_opt_probability",
    "fid_total",
    "fidelity_pure",
    "flip_op",
    "format_report",
    "ghz_state",
    "ghz_vector",
    "maximize_fidelity_at_unit_probability",
    "maximize_metric",
    "metrics_closedform",
    "metrics_grid",
    "pareto_scan",
    "phase_imprint",
    "prob_total",
    "qfi_general",
    "qfi_total",
    "run_all_branches",
    "run_protocol_average",
    "run_protocol_branch",
    "run_validation",
    "state_export",
    "sweep_r",
    "validate_params",
    "weak_meas_op",
    "__version__",
]
