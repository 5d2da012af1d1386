"""Quantum-correlation engine for system-environment universes.

Computes mutual information, measurement-maximized classical correlations,
quantum discord, entanglement of formation, conditional mutual information,
and information deficits, with an exact O(N) path for two-branch universes
and executable checkers for the correlation bounds they obey.
"""

from ._kernels import BACKEND as kernel_backend
from .branching import (
    BranchingState,
    fragment_overlap,
    make_branching,
    marginal_entropy,
    measured_joint_distribution,
    to_dense,
)
from .bounds import (
    BoundCheck,
    FragmentTable,
    PlateauScan,
    WitnessResult,
    check_average_discord_bound,
    check_classical_implies_low_discord,
    check_discord_pair_bound,
    check_discord_plateau,
    check_entanglement_bound,
    check_pointer_consensus,
    check_redundancy_bound,
    cmi_objectivity_witness,
    partial_information_plot,
    scan_classical_plateau,
)
from .correlations import (
    CorrelationReport,
    DeficitReport,
    OptimizerConfig,
    ProjectiveMeasurement,
    classical_correlations,
    classical_correlations_grid_oracle,
    concurrence,
    conditional_mutual_information,
    deficit_report,
    discord,
    eof_koashi_winter,
    eof_two_qubit,
    fragment_report,
    information_deficit,
    post_measurement_state,
)
from .models import (
    ClosedFormValues,
    CMaybeParams,
    closed_forms,
    cmaybe_gate,
    cmaybe_universe,
    cmaybe_universe_dense,
    ghz,
    haar_random_pure,
    random_branching,
)
from .qstate import (
    DensityMatrix,
    FragmentSpec,
    PureState,
    apply_unitary,
    binary_entropy,
    mutual_information,
    overlap_entropy,
    partial_trace,
    schmidt_entropy,
    tensor_product,
    von_neumann_entropy,
)

__version__ = "0.1.0"
