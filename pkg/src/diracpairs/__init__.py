"""diracpairs: a numerical laboratory for Fredholm pairs of Dirac boundary conditions.

The package decides Fredholmness and computes indices of boundary-condition
pairs for the Dirac operator on product cylinders over the circle by exact
finite spectral truncation, and cross-checks the engine against closed-form
spectral index formulas.
"""

from ._linalg import RankPolicy
from .conditions import (
    Explicit,
    FiniteMod,
    FullSpace,
    GraphDecomposition,
    GraphForm,
    GraphMap,
    Local,
    ProjectorMatrix,
    Side,
    SpectralCut,
    ZeroSpace,
    chirality_condition,
    complement,
    decompose_local_to_graph,
    graph_is_compact,
    graph_norm,
    materialize,
)
from .errors import (
    ConventionViolation,
    DiracPairsError,
    IllConditioned,
    InternalInconsistency,
    NonProductStructure,
    NotConverged,
    NotGraphDecomposable,
    ScenarioError,
    StepTooLarge,
    UnsupportedModel,
    WindowTooSmall,
)
from .evolution import (
    ConstantProfile,
    EvolutionMatrix,
    LinearProfile,
    TableProfile,
    q_synthetic,
    q_ultrastatic,
    q_warped,
)
from .formulas import (
    IndexPrediction,
    anti_aps_index,
    aps_index_product,
    eta_analytic,
    eta_numeric,
    finite_dim_index,
    generalized_aps_index,
    graph_form_index,
)
from .fredholm import (
    FredholmReport,
    PairDiagnostics,
    Verdict,
    check_pair_algebra,
    dual_route_diagnostics,
    evolved_pair_diagnostics,
    fredholm_verdict,
    pair_diagnostics,
    pair_diagnostics_oracle,
    stabilization_verdict,
)
from .scenarios import (
    Expected,
    Scenario,
    SyntheticSpec,
    Tolerances,
    UltrastaticSpec,
    WarpedSpec,
    compute_formula,
    load_scenario_file,
    parse_scenario,
    run_scenario,
)
from .spectral import (
    CircleDiracModel,
    ModeIndex,
    SyntheticSpectrum,
    TruncationWindow,
    ambient_dimension,
    eigenvalue,
    enumerate_modes,
    involution_matrix,
    kernel_dimension,
    operator_matrix,
    zero_modes,
)

__version__ = "0.1.0"
