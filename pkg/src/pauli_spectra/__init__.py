"""Desk-scale spectral toolkit for 2D Dirichlet magnetic Schrödinger and Pauli operators."""

__version__ = "0.1.0"

from .fields import (  # noqa: F401
    Domain,
    FieldError,
    QuadratureSpec,
    ScalarField2D,
    apriori_count_bound,
    constant_field,
    flux,
    luxemburg_norm,
    oscillation,
)
from .gauge import (
    GaugeError,
    LocalConstantGauge,
    ScalarPotentialSolution,
    VectorPotential,
    gauge_transform,
    line_integral_gauge,
    local_constant_gauge,
    solve_scalar_potential,
    symmetric_gauge,
)
from .discretize import (  # noqa: F401
    DiscretizeError,
    GridInfo,
    SparseHermitianOperator,
    assemble_pauli,
    assemble_schrodinger,
    export_matrix_market,
    magnetic_length_spacing,
    restrict,
)
from .eig import (  # noqa: F401
    CountResult,
    EigError,
    count_below,
    lowest_eigenpairs,
)
from .landau import (  # noqa: F401
    LandauDensityQuery,
    LandauThresholdError,
    const_square_bracket,
    mu_cdv,
    nu,
    nu_value,
    semiclassical_integral,
)
from .tiling import (  # noqa: F401
    STEP_SLOPE_BOUND,
    Tiling,
    TilingError,
    boundary_layer,
    bracket_counts,
    build_tiling,
    k_schedule,
    partition_of_unity,
    schedule_products,
    smooth_step,
    smooth_step_slope,
)
from .zeromode import (  # noqa: F401
    CircleSpectralData,
    SpinorSamples,
    TestSpace,
    ZeroModeError,
    assemble_test_function,
    azm_count,
    beta_f,
    build_test_space,
    circle_data,
    disc_rescale,
    fit_tail_decay,
    hardy_project,
    inequality_suite,
    rayleigh_certify,
    t_form,
    tail_sums,
)
from .harness import (  # noqa: F401
    DiscPack,
    HarnessError,
    ScanConfig,
    ScanTable,
    azm_scan,
    domain_from_spec,
    export,
    field_from_spec,
    gauge_invariance_test,
    greedy_disc_packing,
    read_table,
    weyl_scan,
)
