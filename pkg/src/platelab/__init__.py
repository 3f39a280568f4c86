"""Size estimates for elastic inclusions in thin anisotropic plates.

Measure the boundary work of a couple field on a plate with and
without an inclusion; the work gap brackets the inclusion's area.
This package builds the geometry, checks the tensor hypotheses,
solves the bending problems with a nonconforming plate element,
and turns the solved pairs into certified and calibrated two-sided
area estimates, with empirical unique-continuation scans backing
the constants.
"""

from .backend import BACKEND, get_kernels
from .chains import (
    Cone,
    DiscChain,
    GeometricConstants,
    build_chain,
    cone_contains,
    final_radius,
    geometric_constants,
    k_of_rho,
)
from .config import ExperimentConfig, config_from_dict, dump_config, load_config
from .couple import (
    CoupleField,
    couple_from_expressions,
    pure_bending_couple,
    trig_couple,
)
from .domains import (
    CircleCurve,
    DiscRegion,
    EllipseCurve,
    EmptyRegion,
    Inclusion,
    PlateDomain,
    PolygonRegion,
    RoundedPolygonCurve,
    UnionRegion,
    check_fatness,
    check_standoff,
    connectivity_scan,
    cover_side,
    cover_with_squares,
    disc_domain,
    ellipse_domain,
    estimate_graph_constant,
    require_disc_inside,
    rounded_polygon_domain,
)
from .errors import (
    ConfigError,
    DegenerateFamily,
    DegenerateLeadingCoefficient,
    DegenerateScan,
    EmptyCover,
    EmptyInterior,
    GeometryViolation,
    IncompatibleLoad,
    InfeasibleFit,
    InvalidJump,
    MeshFailure,
    MissingCalibration,
    NonElliptic,
    PlatelabError,
    RegionOutsideDomain,
    RhoTooLarge,
    SolveFailure,
    VertexQuery,
    WrongSign,
    ZeroSolution,
    ZeroWorkGap,
)
from .estimates import (
    Calibration,
    EnergyBudget,
    ExperimentRecord,
    LemmaReport,
    SignCalibration,
    UpperCertificate,
    area_lower_certificate,
    area_upper_certificate,
    bracket_hit_rate,
    budget_from_solutions,
    calibrate_constants,
    record_from_budget,
    verify_energy_lemma,
    xi_bounds,
)
from .experiments import (
    build_experiment,
    campaign_experiments,
    random_compatible_couple,
    run_campaign,
    run_experiment,
    solve_pair,
)
from .fem import DiscreteSolution, assemble, build_basis, load_vector, solve
from .fields import ConstantField, ExpressionField, as_field, parse_expression
from .meshing import Mesh, generate_mesh, refine
from .smallness import (
    ChainBudget,
    FrequencyScan,
    LpsFit,
    LpsScan,
    ThreeSpheresFit,
    ThreeSpheresSample,
    boundary_data_bound_check,
    chain_budget,
    frequency_scan,
    hex_lattice,
    large_rho_branch,
    lps_fit,
    lps_scan,
    three_spheres_fit,
    three_spheres_sample,
)
from .tensors import (
    DichotomyReport,
    JumpReport,
    PlateTensorField,
    TensorField,
    classify_dichotomy,
    classify_jump,
    dichotomy_value,
    ellipticity_gamma,
    regularity_M,
    symbol_matrix,
    tensor_leq,
    voigt_embed,
)

__version__ = "0.1.0"
