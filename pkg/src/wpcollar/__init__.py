"""Curvature asymptotics of the pinching plane over hyperbolic collars.

The package models a surface degenerating along two short geodesics by a
pair of congruent hyperbolic cylinders, solves the cylinder-to-cylinder
harmonic map problem by shooting on its first integral, inverts the
comparison operator (Delta - 2) through closed-form variation of
parameters, and assembles the Weil-Petersson sectional curvature K =
R/Pi of the plane spanned by the two pinching directions, together with
the chain upper bound on |R|.  The headline check is scaling: |K| -> 0
at least linearly in the core length, while the bound grows like l^-2
and Pi like a power at least l^-3.

Use `python -m wpcollar` for the sweep/report command line.
"""

from .errors import ConfigError, ReportParseError, SolverError
from .geometry import (
    CylinderDomain,
    RadialFunction,
    RadialGrid,
    integrate,
    make_cylinder,
    make_grid,
    metric_density,
)
from .harmonic import (
    CylinderHarmonicMap,
    EnergyDensities,
    NodedHarmonicMap,
    VariationScale,
    bochner_residual,
    energy_densities,
    first_integral_residual,
    hopf_differential,
    noded_energy,
    noded_map,
    normalized_variation_scale,
    solve_cylinder_map,
)
from .bvp import (
    BoundaryCondition,
    BvpSpec,
    HomogeneousBasis,
    OperatorCheck,
    apply_D,
    quartic_source_coefficients,
    fd_cross_solve,
    homogeneous_basis,
    operator_checks,
    solve_bvp,
)
from .curvature import (
    CouplingProfile,
    CurvatureReport,
    VariationField,
    build_fields,
    lemma7_bound,
    plane_quantities,
    schwarz_check,
    tensor_component,
    wp_inner,
)
from .sweep import (
    ParsedReport,
    ScalingFit,
    SweepConfig,
    SweepResult,
    exponent_verdicts,
    parse_report,
    run_sweep,
    write_csv,
    write_json,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "ConfigError",
    "ReportParseError",
    "SolverError",
    "CylinderDomain",
    "RadialGrid",
    "RadialFunction",
    "make_cylinder",
    "make_grid",
    "metric_density",
    "integrate",
    "CylinderHarmonicMap",
    "NodedHarmonicMap",
    "EnergyDensities",
    "VariationScale",
    "solve_cylinder_map",
    "first_integral_residual",
    "noded_map",
    "noded_energy",
    "energy_densities",
    "bochner_residual",
    "hopf_differential",
    "normalized_variation_scale",
    "HomogeneousBasis",
    "BoundaryCondition",
    "BvpSpec",
    "OperatorCheck",
    "homogeneous_basis",
    "solve_bvp",
    "apply_D",
    "fd_cross_solve",
    "quartic_source_coefficients",
    "operator_checks",
    "CouplingProfile",
    "VariationField",
    "CurvatureReport",
    "build_fields",
    "wp_inner",
    "tensor_component",
    "plane_quantities",
    "lemma7_bound",
    "schwarz_check",
    "SweepConfig",
    "ScalingFit",
    "SweepResult",
    "ParsedReport",
    "run_sweep",
    "write_csv",
    "write_json",
    "parse_report",
    "exponent_verdicts",
]
