"""Curvature flows of convex axisymmetric hypersurfaces in the round sphere.

Thin re-export of the compiled core: curvature-function calculus, graph
geometry, the contracting/expanding integrators, Gauss-map polar duality,
and per-snapshot diagnostics.
"""

from ._core import (
    AxiGrid,
    ConfigError,
    ConvexityLoss,
    DualPair,
    FunctionSpec,
    GraphFunction,
    HemisphereExit,
    IntegratorFailure,
    check_classK_bound,
    check_dual_curvatures,
    esym_concavity_residual,
    check_strict_concavity,
    dual_run,
    evaluate,
    perturbed_sphere,
    polar_dual,
    radii_estimates,
    read_graph_file,
    run,
    shape_operator,
    snapshot_diagnostics,
    sphere,
    spherical_theta,
    spherical_tstar,
    support_bracket,
    tracefree_identity,
    write_graph_file,
)

__all__ = [
    "AxiGrid",
    "ConfigError",
    "ConvexityLoss",
    "DualPair",
    "FunctionSpec",
    "GraphFunction",
    "HemisphereExit",
    "IntegratorFailure",
    "check_classK_bound",
    "check_dual_curvatures",
    "esym_concavity_residual",
    "check_strict_concavity",
    "dual_run",
    "evaluate",
    "perturbed_sphere",
    "polar_dual",
    "radii_estimates",
    "read_graph_file",
    "run",
    "shape_operator",
    "snapshot_diagnostics",
    "sphere",
    "spherical_theta",
    "spherical_tstar",
    "support_bracket",
    "tracefree_identity",
    "write_graph_file",
]
