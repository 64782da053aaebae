"""Cutting planes from generalized cross-polytopes: geometry, cut generation, experiments."""

from .cuts import (
    CornerSystem,
    NonbasicCut,
    StructuralCut,
    apply_unimodular,
    build_corner,
    check_validity_pure_integer,
    generate_gxcut,
    generate_xcut,
    gmi_cut,
    to_structural,
)
from .geometry import (
    FacetNormals,
    GcpDescriptor,
    build_nested,
    build_recursive,
    gauge,
    gauge_separable,
    normals,
    pi_min_truncated,
    trivial_lift,
    trivial_lift_bruteforce,
    trivial_lift_separable,
)
from .harness import RunConfig, RunReport, beta, run_algorithm2, run_badlift, run_closure
from .instances import MipInstance, gen_graph_instance, gen_random_dense, parse_instance, write_instance
from .reference import branch_and_bound, enumerate_feasible
from .simplex import LpOutcome, StandardFormLp, resolve_with_cuts, solve, tableau_row

__version__ = "0.1.0"
