"""Finite poc sets, their dual cubings, and metric verification."""
from .dual import (
    CubeFace,
    CubingGraph,
    Point,
    Ultrafilter,
    build_cubing,
    coordinates,
    cubes_at_vertex,
    enumerate_ultrafilters,
    flip,
    is_coherent,
    min_elements,
)
from .errors import (
    AxiomViolation,
    DegenerateWall,
    GridTooFine,
    MedianiteError,
    MissingWeight,
    NotATree,
    NotMinimal,
    NotSeparated,
    SameWall,
    TooManyWalls,
    WeightMismatch,
)
from .metrics import (
    halfspace_vertices,
    interval_contains,
    is_convex_vertexset,
    l1_distance_points,
    l1_distance_vertices,
    linf_ball_vertices,
    linf_unit_distance,
    linf_weighted_distance,
    median_points,
    median_vertices,
    normal_cube_path,
    separator,
)
from .pocset import (
    PocElement,
    PocSet,
    build_from_generators,
    linear_pocset,
    nested,
    reduce_degenerate,
    transverse,
    transverse_pocset,
    tree_pocset,
    wedge_sum,
    xt_pocset,
)
from .refine import (
    RefinementMap,
    deformation_bound_check,
    lower_rational_approximation,
    pull_back_vertex,
    refine,
    subdivision_isometry_check,
)
from .reports import Report
from .verify import (
    FiniteMetric,
    ball_separation_witness,
    check_dagger,
    helly_check,
    hyperconvexity_check,
    oracle_linf_distance,
)

__version__ = "0.1.0"
