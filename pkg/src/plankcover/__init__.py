"""Non-dissective translative coverings of the unit ball in R^3 by planks."""
from .convex import (
    ConvergenceReport,
    distance_to_region,
    inner_radius,
    is_empty,
    nearest_points,
    project_region,
    support_value,
)
from .engine import EngineConfig, place_next, run_cover, verify_certificate_static
from .geometry import (
    ConvexRegion,
    CoverCertificate,
    EmptyRegion,
    GeometryError,
    Halfspace,
    Instance,
    NonConvergence,
    PlacedPlank,
    Plank,
    StepRecord,
    UnitVector,
    angular_distance,
    region_contains,
)
from .instances import AdversarialParams, InfeasibleParams, gen_adversarial, gen_parallel, gen_random
from .measure import (
    ParallelBodyTracker,
    VolumeEstimate,
    convexity_probe,
    mc_parallel_volume,
    mc_volume,
    shadow_plank,
    verify_cover,
)
from .ordering import AngleGraph, Chunk, build_angle_graph, compute_alpha, extract_order

__version__ = "0.1.0"
