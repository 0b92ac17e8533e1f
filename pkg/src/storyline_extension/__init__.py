"""Insert missing characters into a fixed storyline layout under a per-character crossing budget."""
from .dp import (
    DPState,
    Layer,
    Placement,
    SolveResult,
    dominance_prune,
    enumerate_placements,
    min_chi,
    reconstruct_witness,
    solve,
    transition,
)
from .model import (
    ExtensionProblem,
    InvalidInstanceError,
    InvalidLayoutError,
    InvalidProblemError,
    Layout,
    Lifespan,
    Meeting,
    Stats,
    StorylineInstance,
    Violation,
    active_set,
    crossings_per_character,
    derive_lifespans,
    induced_sub_storyline,
    local_crossing_number,
    stats,
    strip_crossings,
    validate_extension_problem,
    validate_instance,
    validate_layout,
)
from .oracle import EubpInstance, OracleSizeError, brute_force_eubp, brute_force_solve, eubp_by_coloring
from .reduction import build_reduction, reduce

__version__ = "0.1.0"
