"""Periods, elliptic logarithms and the Betti map of an elliptic family."""

from .ellog import (
    BettiPoint,
    betti_lift,
    betti_map,
    carlson_rf,
    distance_to_lattice,
    elliptic_log,
    elliptic_log_mp,
    lattice_coordinates,
    torus_distance,
)
from .periods import (
    ContinuationError,
    MonodromyMatrix,
    PeriodFrame,
    agm,
    betti_transition,
    circle_loop,
    cubic_roots,
    frame_transition,
    keyhole_loop,
    lattice_basis,
    monodromy,
    periods,
)
from .rank import (
    betti_jacobian,
    degeneracy_rank,
    fiber_arc,
    lift_complex,
    section_curve,
    transversality_delta0,
)

__all__ = [
    "BettiPoint",
    "ContinuationError",
    "MonodromyMatrix",
    "PeriodFrame",
    "agm",
    "betti_jacobian",
    "betti_lift",
    "betti_map",
    "betti_transition",
    "carlson_rf",
    "circle_loop",
    "cubic_roots",
    "degeneracy_rank",
    "distance_to_lattice",
    "elliptic_log",
    "elliptic_log_mp",
    "fiber_arc",
    "frame_transition",
    "keyhole_loop",
    "lattice_basis",
    "lattice_coordinates",
    "lift_complex",
    "monodromy",
    "periods",
    "section_curve",
    "torus_distance",
    "transversality_delta0",
]
