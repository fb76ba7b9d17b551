"""Full-chord sets in planar convex bodies and their Buffon discrepancy.

Build chord sets by low-discrepancy measure transport (or baselines),
evaluate their line-intersection discrepancy against the Crofton target
exactly, and probe the growth of the error with chord length.
"""

from .geometry import (
    Chord,
    ChordSet,
    ConvexBody,
    ConvexPolygon,
    DegenerateChordError,
    Disk,
    ExceptionalConfiguration,
    GeometryError,
    chord_from_params,
    chords_cross,
    make_disk,
    make_polygon,
)
from .chordmeasure import (
    EndpointMeasure,
    InternalConsistencyError,
    KoksmaCheck,
    ParamRect,
    VariationBudget,
    chord_length_grid,
    hk_variation,
    koksma_gap_check,
)
from .lowdisc import (
    PointSet2D,
    RectDiscReport,
    RectWitness,
    ld_sequence_2d,
    rect_discrepancy,
    transport_to_measure,
)

__version__ = "0.1.0"
