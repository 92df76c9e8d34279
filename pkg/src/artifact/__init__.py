"""Exact computation with generalized Bratteli diagrams.

Heights, tail-invariant measures, measure extension from subdiagrams with
finiteness verdicts, truncated eigenpair approximation, the 0-1 edge-splitting
procedure, successor-map wandering certificates, and convergence experiments.
All core arithmetic is exact (big integers and rationals); floating point
appears only in iterative eigen solvers.
"""

from .descriptors import Seq, SeriesClass, classify_ratio_sum, classify_reciprocal_sum
from .diagram import (
    ColumnSpec,
    Diagram,
    FamilySpec,
    IncidenceLevel,
    VertexSet,
    build_family,
    check_col_sums,
    check_row_sums,
    entry,
    make_levels_diagram,
    make_odometer,
    row_window,
    telescope,
    upper_cone,
)

__version__ = "0.1.0"
