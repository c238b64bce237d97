"""Measure-free probability on finite Stone spaces.

Vector-lattice elements are extended-real functions on a finite set of atoms.
On such a space the Daniell functional calculus, conditional expectations,
discrete stopping times and stopped processes all become exactly checkable
pointwise objects.
"""

from .errors import *  # noqa: F401,F403
from .lattice import (
    BandProjection,
    ClopenSet,
    LatticeElement,
    StoneSpace,
    apply_projection,
    band_projection_of,
    finite_infinite_decomposition,
    monotone_sup,
    sup_family,
    sup_is_infinite,
)

from .probability import (
    AdaptedProcess,
    AffineMap,
    ConditionalExpectation,
    Filtration,
    ProcessKind,
    apply_ce,
    classify_process,
    convex_image_submartingale,
    doob_martingale,
    jensen,
)
from .stopping import (
    StoppingTime,
    debut_roundtrip,
    from_projections,
    hitting_time,
    increasing_process_identities,
    st_algebra,
    st_extremum,
    stopped_element,
    stopped_process,
    time_change,
    to_projections,
)

__version__ = "0.1.0"
