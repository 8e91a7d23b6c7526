"""Directional variations, Crofton perimeter estimates, projection and
integral-geometric measures, and measure-theoretic boundary classification
for CSG and voxel subsets of R^2 and R^3."""

from .boundary import (
    BoundaryLabel,
    ExplicitBoundary,
    Notion,
    classify_point,
    classify_raster,
    extract_boundary_poly,
    extract_boundary_voxel,
)
from .density import (
    DensityEstimate,
    RadiusSchedule,
    ball_volume_fraction,
    density_pair,
    estimate_density,
    raster_density_field,
)
from .errors import (
    CroftonError,
    GeneralPositionError,
    InvalidInputError,
    SceneFormatError,
    ScheduleTooFineError,
    UnboundedDomainError,
)
from .geometry import (
    Ball,
    Box,
    Complement,
    Difference,
    Domain,
    HalfSpace,
    Intersection,
    Line,
    Raster,
    RasterGrid,
    Union,
    bounding_box,
    contains,
    contains_many,
    trace,
)
from .intervals import IntervalSet, canonicalize, interval_boolean, measure
from .scenes import Scene, load_scene, read_mask, read_rset, write_rset
from .variation import (
    DirectionSet,
    HitList,
    TransversalGrid,
    VariationReport,
    axis_variation_exact,
    check_finiteness,
    check_perimeter_vs_boundary_measure,
    check_variation_vs_projection,
    crofton_constant,
    crofton_perimeter,
    directional_variation,
    hits_on_line,
    ig_measure,
    projection_measure,
)

__version__ = "0.1.0"
