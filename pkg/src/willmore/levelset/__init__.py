"""Level-set formulation on uniform grids."""

from .contour import extract_zero_set, inside_components, is_closed, signed_area
from .field import LevelSetField, field_from_sdf, grid_for_box, read_field, write_field
from .redistance import EmptyInterfaceError, redistance, unsigned_distance
from .scheme import (
    LevelSetConfig,
    LevelSetStats,
    assemble_semi_implicit_system,
    evolve,
    explicit_rhs,
    extrapolate_boundary,
    phase_field_init,
    step_explicit,
    step_semi_implicit,
    willmore_operator,
)
from .stencil import StencilQuantities, averaged_gradients, compute_w

__all__ = [
    "EmptyInterfaceError",
    "LevelSetConfig",
    "LevelSetField",
    "LevelSetStats",
    "StencilQuantities",
    "assemble_semi_implicit_system",
    "averaged_gradients",
    "compute_w",
    "evolve",
    "explicit_rhs",
    "extract_zero_set",
    "extrapolate_boundary",
    "field_from_sdf",
    "grid_for_box",
    "inside_components",
    "is_closed",
    "phase_field_init",
    "read_field",
    "redistance",
    "signed_area",
    "step_explicit",
    "step_semi_implicit",
    "unsigned_distance",
    "willmore_operator",
    "write_field",
]
