"""conelab: a numerical laboratory for cone multipliers, square
functions, weighted norms, kernel decompositions, and trace-constant
estimation on periodic grids."""

__version__ = "0.1.0"

from .grid import (Grid, Field, Spectrum, make_grid, forward_transform,
                   inverse_transform, synthesize_mode, eval_mask, apply_mask)
from .weights import WeightParams, weighted_norm, lp_norm
from .errors import ResolutionError, GeometryError

__all__ = [
    "Grid", "Field", "Spectrum", "make_grid", "forward_transform",
    "inverse_transform", "synthesize_mode", "eval_mask", "apply_mask",
    "WeightParams", "weighted_norm", "lp_norm",
    "ResolutionError", "GeometryError",
    "__version__",
]
