"""Hitting sets, packings and colourings for families of rotated squares."""

from .errors import *  # noqa: F401,F403
from .geometry import (  # noqa: F401
    Point,
    Square,
    SquareFamily,
    Tolerance,
    boundary_intersections,
    contains_point,
    dist_point_square,
    family,
    inner_outer_disk,
    squares_cross,
    squares_intersect,
    vertices,
)

__version__ = "0.1.0"
