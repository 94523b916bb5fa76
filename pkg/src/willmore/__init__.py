"""Willmore flow of closed planar curves.

Two discretizations are provided: a Lagrangian scheme acting on polygon
nodes (:mod:`willmore.lagrangian`) and a level-set scheme on uniform grids
(:mod:`willmore.levelset`).
"""

from .curve import DiscreteCurve, curve_from_nodes, elastic_energy, init_from_parametric
from .lagrangian import LagrangianConfig, evolve as evolve_lagrangian, step as lagrangian_step
from .linsolve import SolverError
from .shapes import SHAPE_IDS, make_shape

__version__ = "0.1.0"

__all__ = [
    "DiscreteCurve",
    "LagrangianConfig",
    "SHAPE_IDS",
    "SolverError",
    "curve_from_nodes",
    "elastic_energy",
    "evolve_lagrangian",
    "init_from_parametric",
    "lagrangian_step",
    "make_shape",
]
