"""Imports."""

from geom_bp.exceptions import GeomBPError
from geom_bp.instance_tools import parse_instance
from geom_bp.instance_tools import read_instance_file
from geom_bp.instance_tools import verify_solution
from geom_bp.solver_klass import GeomBP
from geom_bp.structs import Instance
from geom_bp.structs import Pattern
from geom_bp.structs import Solution
from geom_bp.structs import SolveReport
from geom_bp.structs import SolverConfig

__all__ = [
    "GeomBP",
    "GeomBPError",
    "Instance",
    "Pattern",
    "Solution",
    "SolveReport",
    "SolverConfig",
    "parse_instance",
    "read_instance_file",
    "verify_solution",
]
