"""Close-enough general routing: fleets of vehicles serving required edges
and disk-neighborhood nodes with minimum total travel distance."""

from .close_enough import PointAssignment, TouringResult, optimize_points, optimize_solution
from .construction import regret_insertion
from .driver import DriverParams, RunLog, solve
from .exact_oracle import refine_route_exact, solve_exact_global
from .geometry import Disk, Point2, best_point_on_disk
from .harness import gap_percent, saving_rate
from .instance import (FleetSpec, InfeasibleInstanceError, Instance, InstanceError, RequiredEdge,
                       RequiredNode, benchmark_instance, generate_instance, load_instance,
                       parse_instance, save_instance)
from .neighborhoods import VNDParams, vnd
from .perturbation import PerturbationConfig, perturb
from .plotting import plot_solution
from .solution import Solution, TaskRef, edge_task, node_task, total_distance, validate, validate_points

__version__ = "0.1.0"

__all__ = [
    "PointAssignment", "TouringResult", "optimize_points", "optimize_solution",
    "regret_insertion", "DriverParams", "RunLog", "solve",
    "refine_route_exact", "solve_exact_global",
    "Disk", "Point2", "best_point_on_disk", "gap_percent", "saving_rate",
    "FleetSpec", "InfeasibleInstanceError", "Instance", "InstanceError", "RequiredEdge",
    "RequiredNode", "benchmark_instance", "generate_instance", "load_instance", "parse_instance",
    "save_instance", "VNDParams", "vnd", "PerturbationConfig", "perturb", "plot_solution",
    "Solution", "TaskRef", "edge_task", "node_task", "total_distance", "validate", "validate_points",
]
