"""Lexicographic technician routing: maximise intervention time, then minimise cost."""
from .driver import METHODS, RunConfig, RunStats, solve, solve_sequential, solve_weighted
from .instance_io import (CATEGORIES, GeneratorConfig, generate_random, load_instance,
                          make_category_instance, parse_instance, save_instance, standardize)
from .model import (Column, Instance, Intervention, Interval, LexSolution, Node, Vehicle,
                    compute_big_m, make_column, route_metrics, validate_schedule)
from .oracle import brute_force_lex_optimum, enumerate_routes
from .report import gap_report, run_bench

__all__ = [
    "METHODS", "RunConfig", "RunStats", "solve", "solve_sequential", "solve_weighted",
    "CATEGORIES", "GeneratorConfig", "generate_random", "load_instance",
    "make_category_instance", "parse_instance", "save_instance", "standardize",
    "Column", "Instance", "Intervention", "Interval", "LexSolution", "Node", "Vehicle",
    "compute_big_m", "make_column", "route_metrics", "validate_schedule",
    "brute_force_lex_optimum", "enumerate_routes", "gap_report", "run_bench",
]
__version__ = "0.1.0"
