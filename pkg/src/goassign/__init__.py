"""goassign: pareto-optimal assignment under multiple preference layers.

Decide whether an assignment of items to agents exists that is pareto
optimal in at least alpha of the instance's preference layers, verify and
explain given assignments, shrink instances with answer-preserving
kernels, and generate hard instances by reduction from 3-SAT, grid
permutation cliques, and multicolored independent sets.
"""

from .kernels import (agent_class_partition, compute_agent_class,
                      kernel_agent_classes, kernel_truncate_lists)
from .mechanisms import (BudgetError, enumerate_pareto_optimal,
                         iter_pareto_optimal, serial_dictatorship)
from .model import (Assignment, Instance, NO_ITEM, ParseError,
                    is_legal_in_layer, parse_assignment, parse_instance,
                    serialize_assignment, serialize_instance)
from .optimality import (CycleWitness, TradingGraph, agents_respect,
                         build_trading_graph, find_layer_violation,
                         find_violation, is_dominated, is_globally_optimal,
                         is_pareto_optimal_in_layer, optimal_layers,
                         pareto_dominates, witness_is_valid)
from .solvers import (SolveResult, solve, solve_exhaustive,
                      solve_item_subsets, solve_permutation_sweep)

__version__ = "0.1.0"

__all__ = [
    "Assignment", "BudgetError", "CycleWitness", "Instance", "NO_ITEM",
    "ParseError", "SolveResult", "TradingGraph", "agent_class_partition",
    "agents_respect", "build_trading_graph", "compute_agent_class",
    "enumerate_pareto_optimal", "find_layer_violation", "find_violation",
    "is_dominated", "is_globally_optimal", "is_legal_in_layer",
    "is_pareto_optimal_in_layer", "iter_pareto_optimal",
    "kernel_agent_classes", "kernel_truncate_lists", "optimal_layers",
    "parse_assignment", "parse_instance", "pareto_dominates",
    "serial_dictatorship", "serialize_assignment", "serialize_instance",
    "solve", "solve_exhaustive", "solve_item_subsets",
    "solve_permutation_sweep", "witness_is_valid",
]
