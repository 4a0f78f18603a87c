"""Exact, parameterized and approximation solvers for directed Steiner network problems."""

from .errors import CapacityError, ContractViolation, DivisionError, NoFeasibleNetwork, ParseError
from .graph import (
    ANY,
    CYCLE,
    PLANAR,
    POLYTREE,
    Edge,
    Graph,
    Instance,
    Pattern,
    Solution,
    SolutionClass,
    check_feasible,
    is_bidirected,
    is_planar,
    make_solution,
    scc_condensation,
    underlying_undirected,
)
from .treewidth import tree_decomposition, treewidth_exact

__version__ = "0.1.0"
