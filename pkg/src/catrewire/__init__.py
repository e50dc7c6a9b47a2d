"""Necklace systems, Q-trees, rewiring to companion trees, and exact series."""

from .necklace import (
    Necklace,
    NecklaceSystem,
    Q_ALL,
    Q_LAMBDA,
    Q_NS,
    parse_system,
    q_all,
    serialize_system,
    vertex_gf,
    with_formal_weights,
)
from .trees import (
    CompanionTree,
    QTree,
    ResourceLimitError,
    count_table,
    enumerate_all_qtrees,
    enumerate_nonneg,
    excess,
    is_nonnegative,
    park,
    parse_companion,
    parse_qtree,
)
from .rewiring import closure, companion_status, cyclic_match, inverse_closure, rewire, unrewire
from .companion import enumerate_balanced, enumerate_companion, join_pair, split_unbalanced
from .series import check_parametrization, solve_catalytic, solve_companion_system, solve_inhomogeneous

__version__ = "0.1.0"
