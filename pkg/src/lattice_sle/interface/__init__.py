from .curves import InterfaceCurve, total_turn, turns_from_points, winding
from .slit import SlitDomain, decided_states, slit
from .tracing import (base_grid, count_dual_clusters, count_loops, euler_loop_count,
                      exploration_start, explore_percolation, loop_representation,
                      run_exploration, trace_interface)

__all__ = [
    "InterfaceCurve", "total_turn", "turns_from_points", "winding", "SlitDomain",
    "decided_states", "slit", "base_grid", "count_dual_clusters", "count_loops",
    "euler_loop_count", "exploration_start", "explore_percolation", "loop_representation",
    "run_exploration", "trace_interface",
]
