"""Hardy-type operators, John constants and discrete Poincare inequalities on weighted graphs."""

from .decomp import EdgeDecomposition, decompose, q_energy, reconstruct, verify_energy_bound
from .generators import grid, kary_tree, log_path, random_connected
from .graph_core import (
    GraphError,
    WeightedGraph,
    gradient_length,
    lp_norm,
    project_zero_mean,
    restrict,
    weighted_mean,
)
from .graphio import load_graph, save_graph
from .hardy import (
    HardyBoundReport,
    apply_hardy,
    distribution_measure,
    verify_strong_infinity,
    verify_strong_qq,
    verify_weak_11,
)
from .poincare import (
    PoincareReport,
    brute_force_sharp_constant,
    estimate_sharp_constant,
    global_ratio,
    local_edge_check,
    theoretical_constant,
)
from .reports import VerificationReport
from .tree import (
    RootedTree,
    ShadowSummary,
    build_spanning_tree,
    is_descendant,
    optimize_tree,
    shadow_relation,
    shadow_summary,
)

__version__ = "0.1.0"
