"""Fair (s,t)-cuts and the cut algorithms built on them.

Every public routine certifies its own output with an exact flow check at
desk scale; see the README for the guarantees and the tuning constants.
"""

from .config import DEFAULT, Constants
from .congestion import LaminarFamily, build as build_family, measure_quality
from .expander import (
    BalancedCut,
    Certified,
    ExpanderPartition,
    NearExpanderCut,
    conductance,
    cut_matching,
    exact_conductance,
    expander_decomposition,
    matching_flow_step,
    subdivision_graph,
    trimming,
)
from .fair_cut import fair_cut, fair_flow_witness
from .almost_fair import almost_fair, check_almost_fair
from .flows import (
    FairnessCertificate,
    Flow,
    Refuted,
    feasible_flow_lower_bounds,
    max_flow_exact,
    verify_fair_cut,
    verify_one_sided_fair,
)
from .ghtree import GHSteinerTree, cut_threshold_step, gh_step, gh_tree, query_mincut
from .graph import Cut, Graph, GraphError, boundary_graph, contract, cut_value, self_loop_subgraph, volume
from .io import parse_graph, serialize_graph
from .isolating import IsolatingCutsResult, isolating_cuts, steiner_mincut
from .kernels import BACKEND

__version__ = "0.1.0"
