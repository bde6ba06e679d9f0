"""Present-biased agents on layered task graphs."""

from .agent import (
    ChoicePolicy,
    RatioReport,
    Simulation,
    Trajectory,
    choice_policies,
    choose_edge,
    derive_seed,
    enumerate_ratio,
    exact_ratio,
    follow,
    simulate,
    splitmix64,
)
from .bounds import (
    MonotoneCondition,
    Theorem5Params,
    check_claim1,
    check_theorem6,
    theorem5_graph,
    theorem5_params,
    theorem6_condition,
)
from .distributions import (
    BiasDistribution,
    EqualRevenue,
    Finite,
    HalfNormal,
    HeavyTailSqrt,
    Uniform,
    ZValue,
    dominates,
    from_dict,
    point_mass,
    z_value,
)
from .graph import (
    TAU,
    DistanceTable,
    Edge,
    TaskGraph,
    build_graph,
    distances,
    is_bounded_distance,
    is_monotone_distance,
    layerize,
    load_graph,
    save_graph,
)
from .pricing import LinearObjective, Menu, best_response, optimal_posted_price, randomized_menu_decomposition
from .scenarios import EXAMPLE_DIST, homework_graph, marathon_graph, ski_graph
from .worstcase import WorstCaseSpec, synthesize, theorem3_bound, theorem4_graph, verify_dominance_monotonicity

__all__ = [name for name in dir() if not name.startswith("_")]
