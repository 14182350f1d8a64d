"""Fair division of indivisible goods among agents with endowments.

Two allocation philosophies, side by side: an endowment-blind optimizer of
the goods-only Nash objective, and a decentralized exchange process whose
converged state sends each good to an agent maximizing v_i(g)/e_i. The
package provides exact and heuristic solvers for both, fairness checkers
(EF1, EREF), the closed-form approximation bounds relating the two, and a
seeded experiment harness that measures marginal approximation ratios.
"""

from ._accel import USING_NUMBA
from .decentralized import (
    ExchangeConfig,
    ExchangeTrace,
    argmax_equivalence_check,
    convergence_bound,
    decentralized_solution,
    ratio_argmax_set,
    replay_verify,
    run_partial,
    simulate,
    write_trace,
)
from .experiments import (
    DEFAULT_GRID,
    MECHANISMS,
    EngineSpec,
    SweepConfig,
    aggregate_csv,
    aggregate_rows,
    run_sweep,
)
from .fairness import (
    FairnessReport,
    MCConfig,
    eref_guaranteed_pairs,
    eref_probability_bound,
    fairness_report,
    is_ef1,
    is_eref,
    mc_eref_expectation,
    mc_eref_probability,
    valuation_band,
)
from .instance import (
    Allocation,
    GenConfig,
    Instance,
    bundle_values,
    chain_family_min_n,
    gen_cen_suboptimal,
    gen_chain_family,
    gen_identical_goods,
    gen_two_good_skew,
    generate_random,
    load_allocation,
    load_instance,
    new_instance,
    parse,
    random_composition,
    save_allocation,
    save_instance,
    serialize,
    validate_allocation,
)
from .solver import (
    Objective,
    SolveResult,
    breakdown_check,
    solve_branch_bound,
    solve_local_search,
    solve_oracle,
)
from .welfare import (
    BoundCheck,
    BoundInputs,
    WelfareReport,
    additive_log_gain,
    alpha_of,
    approx_factor,
    baseline_nash,
    central_objective,
    check_cen_bound,
    check_dec_bound,
    compute_bound_inputs,
    egalitarian,
    joint_log_gain,
    marginal_ratio,
    max_value_endowment_ratio,
    nash_welfare,
    pergood_log_gain,
    relative_error_bound,
    utilitarian,
    welfare_report,
    z_of,
)

__version__ = "0.1.0"
