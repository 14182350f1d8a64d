"""Welfare metrics, log-gain utilities, and closed-form approximation bounds.

All logarithms are base 2 except inside approx_factor, whose denominator is a
natural log by definition. Values reported here are in true (unscaled) units;
ratio quantities (z, alpha) are computed in exact rational arithmetic before
any float conversion so bound checks cannot flip on rounding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .instance import Allocation, Instance, bundle_values

# float slack for guarantee-conclusion checks, in log2 units, applied in the
# direction that avoids reporting spurious violations
CHECK_SLACK = 1e-9


def baseline_nash(inst: Instance) -> float:
    """Nash welfare of handing out no goods: sum of log2 endowments."""
    e = inst.endowments
    return float(np.log2(e.astype(np.float64)).sum()) - inst.n * math.log2(inst.scale)


def nash_welfare(inst: Instance, alloc: Allocation) -> float:
    b = bundle_values(inst, alloc)
    tot = (b + inst.endowments).astype(np.float64)
    return float(np.log2(tot).sum()) - inst.n * math.log2(inst.scale)


def central_objective(inst: Instance, alloc: Allocation) -> tuple[int, float]:
    """Goods-only objective as a lexicographic pair.

    Returns (number of agents with positive bundle value, sum of their log2
    bundle values). Comparing pairs lexicographically ranks allocations where
    some agent gets zero value without -inf arithmetic; whenever two
    allocations both give every agent positive value, the order agrees with
    comparing the plain sum of logs.
    """
    b = bundle_values(inst, alloc)
    pos = b > 0
    count = int(pos.sum())
    if count == 0:
        return 0, 0.0
    slog = float(np.log2(b[pos].astype(np.float64)).sum()) - count * math.log2(inst.scale)
    return count, slog


def utilitarian(inst: Instance, alloc: Allocation) -> float:
    return float(bundle_values(inst, alloc).sum()) / inst.scale


def egalitarian(inst: Instance, alloc: Allocation) -> float:
    b = bundle_values(inst, alloc)
    return float((b + inst.endowments).min()) / inst.scale


def pergood_log_gain(inst: Instance, i: int, g: int) -> float:
    """log2(v_i(g) + e_i) - log2(e_i): marginal log utility of one good over
    the bare endowment. Scale-free."""
    v = int(inst.valuations[i, g])
    e = int(inst.endowments[i])
    return math.log2(v + e) - math.log2(e)


def additive_log_gain(inst: Instance, i: int, goods) -> float:
    """Sum of per-good log gains over a bundle (the quantity the exchange
    process maximizes)."""
    goods = np.asarray(goods, dtype=np.int64)
    e = int(inst.endowments[i])
    if goods.size == 0:
        return 0.0
    v = inst.valuations[i, goods].astype(np.float64)
    return float(np.log2(v + e).sum() - goods.size * math.log2(e))


def joint_log_gain(inst: Instance, i: int, goods) -> float:
    """log2(v_i(bundle) + e_i) - log2(e_i): the bundle-level counterpart;
    summing this over agents recovers Nash welfare up to the endowment
    constant."""
    goods = np.asarray(goods, dtype=np.int64)
    e = int(inst.endowments[i])
    v = int(inst.valuations[i, goods].sum()) if goods.size else 0
    return math.log2(v + e) - math.log2(e)


def approx_factor(x: float) -> float:
    """(x + x^3/3) / ln(1+x): the approximation factor as a function of the
    value-to-endowment ratio; strictly increasing, always > 1."""
    if x <= 0:
        raise ValueError("x must be positive")
    return (x + x**3 / 3.0) / math.log1p(x)


def max_value_endowment_ratio(inst: Instance) -> Fraction:
    """max_i v_i(G)/e_i, exact."""
    return max(
        Fraction(inst.row_total(i), int(inst.endowments[i])) for i in range(inst.n)
    )


def z_of(inst: Instance) -> float:
    """Approximation factor at the instance's max value-to-endowment ratio."""
    ratio = max_value_endowment_ratio(inst)
    if ratio <= 0:
        raise ValueError("all valuations are zero")
    return approx_factor(float(ratio))


def alpha_of(inst: Instance) -> Fraction:
    """max over positive valuations of e_i / v_i(g), exact."""
    best: Fraction | None = None
    vals = inst.valuations
    ends = inst.endowments
    for i in range(inst.n):
        row = vals[i]
        pos = row[row > 0]
        if pos.size == 0:
            continue
        cand = Fraction(int(ends[i]), int(pos.min()))
        if best is None or cand > best:
            best = cand
    if best is None:
        raise ValueError("all valuations are zero")
    return best


def relative_error_bound(c: float) -> float:
    """Upper bound on the relative error of the additive log gain as an
    approximation of the joint log gain, at bundle ratio c = v_i(A_i)/e_i."""
    if c <= 0:
        raise ValueError("c must be positive")
    return approx_factor(c) - 1.0


def marginal_ratio(inst: Instance, alloc: Allocation, alloc_opt: Allocation) -> float:
    """(NW(A) - NW(empty)) / (NW(A_opt) - NW(empty))."""
    base = baseline_nash(inst)
    denom = nash_welfare(inst, alloc_opt) - base
    if denom <= 0:
        raise ValueError("marginal ratio undefined: optimum adds no welfare")
    return (nash_welfare(inst, alloc) - base) / denom


@dataclass(frozen=True)
class WelfareReport:
    nash: float
    utilitarian: float
    egalitarian: float
    baseline_nash: float
    marginal_ratio: float | None = None

    def __post_init__(self):
        # allocations only ever add non-negative value
        assert self.nash >= self.baseline_nash - CHECK_SLACK


def welfare_report(
    inst: Instance, alloc: Allocation, alloc_opt: Allocation | None = None
) -> WelfareReport:
    ratio = None
    if alloc_opt is not None:
        ratio = marginal_ratio(inst, alloc, alloc_opt)
    return WelfareReport(
        nash=nash_welfare(inst, alloc),
        utilitarian=utilitarian(inst, alloc),
        egalitarian=egalitarian(inst, alloc),
        baseline_nash=baseline_nash(inst),
        marginal_ratio=ratio,
    )


@dataclass(frozen=True)
class BoundInputs:
    z: float
    alpha: float
    c_per_agent: tuple[float, ...]
    max_ratio: float


def compute_bound_inputs(inst: Instance, alloc: Allocation) -> BoundInputs:
    b = bundle_values(inst, alloc)
    c = tuple(
        float(Fraction(int(b[i]), int(inst.endowments[i]))) for i in range(inst.n)
    )
    ratio = max_value_endowment_ratio(inst)
    return BoundInputs(
        z=z_of(inst),
        alpha=float(alpha_of(inst)),
        c_per_agent=c,
        max_ratio=float(ratio),
    )


@dataclass(frozen=True)
class BoundCheck:
    precondition_holds: bool
    conclusion_holds: bool
    details: dict


def sum_log_endowments(inst: Instance) -> float:
    return baseline_nash(inst)


def _endowment_product_at_least_one(inst: Instance) -> bool:
    # exact test of sum(log e_i) >= 0, i.e. product of true endowments >= 1
    prod = math.prod(int(e) for e in inst.endowments)
    return prod >= inst.scale**inst.n


def check_dec_bound(
    inst: Instance, alloc_dec: Allocation, alloc_opt: Allocation
) -> BoundCheck:
    """Exchange-solution guarantee: when sum of log endowments is
    non-negative, z * NW(A_dec) >= NW(A_opt)."""
    z = z_of(inst)
    nw_dec = nash_welfare(inst, alloc_dec)
    nw_opt = nash_welfare(inst, alloc_opt)
    pre = _endowment_product_at_least_one(inst)
    conclusion = z * nw_dec >= nw_opt - CHECK_SLACK
    return BoundCheck(
        precondition_holds=pre,
        conclusion_holds=conclusion,
        details={
            "z": z,
            "nash_dec": nw_dec,
            "nash_opt": nw_opt,
            "sum_log_endowments": sum_log_endowments(inst),
        },
    )


def every_good_positively_valued(inst: Instance) -> bool:
    return bool((inst.valuations.max(axis=0) > 0).all())


def check_cen_bound(
    inst: Instance, alloc_cen: Allocation, alloc_opt: Allocation
) -> BoundCheck:
    """Goods-only-solution guarantee: when both allocations give every agent a
    good and every good is positively valued, NW(A_cen) > NW(A_opt) -
    n*log2(1+alpha)."""
    covers_cen = len(np.unique(alloc_cen.owner)) == inst.n
    covers_opt = len(np.unique(alloc_opt.owner)) == inst.n
    pre = covers_cen and covers_opt and every_good_positively_valued(inst)
    details: dict = {
        "cen_covers_all_agents": covers_cen,
        "opt_covers_all_agents": covers_opt,
        "every_good_valued": every_good_positively_valued(inst),
    }
    try:
        alpha = alpha_of(inst)
    except ValueError:
        return BoundCheck(False, False, details)
    nw_cen = nash_welfare(inst, alloc_cen)
    nw_opt = nash_welfare(inst, alloc_opt)
    gap = inst.n * math.log2(1.0 + float(alpha))
    conclusion = nw_cen > nw_opt - gap - CHECK_SLACK
    details.update(
        {"alpha": float(alpha), "nash_cen": nw_cen, "nash_opt": nw_opt, "gap": gap}
    )
    return BoundCheck(pre, conclusion, details)
