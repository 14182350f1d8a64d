"""Fairness checkers (EF1, EREF, band-valuation guarantees) and Monte Carlo
estimators for the distributional EREF guarantees of the exchange solution.

EF1: for every pair (i, j), some good can be removed from j's bundle so that
i values its own bundle at least as much. EREF: a strictly lower-endowed
agent never values a higher-endowed agent's bundle above its own. Checkers
compare exact integers; estimators work on float draws where ties are a
measure-zero event (and are broken uniformly at random when they do occur).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .instance import Allocation, Instance, bundle_values, validate_allocation

# one-sided 99% normal quantile, used for all confidence accounting
Z99 = 2.3263478740408408


def is_ef1(inst: Instance, alloc: Allocation) -> tuple[bool, tuple[int, int] | None]:
    """EF1 check; on failure returns the first pair (i, j) for which removing
    any single good from A_j leaves i envious."""
    validate_allocation(inst, alloc)
    own = bundle_values(inst, alloc)
    for j in range(inst.n):
        goods_j = np.flatnonzero(alloc.owner == j)
        if goods_j.size == 0:
            continue
        for i in range(inst.n):
            if i == j:
                continue
            vij = inst.valuations[i, goods_j]
            if int(own[i]) < int(vij.sum()) - int(vij.max()):
                return False, (i, j)
    return True, None


def is_eref(inst: Instance, alloc: Allocation) -> tuple[bool, tuple[int, int] | None]:
    """EREF check; on failure returns the first pair with e_i < e_j and
    v_i(A_i) < v_i(A_j)."""
    validate_allocation(inst, alloc)
    own = bundle_values(inst, alloc)
    for i in range(inst.n):
        for j in range(inst.n):
            if i == j or not int(inst.endowments[i]) < int(inst.endowments[j]):
                continue
            goods_j = np.flatnonzero(alloc.owner == j)
            if int(own[i]) < int(inst.valuations[i, goods_j].sum()):
                return False, (i, j)
    return True, None


def valuation_band(inst: Instance) -> tuple[int, int] | None:
    """(min, max) nonzero scaled valuation, or None when all are zero."""
    pos = inst.valuations[inst.valuations > 0]
    if pos.size == 0:
        return None
    return int(pos.min()), int(pos.max())


def eref_guaranteed_pairs(
    inst: Instance, band: tuple[int, int] | None = None
) -> list[tuple[int, int]]:
    """Pairs (i, j) with e_i < (lo/hi) * e_j for the detected (or supplied)
    nonzero-valuation band. For such pairs the exchange solution can never
    place a good i values into j's bundle, so i cannot envy j."""
    if band is None:
        band = valuation_band(inst)
    if band is None:
        return []
    lo, hi = band
    pairs = []
    for i in range(inst.n):
        for j in range(inst.n):
            if i == j:
                continue
            if int(inst.endowments[i]) * hi < lo * int(inst.endowments[j]):
                pairs.append((i, j))
    return pairs


@dataclass(frozen=True)
class FairnessReport:
    ef1: bool
    ef1_witness: tuple[int, int] | None
    eref: bool
    eref_witness: tuple[int, int] | None
    band: tuple[int, int] | None
    guaranteed_pairs: tuple[tuple[int, int], ...]
    guaranteed_pairs_hold: tuple[bool, ...]


def fairness_report(inst: Instance, alloc: Allocation) -> FairnessReport:
    ef1_ok, ef1_w = is_ef1(inst, alloc)
    eref_ok, eref_w = is_eref(inst, alloc)
    band = valuation_band(inst)
    pairs = eref_guaranteed_pairs(inst, band)
    own = bundle_values(inst, alloc)
    holds = []
    for i, j in pairs:
        goods_j = np.flatnonzero(alloc.owner == j)
        holds.append(bool(int(own[i]) >= int(inst.valuations[i, goods_j].sum())))
    return FairnessReport(
        ef1=ef1_ok,
        ef1_witness=ef1_w,
        eref=eref_ok,
        eref_witness=eref_w,
        band=band,
        guaranteed_pairs=tuple(pairs),
        guaranteed_pairs_hold=tuple(holds),
    )


@dataclass(frozen=True)
class MCConfig:
    """Random-valuation model: v_i(g) ~ Uniform[0, m_bounds[g]], independent
    across agents and goods; endowments are fixed positive integers."""

    endowments: tuple[int, ...]
    m_bounds: tuple[float, ...]
    trials: int
    seed: int = 0

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if any(int(e) <= 0 for e in self.endowments):
            raise ValueError("endowments must be positive")
        if any(b <= 0 for b in self.m_bounds):
            raise ValueError("per-good bounds must be positive")
        object.__setattr__(self, "endowments", tuple(int(e) for e in self.endowments))
        object.__setattr__(self, "m_bounds", tuple(float(b) for b in self.m_bounds))

    @property
    def n(self) -> int:
        return len(self.endowments)

    @property
    def m(self) -> int:
        return len(self.m_bounds)


def _simulate_bundle_values(cfg: MCConfig, i: int, j: int):
    """Per-trial v_i(A_i) and v_i(A_j) under the per-draw exchange solution."""
    rng = np.random.default_rng(cfg.seed)
    n, m, t = cfg.n, cfg.m, cfg.trials
    e = np.asarray(cfg.endowments, dtype=np.float64)
    draws = rng.uniform(size=(t, n, m)) * np.asarray(cfg.m_bounds)
    scaled = draws / e[None, :, None]
    winner = scaled.argmax(axis=1)  # (t, m)
    top = scaled.max(axis=1)
    tied = (scaled == top[:, None, :]).sum(axis=1) > 1
    for ti, g in np.argwhere(tied):
        cand = np.flatnonzero(scaled[ti, :, g] == top[ti, g])
        winner[ti, g] = cand[int(rng.integers(cand.size))]
    vi = draws[:, i, :]
    vi_own = (vi * (winner == i)).sum(axis=1)
    vi_other = (vi * (winner == j)).sum(axis=1)
    return vi_own, vi_other


def _status(mean: float, se: float) -> str:
    if mean >= 0:
        return "holds"
    if mean + Z99 * se >= 0:
        return "inconclusive"
    return "fails"


@dataclass(frozen=True)
class ExpectationReport:
    i: int
    j: int
    trials: int
    mean_own: float
    se_own: float
    mean_other: float
    se_other: float
    factor: float  # e_j / e_i
    diff_plain: float  # mean of v_i(A_i) - v_i(A_j)
    se_plain: float
    diff_scaled: float  # mean of v_i(A_i) - (e_j/e_i) * v_i(A_j)
    se_scaled: float
    status_plain: str
    status_scaled: str


def mc_eref_expectation(cfg: MCConfig, i: int, j: int) -> ExpectationReport:
    """Estimates E[v_i(A_i)] vs E[v_i(A_j)] (and the uniform-distribution
    strengthening with factor e_j/e_i) under per-draw exchange solutions.
    Statuses use one-sided 99% normal intervals on the per-trial differences."""
    if cfg.endowments[i] > cfg.endowments[j]:
        raise ValueError("pair orientation wrong: need e_i <= e_j")
    vi_own, vi_other = _simulate_bundle_values(cfg, i, j)
    t = cfg.trials
    factor = cfg.endowments[j] / cfg.endowments[i]

    def mean_se(x):
        mu = float(x.mean())
        se = float(x.std(ddof=1) / np.sqrt(t)) if t > 1 else 0.0
        return mu, se

    mean_own, se_own = mean_se(vi_own)
    mean_other, se_other = mean_se(vi_other)
    d1, s1 = mean_se(vi_own - vi_other)
    d2, s2 = mean_se(vi_own - factor * vi_other)
    return ExpectationReport(
        i=i,
        j=j,
        trials=t,
        mean_own=mean_own,
        se_own=se_own,
        mean_other=mean_other,
        se_other=se_other,
        factor=factor,
        diff_plain=d1,
        se_plain=s1,
        diff_scaled=d2,
        se_scaled=s2,
        status_plain=_status(d1, s1),
        status_scaled=_status(d2, s2),
    )


def eref_probability_bound(endowments, m: int, j: int) -> Fraction:
    """Closed-form lower bound on Pr(v_i(A_i) >= v_i(A_j)) for uniform draws:
    (1 - prod(e_k) / (n * e_j^n))^m, in exact rationals (clamped at 0)."""
    ends = [int(e) for e in endowments]
    n = len(ends)
    per_good = Fraction(math.prod(ends), n * ends[j] ** n)
    base = max(Fraction(0), 1 - per_good)
    return base**m


@dataclass(frozen=True)
class ProbabilityReport:
    i: int
    j: int
    trials: int
    p_hat: float
    se: float
    bound: float
    status: str  # empirical probability vs the closed-form lower bound


def mc_eref_probability(cfg: MCConfig, i: int, j: int) -> ProbabilityReport:
    """Estimates Pr(v_i(A_i) >= v_i(A_j)) and compares it against the exact
    closed-form lower bound; `holds` when the point estimate clears the bound,
    `inconclusive` when only the 99% interval does."""
    if cfg.endowments[i] > cfg.endowments[j]:
        raise ValueError("pair orientation wrong: need e_i <= e_j")
    vi_own, vi_other = _simulate_bundle_values(cfg, i, j)
    t = cfg.trials
    p_hat = float((vi_own >= vi_other).mean())
    se = float(np.sqrt(p_hat * (1.0 - p_hat) / t))
    bound = float(eref_probability_bound(cfg.endowments, cfg.m, j))
    return ProbabilityReport(
        i=i,
        j=j,
        trials=t,
        p_hat=p_hat,
        se=se,
        bound=bound,
        status=_status(p_hat - bound, se),
    )
