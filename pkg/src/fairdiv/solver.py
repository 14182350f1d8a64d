"""Allocation engines for the two objectives: exhaustive oracle, exact
branch-and-bound, and a restart local-search heuristic.

The oracle and local search run on compiled kernels; branch-and-bound is
plain Python with vectorized per-node bound math. All engines are
deterministic: the oracle keeps the lexicographically smallest optimal owner
vector, branch-and-bound explores children in a fixed gain order, and local
search derives per-restart seeds from the caller's seed.
"""

from __future__ import annotations

import enum
import math
import time
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import kernels
from .instance import Allocation, Instance
from .welfare import central_objective, nash_welfare


class Objective(enum.Enum):
    WITH_ENDOWMENTS = "opt"  # sum of log2(v_i(A_i) + e_i)
    GOODS_ONLY = "cen"  # lexicographic (positive count, sum of log2 v_i(A_i))

    @classmethod
    def parse(cls, name: str) -> "Objective":
        for obj in cls:
            if obj.value == name or obj.name.lower() == name.lower():
                return obj
        raise ValueError(f"unknown objective {name!r}")


ORACLE_CAP = 20_000_000
DEFAULT_NODE_LIMIT = 10_000_000
SCORE_EPS = 1e-12


@dataclass(frozen=True)
class SolveResult:
    allocation: Allocation
    score: float | tuple[int, float]
    engine: str  # "oracle" | "bnb" | "ls"
    exact: bool
    nodes_or_iters: int
    objective: Objective
    seed: int | None = None


def _score(inst: Instance, alloc: Allocation, objective: Objective):
    if objective is Objective.WITH_ENDOWMENTS:
        return nash_welfare(inst, alloc)
    return central_objective(inst, alloc)


def score_better(a, b, objective: Objective) -> bool:
    """True when score a strictly beats score b under the objective."""
    if objective is Objective.WITH_ENDOWMENTS:
        return a > b
    return a[0] > b[0] or (a[0] == b[0] and a[1] > b[1])


def solve_oracle(inst: Instance, objective: Objective, cap: int = ORACLE_CAP) -> SolveResult:
    """Globally optimal allocation by full enumeration; ties broken by the
    lexicographically smallest owner vector."""
    total = inst.n**inst.m
    if total > cap:
        raise ValueError(
            f"instance too large for enumeration: {inst.n}^{inst.m} > {cap}"
        )
    if objective is Objective.WITH_ENDOWMENTS:
        owner = kernels.oracle_scan_nw(inst.valuations, inst.endowments)
    else:
        owner = kernels.oracle_scan_goods(inst.valuations)
    alloc = Allocation(owner)
    return SolveResult(
        allocation=alloc,
        score=_score(inst, alloc, objective),
        engine="oracle",
        exact=True,
        nodes_or_iters=total,
        objective=objective,
    )


class _SearchLimit(Exception):
    pass


class _BnbState:
    __slots__ = ("nodes", "node_limit", "deadline", "best_owner")

    def __init__(self, node_limit, deadline):
        self.nodes = 0
        self.node_limit = node_limit
        self.deadline = deadline
        self.best_owner = None

    def tick(self):
        self.nodes += 1
        if self.node_limit is not None and self.nodes > self.node_limit:
            raise _SearchLimit
        if (
            self.deadline is not None
            and (self.nodes & 1023) == 0
            and time.monotonic() > self.deadline
        ):
            raise _SearchLimit


def _greedy_nw(v: np.ndarray, ends: np.ndarray) -> np.ndarray:
    n, m = v.shape
    bundle = np.zeros(n, dtype=np.int64)
    owner = np.zeros(m, dtype=np.int64)
    for g in range(m):
        cur = (bundle + ends).astype(np.float64)
        gains = np.log2(cur + v[:, g]) - np.log2(cur)
        b = int(np.argmax(gains))
        owner[g] = b
        bundle[b] += v[b, g]
    return owner


def _nw_score_int(v: np.ndarray, ends: np.ndarray, owner: np.ndarray) -> float:
    bundle = np.zeros(v.shape[0], dtype=np.int64)
    np.add.at(bundle, owner, v[owner, np.arange(v.shape[1])])
    return float(np.log2((bundle + ends).astype(np.float64)).sum())


def _bnb_nw(v, ends, state: _BnbState):
    """DFS over goods (already ordered); admissible bound from per-good best
    marginal gains at the current partial bundles (gains only shrink as
    bundles grow)."""
    n, m = v.shape
    bundle = np.zeros(n, dtype=np.int64)
    owner = np.full(m, -1, dtype=np.int64)
    greedy = _greedy_nw(v, ends)
    state.best_owner = greedy.copy()
    best = _nw_score_int(v, ends, greedy)

    def rec(depth: int, partial: float):
        nonlocal best
        state.tick()
        if depth == m:
            if partial > best:
                best = partial
                state.best_owner = owner.copy()
            return
        cur = (bundle + ends).astype(np.float64)
        gm = np.log2(cur[:, None] + v[:, depth:]) - np.log2(cur)[:, None]
        if partial + gm.max(axis=0).sum() <= best + SCORE_EPS:
            return
        for b in np.argsort(-gm[:, 0], kind="stable"):
            b = int(b)
            old = math.log2(bundle[b] + ends[b])
            bundle[b] += v[b, depth]
            owner[depth] = b
            rec(depth + 1, partial - old + math.log2(bundle[b] + ends[b]))
            bundle[b] -= v[b, depth]
            owner[depth] = -1

    rec(0, float(np.log2((bundle + ends).astype(np.float64)).sum()))
    return state.best_owner


def _goods_pair(v: np.ndarray, owner: np.ndarray) -> tuple[int, float]:
    bundle = np.zeros(v.shape[0], dtype=np.int64)
    np.add.at(bundle, owner, v[owner, np.arange(v.shape[1])])
    pos = bundle > 0
    count = int(pos.sum())
    slog = float(np.log2(bundle[pos].astype(np.float64)).sum()) if count else 0.0
    return count, slog


def _greedy_goods(v: np.ndarray) -> np.ndarray:
    n, m = v.shape
    bundle = np.zeros(n, dtype=np.int64)
    owner = np.zeros(m, dtype=np.int64)
    for g in range(m):
        nb = bundle + v[:, g]
        dc = (nb > 0).astype(np.int64) - (bundle > 0).astype(np.int64)
        cur = np.maximum(bundle, 1).astype(np.float64)
        new = np.maximum(nb, 1).astype(np.float64)
        ds = np.log2(new) - np.log2(cur)
        b = int(sorted(range(n), key=lambda i: (-dc[i], -ds[i], i))[0])
        owner[g] = b
        bundle[b] += v[b, g]
    return owner


def _bnb_goods(v, state: _BnbState):
    """DFS for the lexicographic goods-only objective. The count bound adds
    every still-satisfiable zero-value agent; the log bound treats each
    agent's bundle as at least one scaled unit, which dominates a first good's
    log term as well as every subsequent marginal gain."""
    n, m = v.shape
    # haspos[i, d]: agent i positively values some good at position >= d
    haspos = np.zeros((n, m + 1), dtype=bool)
    for d in range(m - 1, -1, -1):
        haspos[:, d] = haspos[:, d + 1] | (v[:, d] > 0)
    bundle = np.zeros(n, dtype=np.int64)
    owner = np.full(m, -1, dtype=np.int64)
    greedy = _greedy_goods(v)
    state.best_owner = greedy.copy()
    best_c, best_s = _goods_pair(v, greedy)

    def rec(depth: int, count: int, slog: float):
        nonlocal best_c, best_s
        state.tick()
        if depth == m:
            if count > best_c or (count == best_c and slog > best_s):
                best_c, best_s = count, slog
                state.best_owner = owner.copy()
            return
        zero = bundle == 0
        potential = int((zero & haspos[:, depth]).sum())
        count_bound = count + min(potential, m - depth)
        cur = np.maximum(bundle, 1).astype(np.float64)
        gm = np.log2(cur[:, None] + v[:, depth:]) - np.log2(cur)[:, None]
        slog_bound = slog + gm.max(axis=0).sum()
        if count_bound < best_c or (
            count_bound == best_c and slog_bound <= best_s + SCORE_EPS
        ):
            return
        vg = v[:, depth]
        nb = bundle + vg
        dc = (nb > 0).astype(np.int64) - (bundle > 0).astype(np.int64)
        ds = np.log2(np.maximum(nb, 1).astype(np.float64)) - np.log2(cur)
        for b in sorted(range(n), key=lambda i: (-dc[i], -ds[i], i)):
            old = bundle[b]
            contrib_old = math.log2(old) if old > 0 else 0.0
            bundle[b] = old + vg[b]
            owner[depth] = b
            contrib_new = math.log2(bundle[b]) if bundle[b] > 0 else 0.0
            rec(depth + 1, count + int(dc[b]), slog - contrib_old + contrib_new)
            bundle[b] = old
            owner[depth] = -1

    rec(0, 0, 0.0)
    return state.best_owner


def solve_branch_bound(
    inst: Instance,
    objective: Objective,
    node_limit: int | None = DEFAULT_NODE_LIMIT,
    timeout_ms: float | None = None,
) -> SolveResult:
    """Exact branch-and-bound; goods are assigned in descending order of
    max-agent value. A node budget keeps runs deterministic; an optional
    wall-clock timeout additionally degrades to the best incumbent (then
    flagged inexact rather than raising)."""
    order = np.argsort(-inst.valuations.max(axis=0), kind="stable")
    v = np.ascontiguousarray(inst.valuations[:, order])
    deadline = time.monotonic() + timeout_ms / 1000.0 if timeout_ms else None
    state = _BnbState(node_limit, deadline)
    exact = True
    try:
        if objective is Objective.WITH_ENDOWMENTS:
            owner_perm = _bnb_nw(v, inst.endowments, state)
        else:
            owner_perm = _bnb_goods(v, state)
    except _SearchLimit:
        exact = False
        owner_perm = state.best_owner
    owner = np.zeros(inst.m, dtype=np.int64)
    owner[order] = owner_perm
    alloc = Allocation(owner)
    return SolveResult(
        allocation=alloc,
        score=_score(inst, alloc, objective),
        engine="bnb",
        exact=exact,
        nodes_or_iters=state.nodes,
        objective=objective,
    )


def solve_local_search(
    inst: Instance,
    objective: Objective,
    restarts: int = 1,
    seed: int = 0,
    max_steps: int = 1_000_000,
) -> SolveResult:
    """Steepest-ascent local search (single-good moves and pairwise swaps)
    from random restarts; best score wins, ties to the lowest restart index."""
    if restarts < 1:
        raise ValueError("restarts must be at least 1")
    children = np.random.SeedSequence(seed).spawn(restarts)
    best_alloc = None
    best_score = None
    total_steps = 0
    for child in children:
        rng = np.random.default_rng(child)
        owner = rng.integers(0, inst.n, size=inst.m).astype(np.int64)
        if objective is Objective.WITH_ENDOWMENTS:
            total_steps += int(
                kernels.local_search_nw(
                    inst.valuations, inst.endowments, owner, max_steps
                )
            )
        else:
            total_steps += int(
                kernels.local_search_goods(inst.valuations, owner, max_steps)
            )
        alloc = Allocation(owner)
        score = _score(inst, alloc, objective)
        if best_score is None or score_better(score, best_score, objective):
            best_score = score
            best_alloc = alloc
    return SolveResult(
        allocation=best_alloc,
        score=best_score,
        engine="ls",
        exact=False,
        nodes_or_iters=total_steps,
        objective=objective,
        seed=seed,
    )


@dataclass(frozen=True)
class BreakdownReport:
    applicable: bool
    reason: str
    pairs: tuple[tuple[int, int], ...]
    condition_holds: bool
    nash_cen: float | None = None
    nash_opt: float | None = None
    gap_confirmed: bool | None = None


def breakdown_check(inst: Instance, verify: bool = True) -> BreakdownReport:
    """Tests (exactly, in rationals) whether some agent pair (i, j) satisfies
    e_j > (1/eps) * (v_j(G) - (m-1)*eps) * (v_i(G) - eps + e_i) with eps the
    minimum valuation; when m >= n and all valuations are positive, that
    condition forces the goods-only optimum strictly below the true Nash
    optimum, which `verify` confirms with exact engines."""
    if inst.m < inst.n:
        return BreakdownReport(False, "requires m >= n", (), False)
    min_v = int(inst.valuations.min())
    if min_v <= 0:
        return BreakdownReport(False, "requires all valuations positive", (), False)
    scale = inst.scale
    eps = Fraction(min_v, scale)
    pairs = []
    for i in range(inst.n):
        vi = Fraction(inst.row_total(i), scale)
        ei = Fraction(int(inst.endowments[i]), scale)
        for j in range(inst.n):
            if i == j:
                continue
            vj = Fraction(inst.row_total(j), scale)
            ej = Fraction(int(inst.endowments[j]), scale)
            threshold = (1 / eps) * (vj - (inst.m - 1) * eps) * (vi - eps + ei)
            if ej > threshold:
                pairs.append((i, j))
    holds = bool(pairs)
    if not (holds and verify):
        return BreakdownReport(True, "", tuple(pairs), holds)
    cen = solve_branch_bound(inst, Objective.GOODS_ONLY)
    opt = solve_branch_bound(inst, Objective.WITH_ENDOWMENTS)
    nw_cen = nash_welfare(inst, cen.allocation)
    nw_opt = nash_welfare(inst, opt.allocation)
    return BreakdownReport(
        True,
        "",
        tuple(pairs),
        True,
        nash_cen=nw_cen,
        nash_opt=nw_opt,
        gap_confirmed=bool(cen.exact and opt.exact and nw_cen < nw_opt - SCORE_EPS),
    )
