"""Closed-form exchange solution, the round-based stochastic exchange
simulator, and its convergence lower bound.

Ratio comparisons (v_i(g)/e_i) are done by exact integer cross-multiplication
so argmax ties never depend on float rounding; per the log identity, the same
argmax sets maximize the per-good log gain.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

import numpy as np

from .instance import Allocation, Instance, validate_allocation
from .welfare import pergood_log_gain

TRACE_FORMAT = "fairdiv-trace/1"


def ratio_argmax_set(inst: Instance, g: int, members=None) -> list[int]:
    """Agents maximizing v_i(g)/e_i (within `members` if given), exactly."""
    idx = range(inst.n) if members is None else members
    best: list[int] = []
    bv = bn = 0  # best value/endowment fraction, as a cross-multiplied pair
    for i in idx:
        v = int(inst.valuations[i, g])
        e = int(inst.endowments[i])
        if not best:
            best, bv, bn = [i], v, e
            continue
        lhs = v * bn
        rhs = bv * e
        if lhs > rhs:
            best, bv, bn = [i], v, e
        elif lhs == rhs:
            best.append(i)
    return best


def decentralized_solution(inst: Instance, tie_seed: int | None = None) -> Allocation:
    """Assign each good to an agent maximizing v_i(g)/e_i. Ties go to the
    lowest agent index by default, or are sampled uniformly when a tie seed is
    given."""
    rng = np.random.default_rng(tie_seed) if tie_seed is not None else None
    owner = np.zeros(inst.m, dtype=np.int64)
    for g in range(inst.m):
        cand = ratio_argmax_set(inst, g)
        if rng is None or len(cand) == 1:
            owner[g] = cand[0]
        else:
            owner[g] = cand[int(rng.integers(len(cand)))]
    return Allocation(owner)


def argmax_equivalence_check(inst: Instance, g: int, slack: float = 1e-12) -> bool:
    """True iff the agents maximizing the per-good log gain coincide (as a
    set) with those maximizing v_i(g)/e_i."""
    ratio_set = set(ratio_argmax_set(inst, g))
    gains = [pergood_log_gain(inst, i, g) for i in range(inst.n)]
    top = max(gains)
    log_set = {i for i, u in enumerate(gains) if u >= top - slack}
    return ratio_set == log_set


def convergence_bound(n: int, m: int, k: int, t: int) -> float:
    """Lower bound on the probability that t rounds with k-agent subsets have
    moved every good to a global ratio-argmax owner: 1 - m*(1 - (k^2-k)/(n^2-n))^t,
    clamped at 0."""
    if not 2 <= k <= n:
        raise ValueError("need 2 <= k <= n")
    if t < 0:
        raise ValueError("t must be non-negative")
    if m < 1:
        raise ValueError("m must be positive")
    p = (k * k - k) / (n * n - n)
    return max(0.0, 1.0 - m * (1.0 - p) ** t)


@dataclass(frozen=True)
class ExchangeConfig:
    k: int
    rounds: int
    seed: int
    initial: Allocation | str = "random"  # "random" or a concrete Allocation

    def __post_init__(self):
        if self.rounds < 0:
            raise ValueError("rounds must be non-negative")
        if isinstance(self.initial, str) and self.initial != "random":
            raise ValueError("initial must be 'random' or an Allocation")


@dataclass(frozen=True)
class RoundRecord:
    index: int
    subset: tuple[int, ...]
    moves: tuple[tuple[int, int, int], ...]  # (good, old owner, new owner)
    snapshot_hash: str


@dataclass(frozen=True)
class ExchangeTrace:
    records: tuple[RoundRecord, ...]
    initial: Allocation
    final: Allocation
    converged: bool
    config: ExchangeConfig = field(repr=False)


def _chain_hash(prev: str, owner: np.ndarray) -> str:
    h = hashlib.sha256()
    h.update(prev.encode())
    h.update(owner.tobytes())
    return h.hexdigest()


def simulate(inst: Instance, cfg: ExchangeConfig) -> ExchangeTrace:
    """Run the exchange process: each round an (n choose k)-uniform subset
    pools the goods its members currently hold and hands each one to a
    within-subset ratio argmax (ties uniform at random). Goods held by
    non-members never move. Converged means every good ends at SOME global
    ratio argmax, so tie choices cannot cause false negatives."""
    if not 2 <= cfg.k <= inst.n:
        raise ValueError("need 2 <= k <= n")
    rng = np.random.default_rng(cfg.seed)
    if isinstance(cfg.initial, Allocation):
        validate_allocation(inst, cfg.initial)
        owner = cfg.initial.owner.copy()
    else:
        owner = rng.integers(0, inst.n, size=inst.m).astype(np.int64)
    initial = Allocation(owner.copy())

    global_sets = [set(ratio_argmax_set(inst, g)) for g in range(inst.m)]
    records = []
    prev_hash = _chain_hash("", owner)
    for t in range(cfg.rounds):
        subset = np.sort(rng.choice(inst.n, size=cfg.k, replace=False))
        members = [int(i) for i in subset]
        member_set = set(members)
        moves = []
        for g in range(inst.m):
            old = int(owner[g])
            if old not in member_set:
                continue
            cand = ratio_argmax_set(inst, g, members)
            new = cand[0] if len(cand) == 1 else cand[int(rng.integers(len(cand)))]
            if new != old:
                owner[g] = new
                moves.append((g, old, new))
        prev_hash = _chain_hash(prev_hash, owner)
        records.append(
            RoundRecord(t, tuple(members), tuple(moves), prev_hash)
        )
    final = Allocation(owner.copy())
    converged = all(int(owner[g]) in global_sets[g] for g in range(inst.m))
    return ExchangeTrace(tuple(records), initial, final, converged, cfg)


def run_partial(
    inst: Instance,
    initial: Allocation,
    rounds: int = 3,
    k: int | None = None,
    seed: int = 0,
) -> Allocation:
    """A few exchange rounds from a given start; subset size defaults to
    max(2, round(n/3))."""
    if k is None:
        k = max(2, round(inst.n / 3))
    trace = simulate(inst, ExchangeConfig(k=k, rounds=rounds, seed=seed, initial=initial))
    return trace.final


def write_trace(trace: ExchangeTrace, path) -> None:
    """Line-per-round structured trace; header and footer carry enough to
    replay the run from its seed and verify every round."""
    cfg = trace.config
    header = {
        "format": TRACE_FORMAT,
        "k": cfg.k,
        "rounds": cfg.rounds,
        "seed": cfg.seed,
        "initial_owner": trace.initial.owner.tolist(),
        "initial_kind": "given" if isinstance(cfg.initial, Allocation) else "random",
    }
    with open(path, "w") as fh:
        fh.write(json.dumps(header, sort_keys=True, separators=(",", ":")) + "\n")
        for rec in trace.records:
            fh.write(
                json.dumps(
                    {
                        "round": rec.index,
                        "subset": list(rec.subset),
                        "moves": [list(mv) for mv in rec.moves],
                        "hash": rec.snapshot_hash,
                    },
                    sort_keys=True,
                    separators=(",", ":"),
                )
                + "\n"
            )
        footer = {
            "converged": trace.converged,
            "final_owner": trace.final.owner.tolist(),
        }
        fh.write(json.dumps(footer, sort_keys=True, separators=(",", ":")) + "\n")


def replay_verify(inst: Instance, path) -> bool:
    """Re-run the simulation recorded at `path` from its seed and check that
    every round record and the final allocation match."""
    with open(path) as fh:
        lines = [json.loads(line) for line in fh if line.strip()]
    header, rounds, footer = lines[0], lines[1:-1], lines[-1]
    if header.get("format") != TRACE_FORMAT:
        raise ValueError("not a trace file")
    initial = (
        Allocation(header["initial_owner"])
        if header["initial_kind"] == "given"
        else "random"
    )
    cfg = ExchangeConfig(
        k=header["k"], rounds=header["rounds"], seed=header["seed"], initial=initial
    )
    trace = simulate(inst, cfg)
    if len(rounds) != len(trace.records):
        return False
    for rec, line in zip(trace.records, rounds):
        if (
            line["round"] != rec.index
            or tuple(line["subset"]) != rec.subset
            or [list(mv) for mv in rec.moves] != line["moves"]
            or line["hash"] != rec.snapshot_hash
        ):
            return False
    return (
        footer["converged"] == trace.converged
        and footer["final_owner"] == trace.final.owner.tolist()
    )
