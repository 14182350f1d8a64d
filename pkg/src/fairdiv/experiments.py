"""Seeded sweep harness: marginal approximation ratios of four mechanisms
across an endowment-disparity grid, written as raw + aggregate CSV.

Within a trial all mechanisms see the same generated instance; each
mechanism's own process randomness comes from an independent derived seed, so
reruns with the same master seed are byte-identical regardless of worker
count.
"""

from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .decentralized import ExchangeConfig, decentralized_solution, run_partial, simulate
from .instance import GenConfig, generate_random
from .solver import (
    DEFAULT_NODE_LIMIT,
    Objective,
    solve_branch_bound,
    solve_local_search,
    solve_oracle,
)
from .welfare import baseline_nash, nash_welfare

RAW_HEADER = "# fairdiv sweep raw v1"
AGG_HEADER = "# fairdiv sweep agg v1"
RAW_COLUMNS = ("n", "m", "e_max", "mechanism", "trial", "seed", "ratio", "exact")
AGG_COLUMNS = (
    "n",
    "m",
    "e_max",
    "mechanism",
    "mean_ratio",
    "stderr",
    "trials",
    "low_count",
)
MECHANISMS = ("CEN", "DEC", "CEN+3R", "RAND+3R")
DEFAULT_GRID = (1, 2, 5, 10, 100, 1000, 2500, 5000, 10000, 100000)
_MECH_CODE = {"CEN": 1, "DEC": 2, "CEN+3R": 3, "RAND+3R": 4}
_ROLE_INSTANCE = 90
_ROLE_OPT = 91
_ROLE_CEN = 92


@dataclass(frozen=True)
class EngineSpec:
    kind: str = "ls"  # oracle | bnb | ls
    restarts: int = 20
    node_limit: int | None = None
    timeout_ms: float | None = None

    def solve(self, inst, objective: Objective, seed: int):
        if self.kind == "oracle":
            return solve_oracle(inst, objective)
        if self.kind == "bnb":
            return solve_branch_bound(
                inst,
                objective,
                node_limit=self.node_limit or DEFAULT_NODE_LIMIT,
                timeout_ms=self.timeout_ms,
            )
        if self.kind == "ls":
            return solve_local_search(
                inst, objective, restarts=self.restarts, seed=seed
            )
        raise ValueError(f"unknown engine kind {self.kind!r}")


@dataclass(frozen=True)
class SweepConfig:
    n: int
    m: int
    e_max_grid: tuple[int, ...] = DEFAULT_GRID
    trials: int = 100
    mechanisms: tuple[str, ...] = MECHANISMS
    opt_engine: EngineSpec = field(default_factory=EngineSpec)
    cen_engine: EngineSpec = field(default_factory=EngineSpec)
    master_seed: int = 0
    total_valuation: int = 500

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if not self.e_max_grid:
            raise ValueError("e_max grid must be nonempty")
        if not self.mechanisms:
            raise ValueError("mechanisms must be nonempty")
        for mech in self.mechanisms:
            if mech not in MECHANISMS:
                raise ValueError(f"unknown mechanism {mech!r}")


def sweep_config_from_json(text: str) -> SweepConfig:
    doc = json.loads(text)
    engines = {}
    for key in ("opt_engine", "cen_engine"):
        if key in doc:
            engines[key] = EngineSpec(**doc.pop(key))
    for key in ("e_max_grid", "mechanisms"):
        if key in doc:
            doc[key] = tuple(doc[key])
    return SweepConfig(**doc, **engines)


def sweep_config_to_json(cfg: SweepConfig) -> str:
    doc = {
        "n": cfg.n,
        "m": cfg.m,
        "e_max_grid": list(cfg.e_max_grid),
        "trials": cfg.trials,
        "mechanisms": list(cfg.mechanisms),
        "opt_engine": {"kind": cfg.opt_engine.kind, "restarts": cfg.opt_engine.restarts},
        "cen_engine": {"kind": cfg.cen_engine.kind, "restarts": cfg.cen_engine.restarts},
        "master_seed": cfg.master_seed,
        "total_valuation": cfg.total_valuation,
    }
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def derived_seed(master: int, *key: int) -> int:
    """Stable 64-bit child seed from the master seed and an integer key path
    (numpy SeedSequence; reproducible across runs and processes)."""
    ss = np.random.SeedSequence([int(master), *[int(k) for k in key]])
    return int(ss.generate_state(1, np.uint64)[0])


def run_cell(cfg: SweepConfig, e_max: int, trial: int) -> list[tuple]:
    """All mechanism rows for one (e_max, trial) cell."""
    inst_seed = derived_seed(cfg.master_seed, e_max, trial, _ROLE_INSTANCE)
    inst = generate_random(
        GenConfig(cfg.n, cfg.m, e_max, cfg.total_valuation, inst_seed)
    )
    base = baseline_nash(inst)
    opt = cfg.opt_engine.solve(
        inst,
        Objective.WITH_ENDOWMENTS,
        derived_seed(cfg.master_seed, e_max, trial, _ROLE_OPT),
    )
    denom = nash_welfare(inst, opt.allocation) - base
    cen_alloc = None
    if "CEN" in cfg.mechanisms or "CEN+3R" in cfg.mechanisms:
        cen_alloc = cfg.cen_engine.solve(
            inst,
            Objective.GOODS_ONLY,
            derived_seed(cfg.master_seed, e_max, trial, _ROLE_CEN),
        ).allocation
    rows = []
    for mech in cfg.mechanisms:
        mech_seed = derived_seed(cfg.master_seed, e_max, trial, _MECH_CODE[mech])
        if mech == "CEN":
            alloc = cen_alloc
        elif mech == "DEC":
            alloc = decentralized_solution(inst)
        elif mech == "CEN+3R":
            alloc = run_partial(inst, cen_alloc, rounds=3, seed=mech_seed)
        else:  # RAND+3R: random start and process randomness share one stream
            k = max(2, round(inst.n / 3))
            alloc = simulate(
                inst, ExchangeConfig(k=k, rounds=3, seed=mech_seed, initial="random")
            ).final
        ratio = (nash_welfare(inst, alloc) - base) / denom
        rows.append(
            (cfg.n, cfg.m, e_max, mech, trial, inst_seed, ratio, opt.exact)
        )
    return rows


def _cell_worker(args):
    cfg, e_max, trial = args
    return run_cell(cfg, e_max, trial)


def format_raw_csv(rows) -> str:
    mech_rank = {mech: r for r, mech in enumerate(MECHANISMS)}
    rows = sorted(rows, key=lambda r: (r[2], r[4], mech_rank[r[3]]))
    lines = [RAW_HEADER, ",".join(RAW_COLUMNS)]
    for n, m, e_max, mech, trial, seed, ratio, exact in rows:
        lines.append(
            f"{n},{m},{e_max},{mech},{trial},{seed},{ratio!r},{'true' if exact else 'false'}"
        )
    return "\n".join(lines) + "\n"


def parse_raw_csv(text: str) -> list[tuple]:
    rows = []
    for line in text.splitlines():
        if not line or line.startswith("#") or line.startswith("n,"):
            continue
        n, m, e_max, mech, trial, seed, ratio, exact = line.split(",")
        rows.append(
            (
                int(n),
                int(m),
                int(e_max),
                mech,
                int(trial),
                int(seed),
                float(ratio),
                exact == "true",
            )
        )
    if not rows:
        raise ValueError("empty sweep data")
    return rows


def aggregate_rows(rows) -> list[tuple]:
    """Per (n, m, e_max, mechanism): mean ratio, stderr = sample stddev /
    sqrt(trials) (0 by convention for a single trial, flagged low_count)."""
    if not rows:
        raise ValueError("empty sweep data")
    groups: dict[tuple, list[float]] = {}
    for n, m, e_max, mech, _trial, _seed, ratio, _exact in rows:
        groups.setdefault((n, m, e_max, mech), []).append(ratio)
    mech_rank = {mech: r for r, mech in enumerate(MECHANISMS)}
    out = []
    for (n, m, e_max, mech), ratios in sorted(
        groups.items(), key=lambda kv: (kv[0][0], kv[0][1], kv[0][2], mech_rank[kv[0][3]])
    ):
        arr = np.asarray(ratios)
        count = arr.size
        stderr = float(arr.std(ddof=1) / np.sqrt(count)) if count > 1 else 0.0
        out.append((n, m, e_max, mech, float(arr.mean()), stderr, count, count < 2))
    return out


def format_agg_csv(agg_rows) -> str:
    lines = [AGG_HEADER, ",".join(AGG_COLUMNS)]
    for n, m, e_max, mech, mean, stderr, count, low in agg_rows:
        lines.append(
            f"{n},{m},{e_max},{mech},{mean!r},{stderr!r},{count},{'true' if low else 'false'}"
        )
    return "\n".join(lines) + "\n"


def aggregate_csv(raw_path, agg_path) -> None:
    rows = parse_raw_csv(Path(raw_path).read_text())
    Path(agg_path).write_text(format_agg_csv(aggregate_rows(rows)))


def run_sweep(cfg: SweepConfig, out_dir, workers: int = 1) -> tuple[Path, Path]:
    """Runs every (e_max, trial) cell and writes raw.csv + agg.csv under
    out_dir. Cells are independent; rows are sorted by cell key before
    writing, so output bytes do not depend on worker count."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    cells = [(cfg, e_max, trial) for e_max in cfg.e_max_grid for trial in range(cfg.trials)]
    rows: list[tuple] = []
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for cell_rows in pool.map(_cell_worker, cells, chunksize=8):
                rows.extend(cell_rows)
    else:
        for args in cells:
            rows.extend(_cell_worker(args))
    raw_path = out / "raw.csv"
    agg_path = out / "agg.csv"
    raw_path.write_text(format_raw_csv(rows))
    agg_path.write_text(format_agg_csv(aggregate_rows(rows)))
    return raw_path, agg_path
