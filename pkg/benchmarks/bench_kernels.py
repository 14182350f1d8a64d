"""Timing comparison of the compiled kernels against the pure-Python
fallback (FAIRDIV_DISABLE_NUMBA=1).

The backend is chosen at import time, so the comparison spawns one fresh
interpreter per backend, each of which runs the same seeded workloads and
prints machine-readable result lines. The parent checks that both backends
produce identical scores (within 1e-9) and prints the speedups.

Usage: python benchmarks/bench_kernels.py [--quick]
"""

import argparse
import json
import os
import subprocess
import sys
import time


def workloads(quick: bool):
    import fairdiv as fd

    wl = []

    def timed(name, fn, repeats=1):
        fn()  # warm-up covers JIT compilation; timings measure steady state
        t0 = time.perf_counter()
        for _ in range(repeats):
            out = fn()
        dt = (time.perf_counter() - t0) / repeats
        wl.append({"name": name, "seconds": dt, "score": out})

    inst_small = fd.generate_random(fd.GenConfig(3, 9 if quick else 12, 1000, seed=1))
    timed(
        f"oracle scan 3^{inst_small.m}",
        lambda: fd.solve_oracle(inst_small, fd.Objective.WITH_ENDOWMENTS, cap=10**8).score,
    )

    inst_ls = fd.generate_random(fd.GenConfig(10, 20, 5000, seed=2))
    restarts = 5 if quick else 20
    timed(
        f"local search n=10 m=20 restarts={restarts} (nash objective)",
        lambda: fd.solve_local_search(
            inst_ls, fd.Objective.WITH_ENDOWMENTS, restarts=restarts, seed=3
        ).score,
        repeats=3,
    )
    timed(
        f"local search n=10 m=20 restarts={restarts} (goods objective)",
        lambda: fd.solve_local_search(
            inst_ls, fd.Objective.GOODS_ONLY, restarts=restarts, seed=3
        ).score[1],
        repeats=3,
    )

    from fairdiv.experiments import run_cell

    cfg = fd.SweepConfig(
        n=10,
        m=20,
        e_max_grid=(5000,),
        trials=1,
        opt_engine=fd.EngineSpec("ls", restarts=restarts),
        cen_engine=fd.EngineSpec("ls", restarts=restarts),
        master_seed=4,
    )
    timed(
        "full sweep cell (opt + cen + 4 mechanisms)",
        lambda: sum(r[6] for r in run_cell(cfg, 5000, 0)),
        repeats=3,
    )
    return wl


def child_main(quick: bool):
    import fairdiv

    results = workloads(quick)
    print(json.dumps({"numba": fairdiv.USING_NUMBA, "results": results}))


def parent_main(quick: bool):
    runs = {}
    for label, env_val in (("numba", "0"), ("numpy", "1")):
        env = dict(os.environ, FAIRDIV_DISABLE_NUMBA=env_val)
        proc = subprocess.run(
            [sys.executable, __file__, "--child", *(["--quick"] if quick else [])],
            env=env,
            capture_output=True,
            text=True,
        )
        if proc.returncode != 0:
            print(proc.stderr, file=sys.stderr)
            raise SystemExit(f"{label} child failed")
        payload = json.loads(proc.stdout.strip().splitlines()[-1])
        expected = label == "numba"
        if payload["numba"] != expected:
            raise SystemExit(f"{label} child ran with numba={payload['numba']}")
        runs[label] = payload["results"]

    print(f"{'workload':<55} {'numba':>10} {'numpy':>10} {'speedup':>9}")
    for a, b in zip(runs["numba"], runs["numpy"]):
        assert a["name"] == b["name"]
        if abs(a["score"] - b["score"]) > 1e-9:
            raise SystemExit(
                f"backend mismatch on {a['name']}: {a['score']} vs {b['score']}"
            )
        speedup = b["seconds"] / a["seconds"] if a["seconds"] > 0 else float("inf")
        print(
            f"{a['name']:<55} {a['seconds']:>9.3f}s {b['seconds']:>9.3f}s {speedup:>8.1f}x"
        )
    print("scores identical across backends (tolerance 1e-9)")


if __name__ == "__main__":
    ap = argparse.ArgumentParser()
    ap.add_argument("--child", action="store_true")
    ap.add_argument("--quick", action="store_true")
    ns = ap.parse_args()
    if ns.child:
        child_main(ns.quick)
    else:
        parent_main(ns.quick)
