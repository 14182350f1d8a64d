"""Command-line interface.

Subcommands: gen, solve, bounds, check, simulate, mc-eref, sweep. Every
command is deterministic given its seeds: reruns produce byte-identical files
and stdout. Floats are printed with shortest round-trip repr.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import decentralized as dec
from . import experiments as exp
from . import fairness as fair
from . import instance as inst_mod
from . import solver, welfare


def _fmt(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return repr(x)
    return str(x)


def _cmd_gen(args) -> int:
    fam = args.family
    if fam == "random":
        if None in (args.n, args.m, args.emax):
            raise SystemExit("gen --family random needs --n --m --emax")
        cfg = inst_mod.GenConfig(args.n, args.m, args.emax, args.total, args.seed)
        inst = inst_mod.generate_random(cfg)
    elif fam == "example1":
        if args.n is None or args.eps is None:
            raise SystemExit("gen --family example1 needs --n --eps")
        inst = inst_mod.gen_identical_goods(args.n, args.eps)
    elif fam == "example2":
        if args.x is None or args.eps is None:
            raise SystemExit("gen --family example2 needs --x --eps")
        inst = inst_mod.gen_two_good_skew(args.x, args.eps)
    elif fam == "thm2":
        if args.n is None or args.x is None:
            raise SystemExit("gen --family thm2 needs --n --x")
        inst = inst_mod.gen_chain_family(args.n, args.x)
    elif fam == "breakdown":
        if None in (args.n, args.m) or args.eps is None:
            raise SystemExit("gen --family breakdown needs --n --m --eps")
        inst = inst_mod.gen_cen_suboptimal(args.n, args.m, args.eps)
    else:
        raise SystemExit(f"unknown family {fam!r}")
    inst_mod.save_instance(inst, args.output)
    print(f"wrote {fam} instance n={inst.n} m={inst.m} scale={inst.scale} to {args.output}")
    return 0


def _cmd_solve(args) -> int:
    inst = inst_mod.load_instance(args.file)
    objective = solver.Objective.parse(args.objective)
    if args.engine == "oracle":
        res = solver.solve_oracle(inst, objective)
    elif args.engine == "bnb":
        res = solver.solve_branch_bound(
            inst, objective, node_limit=args.node_limit, timeout_ms=args.timeout_ms
        )
    elif args.engine == "ls":
        res = solver.solve_local_search(
            inst, objective, restarts=args.restarts, seed=args.seed
        )
    else:
        raise SystemExit(f"unknown engine {args.engine!r}")
    info = {
        "engine": res.engine,
        "objective": objective.value,
        "exact": res.exact,
        "nodes_or_iters": res.nodes_or_iters,
    }
    if res.seed is not None:
        info["seed"] = res.seed
    if objective is solver.Objective.WITH_ENDOWMENTS:
        info["score"] = res.score
    else:
        info["score_count"], info["score_sum_log"] = res.score
    inst_mod.save_allocation(res.allocation, args.output, info)
    print(f"engine={res.engine} exact={_fmt(res.exact)} score={_fmt(res.score)}")
    print(f"owner={res.allocation.owner.tolist()}")
    return 0


def _cmd_bounds(args) -> int:
    inst = inst_mod.load_instance(args.file)
    ratio = welfare.max_value_endowment_ratio(inst)
    print(f"max_value_endowment_ratio={_fmt(float(ratio))}")
    if ratio > 0:
        print(f"z={_fmt(welfare.z_of(inst))}")
    else:
        print("z=undefined (all valuations zero)")
    try:
        print(f"alpha={_fmt(float(welfare.alpha_of(inst)))}")
    except ValueError:
        print("alpha=undefined (all valuations zero)")
    slog = welfare.sum_log_endowments(inst)
    print(f"sum_log_endowments={_fmt(slog)}")
    print(f"dec_bound_precondition={_fmt(slog >= 0)}")
    print(f"every_good_positively_valued={_fmt(welfare.every_good_positively_valued(inst))}")
    return 0


def _cmd_check(args) -> int:
    inst = inst_mod.load_instance(args.file)
    alloc, _ = inst_mod.load_allocation(args.alloc)
    opt_alloc = None
    if args.opt:
        opt_alloc, _ = inst_mod.load_allocation(args.opt)
    report = welfare.welfare_report(inst, alloc, opt_alloc)
    print(f"nash={_fmt(report.nash)}")
    print(f"utilitarian={_fmt(report.utilitarian)}")
    print(f"egalitarian={_fmt(report.egalitarian)}")
    print(f"baseline_nash={_fmt(report.baseline_nash)}")
    if report.marginal_ratio is None:
        print("marginal_ratio=undefined (no optimum reference)")
    else:
        print(f"marginal_ratio={_fmt(report.marginal_ratio)}")
    if args.fairness:
        fr = fair.fairness_report(inst, alloc)
        print(f"ef1={_fmt(fr.ef1)}" + (f" witness={fr.ef1_witness}" if fr.ef1_witness else ""))
        print(f"eref={_fmt(fr.eref)}" + (f" witness={fr.eref_witness}" if fr.eref_witness else ""))
        if fr.band is None:
            print("band=none (no nonzero valuations)")
        else:
            print(f"band=({fr.band[0]},{fr.band[1]})")
        print(f"eref_guaranteed_pairs={list(fr.guaranteed_pairs)}")
        print(f"eref_guaranteed_pairs_hold={[_fmt(h) for h in fr.guaranteed_pairs_hold]}")
    return 0


def _cmd_simulate(args) -> int:
    inst = inst_mod.load_instance(args.file)
    if args.initial == "random":
        initial: inst_mod.Allocation | str = "random"
    elif args.initial == "cen":
        initial = solver.solve_branch_bound(inst, solver.Objective.GOODS_ONLY).allocation
    elif args.initial.startswith("file:"):
        initial, _ = inst_mod.load_allocation(args.initial[5:])
    else:
        raise SystemExit("--initial must be random, cen, or file:PATH")
    cfg = dec.ExchangeConfig(k=args.k, rounds=args.rounds, seed=args.seed, initial=initial)
    trace = dec.simulate(inst, cfg)
    moved = sum(len(rec.moves) for rec in trace.records)
    print(f"rounds={args.rounds} k={args.k} moves={moved} converged={_fmt(trace.converged)}")
    print(f"final_owner={trace.final.owner.tolist()}")
    if args.trace_out:
        dec.write_trace(trace, args.trace_out)
        print(f"trace written to {args.trace_out}")
    return 0


def _parse_int_list(text: str) -> list[int]:
    return [int(tok) for tok in text.split(",") if tok]


def _parse_float_list(text: str) -> list[float]:
    return [float(tok) for tok in text.split(",") if tok]


def _cmd_mc_eref(args) -> int:
    endowments = _parse_int_list(args.endowments)
    bounds = _parse_float_list(args.mg)
    if args.n is not None and args.n != len(endowments):
        raise SystemExit("--n disagrees with --endowments length")
    cfg = fair.MCConfig(tuple(endowments), tuple(bounds), args.trials, args.seed)
    pairs = (
        [tuple(_parse_int_list(args.pair))]
        if args.pair
        else [
            (i, j)
            for i in range(cfg.n)
            for j in range(cfg.n)
            if i != j and cfg.endowments[i] <= cfg.endowments[j]
        ]
    )
    csv_lines = []
    for i, j in pairs:
        if args.mode == "expectation":
            rep = fair.mc_eref_expectation(cfg, i, j)
            print(
                f"pair=({i},{j}) mean_own={_fmt(rep.mean_own)} se_own={_fmt(rep.se_own)} "
                f"mean_other={_fmt(rep.mean_other)} se_other={_fmt(rep.se_other)} "
                f"factor={_fmt(rep.factor)} status_plain={rep.status_plain} "
                f"status_scaled={rep.status_scaled}"
            )
            csv_lines.append(
                f"{i},{j},{rep.mean_own!r},{rep.se_own!r},{rep.mean_other!r},"
                f"{rep.se_other!r},{rep.factor!r},{rep.status_plain},{rep.status_scaled}"
            )
        else:
            rep = fair.mc_eref_probability(cfg, i, j)
            print(
                f"pair=({i},{j}) p_hat={_fmt(rep.p_hat)} se={_fmt(rep.se)} "
                f"bound={_fmt(rep.bound)} status={rep.status}"
            )
            csv_lines.append(f"{i},{j},{rep.p_hat!r},{rep.se!r},{rep.bound!r},{rep.status}")
    if args.csv:
        if args.mode == "expectation":
            head = "i,j,mean_own,se_own,mean_other,se_other,factor,status_plain,status_scaled"
        else:
            head = "i,j,p_hat,se,bound,status"
        Path(args.csv).write_text("\n".join([head] + csv_lines) + "\n")
        print(f"csv written to {args.csv}")
    return 0


def _cmd_sweep(args) -> int:
    cfg = exp.sweep_config_from_json(Path(args.config).read_text())
    raw, agg = exp.run_sweep(cfg, args.output, workers=args.workers)
    print(f"raw={raw}")
    print(f"agg={agg}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="fairdiv", description=__doc__)
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate an instance file")
    p.add_argument("--n", type=int)
    p.add_argument("--m", type=int)
    p.add_argument("--emax", type=int)
    p.add_argument("--total", type=int, default=500)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument(
        "--family",
        default="random",
        choices=["random", "example1", "example2", "thm2", "breakdown"],
    )
    p.add_argument("--eps", type=str, help="small positive rational, e.g. 0.01")
    p.add_argument("--x", type=str, help="family parameter, e.g. 8 or 0.25")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("solve", help="solve an instance for one objective")
    p.add_argument("file")
    p.add_argument("--objective", default="opt", choices=["opt", "cen"])
    p.add_argument("--engine", default="bnb", choices=["oracle", "bnb", "ls"])
    p.add_argument("--restarts", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--timeout-ms", type=float, default=None)
    p.add_argument("--node-limit", type=int, default=solver.DEFAULT_NODE_LIMIT)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("bounds", help="print instance-level bound quantities")
    p.add_argument("file")
    p.set_defaults(func=_cmd_bounds)

    p = sub.add_parser("check", help="welfare (and optional fairness) report")
    p.add_argument("file")
    p.add_argument("--alloc", required=True)
    p.add_argument("--opt", help="allocation file to use as the optimum reference")
    p.add_argument("--fairness", action="store_true")
    p.set_defaults(func=_cmd_check)

    p = sub.add_parser("simulate", help="run the exchange process")
    p.add_argument("file")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--rounds", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--initial", default="random", help="random | cen | file:PATH")
    p.add_argument("--trace-out")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("mc-eref", help="Monte Carlo EREF estimates")
    p.add_argument("--n", type=int)
    p.add_argument("--endowments", required=True, help="comma list, e.g. 1,2,4")
    p.add_argument("--mg", required=True, help="comma list of per-good bounds")
    p.add_argument("--trials", type=int, default=100000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--mode", default="expectation", choices=["expectation", "probability"])
    p.add_argument("--pair", help="restrict to one ordered pair, e.g. 0,2")
    p.add_argument("--csv", help="also write results as CSV")
    p.set_defaults(func=_cmd_mc_eref)

    p = sub.add_parser("sweep", help="run the approximation-ratio sweep")
    p.add_argument("--config", required=True)
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=_cmd_sweep)
    return top


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
