"""Command-line entry point: ``fdsmab <subcommand> ...``."""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from importlib import resources
from pathlib import Path

from . import harness, plots
from .bandit import Policy, StrategyConfig, load_ratings, save_ratings
from .engine import Criterion, EngineConfig, Limits
from .instances import ParseError, load_instance, write_results, read_results

log = logging.getLogger("fdsmab")

BOOL = argparse.BooleanOptionalAction


def desk_dir() -> Path:
    return Path(str(resources.files("fdsmab") / "data" / "desk"))


def read_caps(path) -> dict[str, int]:
    """Cap file: CSV with ``instance,cap`` columns (cap is typically optimum - 1)."""
    with open(path, newline="") as fh:
        return {row["instance"]: int(row["cap"]) for row in csv.DictReader(fh)}


def desk_instances(kind: str | None = None) -> list[tuple]:
    """Shipped desk set as ``(instance, cap)`` pairs, optionally filtered by kind."""
    d = desk_dir()
    caps = read_caps(d / "caps.csv")
    out = []
    for name in sorted(caps):
        path = next(p for p in d.iterdir() if p.stem == name and p.suffix != ".csv")
        k = "rcpsp" if path.suffix == ".sm" else "jssp"
        if kind is None or kind == k:
            out.append((load_instance(path, k), caps[name]))
    return out


# --- argument groups ---------------------------------------------------------

def _add_config_args(p: argparse.ArgumentParser) -> None:
    s, e = StrategyConfig(), EngineConfig()
    g = p.add_argument_group("strategy")
    g.add_argument("--strategy", choices=[x.value for x in Policy], default=s.policy.value)
    g.add_argument("--epsilon", type=float, default=s.epsilon)
    g.add_argument("--epsilon-decay", type=float, default=s.epsilon_decay)
    g.add_argument("--tau", type=float, default=s.tau)
    g.add_argument("--rollback", action=BOOL, default=s.rollback)
    g.add_argument("--initial-rating", type=float, default=s.initial_rating)
    g.add_argument("--rating-average-length", type=int, default=s.rating_average_length)
    g.add_argument("--rating-average-comparison", action=BOOL, default=s.rating_average_comparison)
    g.add_argument("--both-fail-reward-factor", type=float, default=s.both_fail_reward_factor)
    g.add_argument("--thompson-sigma0", type=float, default=s.thompson_sigma0)
    g.add_argument("--freeze-ratings", action=BOOL, default=s.freeze_ratings)
    g.add_argument("--sfds-mode", action=BOOL, default=s.sfds_mode)
    g = p.add_argument_group("engine")
    g.add_argument("--length-step-ratio", type=float, default=e.length_step_ratio)
    g.add_argument("--uniform-choice-step", action=BOOL, default=e.uniform_choice_step)
    g.add_argument("--max-initial-choices", type=int, default=e.max_initial_choices_per_variable)
    g.add_argument("--restarts", action=BOOL, default=e.restarts)
    g.add_argument("--initial-restart-limit", type=float, default=e.initial_restart_limit)
    g.add_argument("--restart-growth-factor", type=float, default=e.restart_growth_factor)
    g.add_argument("--use-nogoods", action=BOOL, default=e.use_nogoods)
    g.add_argument("--strong-branching-size", type=int, default=e.strong_branching_size)
    g.add_argument("--strong-branching-depth", type=int, default=e.strong_branching_depth)
    g.add_argument("--strong-branching-criterion", choices=[c.value for c in Criterion],
                   default=e.strong_branching_criterion.value)
    g.add_argument("--max-counter-after-restart", type=int, default=None)
    g.add_argument("--max-counter-after-solution", type=int, default=None)
    g = p.add_argument_group("run")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--time-limit", type=float, default=None)
    g.add_argument("--branch-limit", type=int, default=None)


def configs_from_args(a) -> tuple[StrategyConfig, EngineConfig, Limits]:
    strat = StrategyConfig(
        policy=a.strategy, epsilon=a.epsilon, epsilon_decay=a.epsilon_decay, tau=a.tau,
        rollback=a.rollback, rating_average_length=a.rating_average_length,
        initial_rating=a.initial_rating, both_fail_reward_factor=a.both_fail_reward_factor,
        rating_average_comparison=a.rating_average_comparison,
        freeze_ratings=a.freeze_ratings, thompson_sigma0=a.thompson_sigma0,
        sfds_mode=a.sfds_mode)
    eng = EngineConfig(
        length_step_ratio=a.length_step_ratio, uniform_choice_step=a.uniform_choice_step,
        max_initial_choices_per_variable=a.max_initial_choices, restarts=a.restarts,
        initial_restart_limit=a.initial_restart_limit,
        restart_growth_factor=a.restart_growth_factor, use_nogoods=a.use_nogoods,
        strong_branching_size=a.strong_branching_size,
        strong_branching_depth=a.strong_branching_depth,
        strong_branching_criterion=a.strong_branching_criterion,
        max_counter_after_restart=a.max_counter_after_restart,
        max_counter_after_solution=a.max_counter_after_solution)
    return strat, eng, Limits(time=a.time_limit, branches=a.branch_limit)


def _instance_args(p, multi: bool = False) -> None:
    p.add_argument("instances" if multi else "instance", nargs="*" if multi else None,
                   help="instance file(s); '-' reads stdin" + ("; default: shipped desk set" if multi else ""))
    p.add_argument("--kind", choices=["jssp", "rcpsp"], default=None,
                   help="force the instance format (default: guess from content)")


def _cap_args(p) -> None:
    p.add_argument("--cap", type=int, default=None, help="makespan upper bound to inject")
    p.add_argument("--caps", default=None, help="CSV with instance,cap columns")


def _resolve_caps(a, insts) -> list[tuple]:
    table = read_caps(a.caps) if a.caps else {}
    out = []
    for inst in insts:
        cap = a.cap if a.cap is not None else table.get(inst.name)
        if cap is None:
            raise SystemExit(f"error: no cap for instance {inst.name!r} (use --cap or --caps)")
        out.append((inst, cap))
    return out


def _load_many(a) -> list[tuple]:
    if not a.instances:
        pairs = desk_instances(a.kind)
        if a.cap is not None or a.caps:
            return _resolve_caps(a, [i for i, _ in pairs])
        return pairs
    return _resolve_caps(a, [_load(p, a.kind) for p in a.instances])


def _load(path, kind):
    try:
        return load_instance(path, kind)
    except ParseError as e:
        raise SystemExit(f"error: {path}: {e}") from e


def _seeds(text: str) -> list[int]:
    seeds = [int(s) for s in text.split(",") if s.strip()]
    if not seeds:
        raise SystemExit("error: seed list is empty")
    return seeds


# --- subcommands -------------------------------------------------------------

def do_prove(a) -> int:
    inst = _load(a.instance, a.kind)
    (inst, cap), = _resolve_caps(a, [inst])
    strat, eng, limits = configs_from_args(a)
    ratings = load_ratings(a.ratings_in) if a.ratings_in else None
    rec, res, solver = harness.run_one(inst, cap, strat, eng, a.seed, limits, ratings)
    if a.ratings_out:
        save_ratings(solver.export_ratings(), a.ratings_out)
    if a.output:
        write_results([rec], a.output)
    print(f"{rec.instance}\tcap={cap}\t{rec.status}\tobjective={rec.objective}\t"
          f"branches={rec.branches}\trestarts={rec.restarts}\telapsed={rec.elapsed:.3f}s")
    return 0


def do_lb_search(a) -> int:
    inst = _load(a.instance, a.kind)
    strat, eng, _ = configs_from_args(a)
    res = harness.cmd_lb_search(inst, a.time_limit or 0.0, strat, eng, a.seed)
    if a.output:
        write_results(res.proofs, a.output)
    tag = " (optimal)" if res.optimal else ""
    print(f"{inst.name}\tinitial={res.initial}\tlower_bound={res.bound}{tag}\tproofs={len(res.proofs)}")
    return 0


def do_carryover(a) -> int:
    strat, eng, limits = configs_from_args(a)
    results = []
    for inst, cap in _load_many(a):
        r = harness.cmd_carryover(inst, cap, a.runs, strat, eng, a.seed, limits,
                                  freeze_after_first=a.freeze_after_first)
        results.append(r)
        print(inst.name, " ".join(f"{x:.3f}" for x in r.ratios), "" if r.complete else "(partial)")
    out = Path(a.output or "carryover.csv")
    with open(out, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["instance", "run", "branches", "ratio"])
        for r in results:
            for i, (b, q) in enumerate(zip(r.branches, r.ratios), 1):
                w.writerow([r.instance, i, b, repr(q)])
    fig = plots.carryover_figure(results, out.with_suffix(".png"))
    print(f"wrote {out} and {fig}")
    return 0 if all(r.complete for r in results) else 3


def do_sweep(a) -> int:
    strat, eng, limits = configs_from_args(a)
    try:
        grid = harness.parse_grid(a.grid)
    except ValueError as e:
        raise SystemExit(f"error: {e}") from e
    sweep = harness.cmd_sweep(grid, _load_many(a), _seeds(a.seeds), strat, eng, limits,
                              objective=a.objective)
    out = Path(a.output or "sweep.csv")
    names = sorted(grid)
    with open(out, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(names + ["branches", "elapsed", "unsolved", "runs"])
        for c in sweep.cells:
            w.writerow([c.params[n] for n in names]
                       + [c.branches, repr(c.elapsed), c.unsolved, len(c.records)])
    write_results([r for c in sweep.cells for r in c.records], out.with_name(out.stem + "_runs.csv"))
    fig = plots.sweep_figure(sweep, out.with_suffix(".png"))
    print(f"best: {json.dumps(sweep.best.params)} branches={sweep.best.branches}")
    print(f"wrote {out} and {fig}")
    return 0


def do_compare(a) -> int:
    try:
        rep = harness.cmd_compare(read_results(a.results_a), read_results(a.results_b), a.metric)
    except harness.ComparisonError as e:
        raise SystemExit(f"error: {e}") from e
    print(f"metric={rep['metric']} n={rep['n']} mean_diff={rep['mean_diff']:.6g}")
    print(f"wilcoxon W+={rep['wilcoxon_w']:g} p={rep['wilcoxon_p']:.4g} {rep['wilcoxon_flag']}")
    print(f"paired t={rep['t_stat']:.4g} p={rep['t_p']:.4g} {rep['t_flag']}")
    if a.output:
        out = Path(a.output)
        with open(out, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["instance", "mean_diff"])
            for k, v in rep["per_instance"].items():
                w.writerow([k, repr(v)])
        plots.compare_figure(rep, out.with_suffix(".png"))
    return 0


def do_oracle_check(a) -> int:
    res = harness.oracle_check(a.count, seeds=_seeds(a.seeds))
    for m in res.mismatches:
        print("MISMATCH", *m)
    print(f"checked={res.checked} mismatches={len(res.mismatches)}")
    return 1 if res.mismatches else 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fdsmab", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("prove", help="prove or refute a makespan cap")
    _instance_args(sp)
    _cap_args(sp)
    _add_config_args(sp)
    sp.add_argument("--ratings-in", default=None, help="JSON rating table to start from")
    sp.add_argument("--ratings-out", default=None, help="write the final rating table here")
    sp.add_argument("--output", default=None, help="result file (.csv, .tsv or .jsonl)")
    sp.set_defaults(func=do_prove)

    sp = sub.add_parser("lb-search", help="raise a lower bound by proving caps infeasible")
    _instance_args(sp)
    _add_config_args(sp)
    sp.add_argument("--output", default=None)
    sp.set_defaults(func=do_lb_search)

    sp = sub.add_parser("carryover", help="repeat proofs carrying ratings between runs")
    _instance_args(sp, multi=True)
    _cap_args(sp)
    _add_config_args(sp)
    sp.add_argument("--runs", type=int, default=10)
    sp.add_argument("--freeze-after-first", action="store_true",
                    help="freeze ratings in runs 2..k")
    sp.add_argument("--output", default=None, help="CSV path; the figure goes next to it")
    sp.set_defaults(func=do_carryover)

    sp = sub.add_parser("sweep", help="grid sweep over parameters")
    _instance_args(sp, multi=True)
    _cap_args(sp)
    _add_config_args(sp)
    sp.add_argument("--grid", default="", help="e.g. 'length-step-ratio=0.5,0.7;epsilon=0,0.1'")
    sp.add_argument("--seeds", default="0")
    sp.add_argument("--objective", choices=["branches", "elapsed"], default="branches")
    sp.add_argument("--output", default=None, help="CSV path; the figure goes next to it")
    sp.set_defaults(func=do_sweep)

    sp = sub.add_parser("compare", help="paired statistical comparison of two result files")
    sp.add_argument("results_a")
    sp.add_argument("results_b")
    sp.add_argument("--metric", choices=["elapsed", "branches"], default="elapsed")
    sp.add_argument("--output", default=None, help="CSV of per-instance differences")
    sp.set_defaults(func=do_compare)

    sp = sub.add_parser("oracle-check", help="cross-check the engine against the oracle")
    sp.add_argument("--count", type=int, default=50)
    sp.add_argument("--seeds", default="0,1,2")
    sp.set_defaults(func=do_oracle_check)
    return p


def main(argv=None) -> int:
    a = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if a.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return a.func(a)
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
