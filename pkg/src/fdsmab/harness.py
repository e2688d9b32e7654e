"""Experiment drivers behind the command-line subcommands.

Every run is fully determined by (instance, cap, strategy config, engine
config, seed). Seeds feed Python's ``random.Random`` (MT19937); OS entropy is
never consulted, so result files are reproducible apart from the ``elapsed``
column.
"""

from __future__ import annotations

import dataclasses
import itertools
import logging
import time
from collections import defaultdict
from dataclasses import dataclass, field, replace

from . import bandit
from .bandit import StrategyConfig
from .engine import EngineConfig, FDSSolver, Limits, SolveResult, Status
from .instances import RunRecord, build_model, config_fingerprint, lower_bound_heuristic
from .oracle import random_tiny_instance, solve_exhaustive
from .stats import compare_paired

log = logging.getLogger(__name__)

STRATEGY_FIELDS = {f.name for f in dataclasses.fields(StrategyConfig)}
ENGINE_FIELDS = {f.name for f in dataclasses.fields(EngineConfig)}


class ComparisonError(ValueError):
    pass


def strategy_label(strategy: StrategyConfig) -> str:
    label = strategy.policy.value
    if strategy.policy.is_hybrid:
        label += f"@{strategy.epsilon:g}"
        if strategy.rollback:
            label += "+R"
    return label


def run_one(inst, cap, strategy: StrategyConfig, engine: EngineConfig, seed: int,
            limits: Limits, ratings=None) -> tuple[RunRecord, SolveResult, FDSSolver]:
    model = build_model(inst, cap)
    solver = FDSSolver(model, strategy, engine, seed, limits, ratings)
    res = solver.solve()
    rec = RunRecord(
        instance=inst.name, strategy=strategy_label(strategy), seed=seed,
        fingerprint=config_fingerprint(strategy, engine), status=res.status.value,
        branches=res.branches, restarts=res.restarts, rollbacks=res.stats["rollbacks"],
        elapsed=res.elapsed, proven_bound=res.proven_bound, objective=res.objective, cap=cap)
    return rec, res, solver


def cmd_prove(inst, cap: int, strategy: StrategyConfig, engine: EngineConfig,
              seed: int, limits: Limits) -> RunRecord:
    return run_one(inst, cap, strategy, engine, seed, limits)[0]


@dataclass
class LbResult:
    bound: int
    initial: int
    proofs: list[RunRecord] = field(default_factory=list)
    optimal: bool = False


def cmd_lb_search(inst, time_limit: float, strategy: StrategyConfig, engine: EngineConfig,
                  seed: int) -> LbResult:
    """Raise the lower bound one unit at a time by proving caps infeasible."""
    start = lower_bound_heuristic(inst)
    out = LbResult(bound=start, initial=start)
    deadline = time.perf_counter() + time_limit
    cand = start
    while True:
        left = deadline - time.perf_counter()
        if left <= 0:
            return out
        rec, res, _ = run_one(inst, cand, strategy, engine, seed, Limits(time=left))
        out.proofs.append(rec)
        if res.status is Status.INFEASIBLE:
            out.bound = cand + 1
            cand += 1
        elif res.status is Status.SOLUTION:
            out.bound = res.objective
            out.optimal = True
            return out
        else:
            return out


@dataclass
class CarryoverResult:
    instance: str
    branches: list[int]
    records: list[RunRecord]
    complete: bool = True

    @property
    def ratios(self) -> list[float]:
        b1 = self.branches[0] if self.branches else 0
        return [b / b1 if b1 else float("nan") for b in self.branches]


def carryover_engine(engine: EngineConfig) -> EngineConfig:
    return replace(engine, restarts=False, use_nogoods=False)


def cmd_carryover(inst, cap: int, runs: int, strategy: StrategyConfig, engine: EngineConfig,
                  seed: int, limits: Limits, freeze_after_first: bool = False) -> CarryoverResult:
    """Repeat a proof ``runs`` times, each run starting from the previous run's ratings."""
    if runs < 2:
        raise ValueError("carryover needs at least two runs")
    eng = carryover_engine(engine)
    ratings = None
    out = CarryoverResult(inst.name, [], [])
    for i in range(runs):
        strat = strategy
        if freeze_after_first and i > 0:
            strat = replace(strategy, freeze_ratings=True)
        rec, res, solver = run_one(inst, cap, strat, eng, seed + i, limits, ratings)
        out.records.append(rec)
        out.branches.append(res.branches)
        if res.status is Status.LIMIT:
            log.warning("carryover on %s: run %d hit its limit, stopping", inst.name, i + 1)
            out.complete = False
            break
        ratings = solver.export_ratings()
    return out


def parse_grid(spec: str) -> dict[str, list]:
    """``"length-step-ratio=0.5,0.7;epsilon=0,0.1"`` -> ``{name: [values]}``."""
    grid: dict[str, list] = {}
    for part in filter(None, (p.strip() for p in (spec or "").split(";"))):
        key, _, vals = part.partition("=")
        key = key.strip().replace("-", "_")
        if key not in STRATEGY_FIELDS and key not in ENGINE_FIELDS:
            raise ValueError(f"unknown sweep parameter {key!r}")
        grid[key] = [_parse_value(v.strip()) for v in vals.split(",") if v.strip()]
    return grid


def _parse_value(v: str):
    low = v.lower()
    if low in ("true", "false"):
        return low == "true"
    for cast in (int, float):
        try:
            return cast(v)
        except ValueError:
            pass
    return v


def apply_params(strategy: StrategyConfig, engine: EngineConfig, params: dict):
    s = {k: v for k, v in params.items() if k in STRATEGY_FIELDS}
    e = {k: v for k, v in params.items() if k in ENGINE_FIELDS}
    return replace(strategy, **s), replace(engine, **e)


@dataclass
class SweepCell:
    params: dict
    branches: int = 0
    elapsed: float = 0.0
    unsolved: int = 0
    records: list[RunRecord] = field(default_factory=list)


@dataclass
class SweepResult:
    cells: list[SweepCell]
    objective: str = "branches"

    @property
    def best(self) -> SweepCell:
        key = (lambda c: (c.unsolved, c.branches)) if self.objective == "branches" else \
              (lambda c: (c.unsolved, c.elapsed))
        return min(self.cells, key=key)


def cmd_sweep(grid: dict[str, list], instances, seeds, strategy: StrategyConfig,
              engine: EngineConfig, limits: Limits, objective: str = "branches") -> SweepResult:
    """Evaluate the Cartesian product of ``grid`` on ``(instance, cap)`` pairs."""
    names = sorted(grid)
    combos = [dict(zip(names, vals)) for vals in itertools.product(*(grid[n] for n in names))]
    cells = []
    for params in combos:
        strat, eng = apply_params(strategy, engine, params)
        cell = SweepCell(params)
        for inst, cap in instances:
            for seed in seeds:
                rec, res, _ = run_one(inst, cap, strat, eng, seed, limits)
                cell.records.append(rec)
                cell.branches += res.branches
                cell.elapsed += res.elapsed
                cell.unsolved += res.status is Status.LIMIT
        cells.append(cell)
    return SweepResult(cells, objective)


def per_instance_means(records, metric: str) -> dict[str, float]:
    acc = defaultdict(list)
    for r in records:
        acc[r.instance].append(float(getattr(r, metric)))
    return {k: sum(v) / len(v) for k, v in acc.items()}


def cmd_compare(records_a, records_b, metric: str = "elapsed") -> dict:
    """Paired comparison of two result sets over their per-instance seed means."""
    a = per_instance_means(records_a, metric)
    b = per_instance_means(records_b, metric)
    if set(a) != set(b):
        only_a = sorted(set(a) - set(b))
        only_b = sorted(set(b) - set(a))
        raise ComparisonError(f"instance keys differ: only in A {only_a}, only in B {only_b}")
    keys = sorted(a)
    cmp = compare_paired([a[k] for k in keys], [b[k] for k in keys])
    return {
        "metric": metric, "n": cmp.n, "mean_diff": cmp.mean_diff,
        "wilcoxon_w": cmp.wilcoxon_w, "wilcoxon_p": cmp.wilcoxon_p,
        "t_stat": cmp.t_stat, "t_p": cmp.t_p,
        "wilcoxon_flag": cmp.flags["wilcoxon"], "t_flag": cmp.flags["t"],
        "per_instance": {k: a[k] - b[k] for k in keys},
    }


@dataclass
class OracleCheck:
    checked: int = 0
    mismatches: list = field(default_factory=list)


def oracle_check(count: int, kinds=("jssp", "rcpsp"), policies=("greedy", "b-greedy", "ucb1"),
                 seeds=(0, 1, 2), engine: EngineConfig | None = None, first_seed: int = 0) -> OracleCheck:
    """Compare engine verdicts at cap = optimum and optimum - 1 with the oracle."""
    engine = engine or EngineConfig()
    out = OracleCheck()
    for kind in kinds:
        for k in range(first_seed, first_seed + count):
            inst = random_tiny_instance(kind, k)
            opt = solve_exhaustive(inst).optimum
            for pol in policies:
                strat = StrategyConfig(policy=pol)
                for seed in seeds:
                    _, hi, _ = run_one(inst, opt, strat, engine, seed, Limits())
                    _, lo, _ = run_one(inst, opt - 1, strat, engine, seed, Limits())
                    out.checked += 1
                    if not (hi.status is Status.SOLUTION and hi.objective == opt
                            and lo.status is Status.INFEASIBLE):
                        out.mismatches.append((inst.name, pol, seed, opt, hi.status.value,
                                               hi.objective, lo.status.value))
    return out


__all__ = [
    "CarryoverResult", "ComparisonError", "LbResult", "OracleCheck", "SweepCell", "SweepResult",
    "apply_params", "bandit", "cmd_carryover", "cmd_compare", "cmd_lb_search", "cmd_prove",
    "cmd_sweep", "oracle_check", "parse_grid", "run_one", "strategy_label",
]
