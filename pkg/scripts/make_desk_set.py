"""Generate the shipped desk benchmark set and its cap file.

JSSP instances are Taillard-style (random machine permutations, durations
1-99); RCPSP instances are small ProGen-like networks. Caps are optimum - 1,
where the optimum is found by the solver itself and then the cap is proven
infeasible.

    python3 scripts/make_desk_set.py [datadir]

writes ``datadir/desk`` (20 instances) and ``datadir/carryover`` (12 harder
instances for the rating-carryover experiment).
"""

from __future__ import annotations

import csv
import random
import sys
from pathlib import Path

from fdsmab.bandit import StrategyConfig
from fdsmab.engine import EngineConfig, Limits, Status
from fdsmab.harness import run_one
from fdsmab.instances import JsspInstance, RcpspInstance, format_jssp, format_psplib

# candidates are drawn in order and kept when the proof needs a moderate
# number of branches, so the set is neither trivial nor slow
PER_KIND = 10
BRANCH_BAND = (400, 4000)
JSSP_SIZES = [(7, 7), (8, 8)]
RCPSP_SIZES = [18, 22, 26]
CARRYOVER_PER_KIND = 6
CARRYOVER_BAND = (1000, 20000)


def make_jssp(n: int, m: int, seed: int) -> JsspInstance:
    rng = random.Random(f"desk-jssp:{n}x{m}:{seed}")
    jobs = []
    for _ in range(n):
        order = list(range(m))
        rng.shuffle(order)
        jobs.append([(k, rng.randint(1, 99)) for k in order])
    return JsspInstance(jobs, m, f"ta{n}x{m}_{seed}")


def make_rcpsp(n_real: int, seed: int, n_res: int = 4) -> RcpspInstance:
    rng = random.Random(f"desk-rcpsp:{n_real}:{seed}")
    n = n_real + 2
    caps = [10] * n_res
    durations = [0] + [rng.randint(1, 10) for _ in range(n_real)] + [0]
    demands = [[0] * n_res]
    for _ in range(n_real):
        row = [0] * n_res
        for r in rng.sample(range(n_res), rng.randint(1, 3)):
            row[r] = rng.randint(2, 8)
        demands.append(row)
    demands.append([0] * n_res)
    succ: list[list[int]] = [[] for _ in range(n)]
    has_pred = [False] * n
    for i in range(1, n_real + 1):
        for j in range(i + 1, min(n_real, i + 8) + 1):
            if rng.random() < 0.15:
                succ[i].append(j)
                has_pred[j] = True
    for i in range(1, n_real + 1):
        if not has_pred[i]:
            succ[0].append(i)
        if not succ[i]:
            succ[i].append(n - 1)
    return RcpspInstance(durations, demands, succ, caps, f"pg{n_real}_{seed}")


def optimum_cap(inst, time_limit: float = 30.0):
    strat, eng = StrategyConfig(), EngineConfig()
    _, res, _ = run_one(inst, None, strat, eng, 0, Limits(time=time_limit))
    if res.status is not Status.SOLUTION:
        return None
    opt = res.objective
    _, proof, _ = run_one(inst, opt - 1, strat, eng, 0, Limits(time=time_limit))
    if proof.status is not Status.INFEASIBLE:
        return None
    return opt - 1, proof.branches


def no_restart_branches(inst, cap: int, time_limit: float = 60.0):
    """Branches of one proof with restarts and nogoods off (the carryover setting)."""
    eng = EngineConfig(restarts=False, use_nogoods=False)
    _, res, _ = run_one(inst, cap, StrategyConfig(), eng, 0, Limits(time=time_limit))
    return res.branches if res.status is Status.INFEASIBLE else None


def build_set(out: Path, per_kind: int, band, first_seed: int, carryover: bool) -> None:
    out.mkdir(parents=True, exist_ok=True)
    rows = []
    for kind, sizes in (("jssp", JSSP_SIZES), ("rcpsp", RCPSP_SIZES)):
        kept, seed = 0, first_seed
        while kept < per_kind:
            size = sizes[seed % len(sizes)]
            inst = make_jssp(*size, seed) if kind == "jssp" else make_rcpsp(size, seed)
            seed += 1
            got = optimum_cap(inst)
            if got is None:
                continue
            cap, branches = got
            if carryover:
                branches = no_restart_branches(inst, cap)
            if branches is None or not band[0] <= branches <= band[1]:
                continue
            if kind == "jssp":
                (out / f"{inst.name}.txt").write_text(format_jssp(inst))
            else:
                (out / f"{inst.name}.sm").write_text(format_psplib(inst))
            rows.append((inst.name, cap))
            kept += 1
            print(f"{out.name}/{inst.name}: cap={cap} branches={branches}", flush=True)
    with open(out / "caps.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["instance", "cap"])
        w.writerows(rows)


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    root = Path(argv[0] if argv else "src/fdsmab/data")
    build_set(root / "desk", PER_KIND, BRANCH_BAND, 0, carryover=False)
    # harder instances for the carryover experiment, measured without restarts
    build_set(root / "carryover", CARRYOVER_PER_KIND, CARRYOVER_BAND, 100, carryover=True)
    return 0


if __name__ == "__main__":
    sys.exit(main())
