"""Exhaustive reference solver for tiny instances.

Shares nothing with the search engine except the instance types: JSSP is
solved by memoised enumeration of dispatch sequences (every semi-active
schedule arises from one), RCPSP by enumerating precedence-feasible activity
lists through the serial schedule generation scheme (which reaches every
active schedule, hence an optimal one).
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from functools import lru_cache

from .instances import JsspInstance, RcpspInstance

MAX_SIZE = 10


class OracleRefused(ValueError):
    """Instance exceeds the oracle size guard."""


@dataclass
class OracleResult:
    optimum: int | None
    nodes: int


def _size(inst) -> int:
    if isinstance(inst, JsspInstance):
        return inst.n_ops
    return inst.n_real


def _guard(inst) -> None:
    if _size(inst) > MAX_SIZE:
        raise OracleRefused(f"instance has {_size(inst)} activities, oracle limit is {MAX_SIZE}")


def _jssp_optimum(inst: JsspInstance) -> OracleResult:
    jobs = [list(j) for j in inst.jobs]
    nodes = 0

    @lru_cache(maxsize=None)
    def best(progress: tuple, job_ready: tuple, mach_ready: tuple) -> int:
        nonlocal nodes
        nodes += 1
        done = True
        result = None
        for j, k in enumerate(progress):
            if k == len(jobs[j]):
                continue
            done = False
            m, d = jobs[j][k]
            start = max(job_ready[j], mach_ready[m]) if d else job_ready[j]
            end = start + d
            if d == 0:
                # zero-length ops occupy nothing
                mr = mach_ready
            else:
                mr = mach_ready[:m] + (end,) + mach_ready[m + 1:]
            sub = best(progress[:j] + (k + 1,) + progress[j + 1:],
                       job_ready[:j] + (end,) + job_ready[j + 1:], mr)
            sub = max(sub, end)
            if result is None or sub < result:
                result = sub
        return 0 if done else result

    n = len(jobs)
    opt = best((0,) * n, (0,) * n, (0,) * inst.n_machines)
    return OracleResult(opt, nodes)


def _rcpsp_optimum(inst: RcpspInstance) -> OracleResult:
    n = inst.n_jobs
    preds = [[] for _ in range(n)]
    for j, succ in enumerate(inst.successors):
        for s in succ:
            preds[s].append(j)
    R = len(inst.capacities)
    dur, dem, caps = inst.durations, inst.demands, inst.capacities
    horizon = sum(dur)
    best = [None]
    nodes = [0]

    def fits(usage, t, j) -> bool:
        for tt in range(t, t + dur[j]):
            for r in range(R):
                if usage[tt][r] + dem[j][r] > caps[r]:
                    return False
        return True

    def rec(scheduled: list, finish: list, usage: list, makespan: int) -> None:
        nodes[0] += 1
        if best[0] is not None and makespan >= best[0]:
            return
        if len(scheduled) == n:
            best[0] = makespan
            return
        done = set(scheduled)
        for j in range(n):
            if j in done or any(p not in done for p in preds[j]):
                continue
            t = max((finish[p] for p in preds[j]), default=0)
            while not fits(usage, t, j):
                t += 1
            for tt in range(t, t + dur[j]):
                for r in range(R):
                    usage[tt][r] += dem[j][r]
            finish[j] = t + dur[j]
            scheduled.append(j)
            rec(scheduled, finish, usage, max(makespan, t + dur[j]))
            scheduled.pop()
            for tt in range(t, t + dur[j]):
                for r in range(R):
                    usage[tt][r] -= dem[j][r]
            finish[j] = 0

    for j in range(n):
        for r in range(R):
            if dem[j][r] > caps[r] and dur[j] > 0:
                return OracleResult(None, 0)
    usage = [[0] * R for _ in range(2 * horizon + 1)]
    rec([], [0] * n, usage, 0)
    return OracleResult(best[0], nodes[0])


def solve_exhaustive(inst) -> OracleResult:
    _guard(inst)
    if isinstance(inst, JsspInstance):
        return _jssp_optimum(inst)
    return _rcpsp_optimum(inst)


def brute_force_optimum(inst) -> int:
    res = solve_exhaustive(inst)
    if res.optimum is None:
        raise ValueError("instance has no feasible schedule")
    return res.optimum


def brute_force_feasible(inst, cap: int) -> bool:
    res = solve_exhaustive(inst)
    return res.optimum is not None and res.optimum <= cap


def random_tiny_instance(kind: str, seed: int):
    """Deterministic tiny instance: JSSP up to 3x3 (durations 1-9) or RCPSP with
    up to 6 real activities and up to 2 resources."""
    rng = random.Random(f"{kind}:{seed}")
    if kind == "jssp":
        n_jobs = rng.randint(2, 3)
        n_mach = rng.randint(2, 3)
        jobs = []
        for _ in range(n_jobs):
            order = list(range(n_mach))
            rng.shuffle(order)
            jobs.append([(m, rng.randint(1, 9)) for m in order])
        return JsspInstance(jobs, n_mach, f"tiny-jssp-{seed}")
    if kind == "rcpsp":
        n_real = rng.randint(3, 6)
        n_res = rng.randint(1, 2)
        caps = [rng.randint(2, 4) for _ in range(n_res)]
        n = n_real + 2
        durations = [0] + [rng.randint(1, 6) for _ in range(n_real)] + [0]
        demands = [[0] * n_res]
        for _ in range(n_real):
            row = [rng.randint(0, c) for c in caps]
            if not any(row):
                row[rng.randrange(n_res)] = 1
            demands.append(row)
        demands.append([0] * n_res)
        successors: list[list[int]] = [[] for _ in range(n)]
        has_pred = [False] * n
        for i in range(1, n_real + 1):
            for j in range(i + 1, n_real + 1):
                if rng.random() < 0.3:
                    successors[i].append(j)
                    has_pred[j] = True
        for i in range(1, n_real + 1):
            if not has_pred[i]:
                successors[0].append(i)
            if not successors[i]:
                successors[i].append(n - 1)
        return RcpspInstance(durations, demands, successors, caps, f"tiny-rcpsp-{seed}")
    raise ValueError(f"unknown instance kind {kind!r}")
