"""Failure-directed search with bandit choice selection.

``FDSSolver`` runs the search loop: tree expansion (select, rotate, propagate
the left branch), backtracking (re-expand right branches), geometric restarts
with nogood recording, strong branching near the root, choice rollback for
exploratory picks, and a SetTimes fallback when every choice is decided.
"""

from __future__ import annotations

import enum
import math
import random
import time
from dataclasses import asdict, dataclass, field

from . import bandit
from .bandit import DepthAverages, Policy, StrategyConfig
from .choices import Choice, generate_initial_choices, generate_more_choices, rotate_branches
from .model import Model
from .propagation import FAIL, DomainStore, Propagator, local_rating


class Status(str, enum.Enum):
    INFEASIBLE = "Infeasible"
    SOLUTION = "SolutionFound"
    LIMIT = "LimitReached"


class Criterion(str, enum.Enum):
    LEFT = "left"
    RIGHT = "right"
    BOTH = "both"


@dataclass
class EngineConfig:
    length_step_ratio: float = 0.7
    uniform_choice_step: bool = True
    max_initial_choices_per_variable: int | None = 20
    restarts: bool = True
    initial_restart_limit: float = 100.0
    restart_growth_factor: float = 1.15
    use_nogoods: bool = True
    strong_branching_size: int = 8
    strong_branching_depth: int = 4
    strong_branching_criterion: Criterion = Criterion.LEFT
    max_counter_after_restart: int | None = None
    max_counter_after_solution: int | None = None
    reset_restarts_after_solution: bool = False

    def __post_init__(self):
        self.strong_branching_criterion = Criterion(self.strong_branching_criterion)
        if self.initial_restart_limit <= 0 or self.restart_growth_factor < 1.0:
            raise ValueError("restart limit must be positive and growth factor >= 1")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["strong_branching_criterion"] = self.strong_branching_criterion.value
        return d


@dataclass
class Limits:
    time: float | None = None
    branches: int | None = None


@dataclass
class SolveResult:
    status: Status
    objective: int | None = None
    branches: int = 0
    restarts: int = 0
    proven_bound: int | None = None
    elapsed: float = 0.0
    solution: list[int] | None = None
    stats: dict = field(default_factory=dict)

    @property
    def feasible(self) -> bool | None:
        if self.status is Status.LIMIT:
            return None
        return self.status is Status.SOLUTION


class _Entry:
    __slots__ = ("choice", "left", "mark", "failed")

    def __init__(self, choice: Choice, left: bool, mark: int, failed: bool):
        self.choice = choice
        self.left = left
        self.mark = mark
        self.failed = failed


class _LimitHit(Exception):
    pass


def restart_limit(fl: float) -> int:
    """Fail count that triggers a restart; absorbs float drift of the product."""
    return math.ceil(fl - 1e-9)


def negate(lit):
    v, p, le = lit
    return (v, p, not le)


def nogoods_from_stack(literals_with_sides) -> list[list[tuple]]:
    """Nogood clauses for a restart, from ``[(literal, is_left), ...]`` bottom to top.

    The top entry's subtree is fully explored when a restart fires, so if it
    is a left (first-explored) decision we learn ``prior decisions => not top``.
    Deeper left decisions still have live subtrees and yield nothing.
    """
    if not literals_with_sides:
        return []
    top, top_left = literals_with_sides[-1]
    if not top_left:
        return []
    prior = [lit for lit, _ in literals_with_sides[:-1]]
    return [[negate(l) for l in prior] + [negate(top)]]


class FDSSolver:
    def __init__(self, model: Model, strategy: StrategyConfig | None = None,
                 engine: EngineConfig | None = None, seed: int = 0,
                 limits: Limits | None = None, ratings: dict | None = None):
        self.model = model
        self.strategy = strategy or StrategyConfig()
        self.config = engine or EngineConfig()
        self.limits = limits or Limits()
        self.rng = random.Random(seed)
        self.prop = Propagator(model)
        self.store: DomainStore = self.prop.new_store()
        self.pool: list[Choice] = []
        self.keys: set[tuple[int, int]] = set()
        self.averages = DepthAverages()
        self.epsilon = self.strategy.epsilon
        self.ratings_in = ratings
        self.unknown_rating_keys = 0
        self.stack: list[_Entry] = []
        self.selections = 0
        self.best: int | None = None
        self.best_solution: list[int] | None = None
        self.stats = dict(branches=0, restarts=0, fails=0, exploratory=0, rollbacks=0,
                          rollback_probes=0, sb_probes=0, solutions=0,
                          restart_fail_counts=[], nogoods=0)
        self._deadline = None
        self._tick = 0

    # -- helpers --------------------------------------------------------------
    def _add_choices(self, choices) -> None:
        for c in choices:
            if c.key in self.keys:
                continue
            c.index = len(self.pool)
            self.keys.add(c.key)
            self.pool.append(c)

    def _check_limits(self) -> None:
        lim = self.limits.branches
        if lim is not None and self.stats["branches"] >= lim:
            raise _LimitHit
        if self._deadline is not None:
            self._tick += 1
            if self._tick % 16 == 0 and time.perf_counter() >= self._deadline:
                raise _LimitHit

    def _update(self, choice: Choice, left: bool, out: int) -> float:
        r = local_rating(out, self.strategy.sfds_mode)
        bandit.update_branch_rating(choice, left, r, len(self.stack), self.strategy, self.averages)
        return r

    def _probe(self, choice: Choice, left: bool) -> int:
        store = self.store
        mark = store.checkpoint()
        out = self.prop.propagate(store, choice.literal(left))
        store.restore(mark)
        self._update(choice, left, out)
        return out

    def export_ratings(self) -> dict:
        return bandit.export_ratings(self.pool)

    # -- selection ------------------------------------------------------------
    def strong_branching_select(self, cands) -> Choice:
        crit = self.config.strong_branching_criterion
        rng = self.rng
        ordered = sorted(cands, key=lambda c: (c.left_rating + c.right_rating, rng.random()))
        best, best_score = None, math.inf
        for c in ordered[: self.config.strong_branching_size]:
            rotate_branches(c)
            score = 0.0
            if crit is not Criterion.RIGHT:
                out = self._probe(c, True)
                self.stats["sb_probes"] += 1
                if out == FAIL:
                    return c
                score += local_rating(out, self.strategy.sfds_mode)
            if crit is not Criterion.LEFT:
                out = self._probe(c, False)
                self.stats["sb_probes"] += 1
                if out == FAIL:
                    return c
                score += local_rating(out, self.strategy.sfds_mode)
            if score < best_score:
                best, best_score = c, score
        return best

    def explore_with_rollback(self, choice: Choice) -> bool:
        """Probe both branches of an exploratory choice. True means commit."""
        self.stats["rollback_probes"] += 1
        out_l = self._probe(choice, True)
        out_r = self._probe(choice, False)
        if out_l == FAIL and out_r == FAIL:
            bandit.apply_both_fail_bonus(choice, self.strategy)
        if out_l == FAIL or out_r == FAIL:
            return True
        self.stats["rollbacks"] += 1
        return False

    def _select(self):
        cands = bandit.undecided(self.pool, self.store)
        if not cands:
            return None
        self.selections += 1
        cfg = self.config
        if cfg.strong_branching_size > 0 and len(self.stack) <= cfg.strong_branching_depth:
            return self.strong_branching_select(cands)
        choice, exploratory = bandit.select_from(cands, self.selections, self.rng,
                                                 self.strategy, self.epsilon)
        if exploratory:
            self.stats["exploratory"] += 1
            if self.strategy.rollback and self.strategy.policy.is_hybrid:
                if not self.explore_with_rollback(choice):
                    cands = bandit.undecided(self.pool, self.store)
                    choice = bandit._greedy(cands, self.rng)
        return choice

    # -- SetTimes -------------------------------------------------------------
    def set_times(self) -> list[int] | None:
        store = self.store
        mark = store.checkpoint()
        smin, smax = store.smin, store.smax
        n = len(smin)
        sol = None
        try:
            while True:
                pick = -1
                for v in range(n):
                    if smin[v] < smax[v]:
                        if pick < 0 or smin[v] < smin[pick] or (
                                smin[v] == smin[pick] and smax[v] < smax[pick]):
                            pick = v
                if pick < 0:
                    sol = list(smin)
                    break
                if self.prop.propagate(store, (pick, smin[pick], True)) == FAIL:
                    break
        finally:
            store.restore(mark)
        return sol

    def _pool_exhausted(self) -> bool:
        """All choices decided at a feasible node. True: keep expanding; False: node failed."""
        while True:
            sol = self.set_times()
            if sol is None:
                new = generate_more_choices(self.store, self.keys, self.strategy.initial_rating)
                self._add_choices(new)
                return bool(new)
            value = self.model.makespan(sol)
            self.stats["solutions"] += 1
            if self.best is None or value < self.best:
                self.best = value
                self.best_solution = sol
            self.prop.limit_objective(value - 1)
            cap = self.config.max_counter_after_solution
            if cap is not None:
                self._cap_counters(cap)
            if self.config.reset_restarts_after_solution:
                self._fl = self.config.initial_restart_limit
            if self.prop.propagate(self.store) == FAIL:
                return False

    def _cap_counters(self, cap: int) -> None:
        for c in self.pool:
            if c.left_count > cap:
                c.left_count = cap
            if c.right_count > cap:
                c.right_count = cap

    # -- main loop ------------------------------------------------------------
    def _expand(self) -> None:
        """Grow the tree until some node fails."""
        store, stack = self.store, self.stack
        while True:
            choice = self._select()
            if choice is None:
                if self._pool_exhausted():
                    continue
                return
            self._check_limits()
            rotate_branches(choice)
            mark = store.checkpoint()
            out = self.prop.propagate(store, choice.literal(True))
            self.stats["branches"] += 1
            self._update(choice, True, out)
            stack.append(_Entry(choice, True, mark, out == FAIL))
            if out == FAIL:
                return

    def _backtrack(self, limit: float) -> str:
        """Returns 'expand', 'restart' or 'exhausted'."""
        store, stack = self.store, self.stack
        while self._fc < limit:
            if not stack:
                return "exhausted"
            entry = stack.pop()
            store.restore(entry.mark)
            if entry.left:
                c = entry.choice
                self._check_limits()
                mark = store.checkpoint()
                out = self.prop.propagate(store, c.literal(False))
                self.stats["branches"] += 1
                self._update(c, False, out)
                if out != FAIL:
                    stack.append(_Entry(c, False, mark, False))
                    return "expand"
                store.restore(mark)
                if entry.failed:
                    bandit.apply_both_fail_bonus(c, self.strategy)
                self._fc += 1
                self.stats["fails"] += 1
        return "restart"

    def _restart(self) -> bool:
        """Restart from the root. False if the root itself is now infeasible."""
        cfg = self.config
        self.stats["restarts"] += 1
        self.stats["restart_fail_counts"].append(self._fc)
        if cfg.use_nogoods:
            for clause in nogoods_from_stack([(e.choice.literal(e.left), e.left) for e in self.stack]):
                self.prop.add_nogood(clause)
                self.stats["nogoods"] += 1
        self.stack.clear()
        self.store.restore(self._root)
        self._root = self.store.checkpoint()
        self._fl *= cfg.restart_growth_factor
        self._fc = 0
        self.epsilon *= self.strategy.epsilon_decay
        if cfg.max_counter_after_restart is not None:
            self._cap_counters(cfg.max_counter_after_restart)
        return self.prop.propagate(self.store) != FAIL

    def solve(self) -> SolveResult:
        t0 = time.perf_counter()
        if self.limits.time is not None:
            self._deadline = t0 + self.limits.time
        cfg = self.config
        self._fc = 0
        self._fl = float(cfg.initial_restart_limit)
        self._root = self.store.checkpoint()
        status = None
        try:
            if self.limits.branches is not None and self.limits.branches <= 0:
                raise _LimitHit
            if self._deadline is not None and self.limits.time <= 0:
                raise _LimitHit
            if self.prop.propagate(self.store) == FAIL:
                status = "exhausted"
            else:
                self._add_choices(generate_initial_choices(
                    self.store.bounds(), self.prop.lengths, cfg.length_step_ratio,
                    cfg.uniform_choice_step, cfg.max_initial_choices_per_variable,
                    self.strategy.initial_rating))
                if self.ratings_in:
                    self.unknown_rating_keys = bandit.import_ratings(self.pool, self.ratings_in)
                    self.stats["unknown_rating_keys"] = self.unknown_rating_keys
            while status is None:
                self._expand()
                self._fc += 1
                self.stats["fails"] += 1
                limit = restart_limit(self._fl) if cfg.restarts else math.inf
                step = self._backtrack(limit)
                if step == "exhausted":
                    status = step
                elif step == "restart":
                    if not self._restart():
                        status = "exhausted"
        except _LimitHit:
            status = "limit"
        elapsed = time.perf_counter() - t0
        st = self.stats
        st["selections"] = self.selections
        st["rollback_rate"] = (st["rollbacks"] / st["rollback_probes"]) if st["rollback_probes"] else 0.0
        st["propagations"] = self.prop.calls
        cap = self.prop.cap
        if status == "limit":
            res = SolveResult(Status.LIMIT, self.best, st["branches"], st["restarts"], None, elapsed,
                              self.best_solution, st)
        elif self.best is not None:
            res = SolveResult(Status.SOLUTION, self.best, st["branches"], st["restarts"], self.best,
                              elapsed, self.best_solution, st)
        else:
            bound = None if cap is None else cap + 1
            res = SolveResult(Status.INFEASIBLE, None, st["branches"], st["restarts"], bound, elapsed,
                              None, st)
        return res


def solve(model: Model, strategy: StrategyConfig | None = None, engine: EngineConfig | None = None,
          seed: int = 0, limits: Limits | None = None, ratings: dict | None = None) -> SolveResult:
    return FDSSolver(model, strategy, engine, seed, limits, ratings).solve()
