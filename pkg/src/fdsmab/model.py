"""Declarative scheduling model: interval variables, constraints, objective cap.

A model holds fixed-length interval variables with integer start windows and
three constraint kinds (precedence, no-overlap, cumulative). The objective is
the makespan over a subset of the variables; ``limit_objective`` caps it by
tightening ``start_max`` directly.
"""

from __future__ import annotations

from dataclasses import dataclass, field


class ModelError(ValueError):
    """Raised on malformed model construction."""


@dataclass
class IntervalVar:
    id: int
    start_min: int
    start_max: int
    length: int

    @property
    def end_max(self) -> int:
        return self.start_max + self.length


@dataclass(frozen=True)
class Precedence:
    a: int
    b: int
    delay: int = 0


@dataclass(frozen=True)
class NoOverlap:
    vars: tuple[int, ...]


@dataclass(frozen=True)
class Cumulative:
    vars: tuple[int, ...]
    demands: tuple[int, ...]
    capacity: int


@dataclass(frozen=True)
class ObjectiveAtMost:
    bound: int


@dataclass
class Model:
    variables: list[IntervalVar] = field(default_factory=list)
    constraints: list = field(default_factory=list)
    objective_vars: list[int] | None = None
    objective_bound: int | None = None
    name: str = ""

    def __len__(self) -> int:
        return len(self.variables)

    def new_interval(self, start_min: int, start_max: int, length: int) -> int:
        if start_min > start_max:
            raise ModelError(f"inverted window [{start_min}, {start_max}]")
        if length < 0:
            raise ModelError(f"negative length {length}")
        vid = len(self.variables)
        self.variables.append(IntervalVar(vid, int(start_min), int(start_max), int(length)))
        return vid

    def _check(self, vid: int) -> None:
        if not (0 <= vid < len(self.variables)):
            raise ModelError(f"unknown variable id {vid}")

    def add_precedence(self, a: int, b: int, delay: int = 0) -> None:
        """Record ``end(a) + delay <= start(b)``."""
        self._check(a)
        self._check(b)
        if a == b:
            raise ModelError(f"self-precedence on variable {a}")
        self.constraints.append(Precedence(a, b, int(delay)))

    def add_no_overlap(self, vars) -> None:
        vars = tuple(int(v) for v in vars)
        for v in vars:
            self._check(v)
        if len(set(vars)) != len(vars):
            raise ModelError(f"duplicate variables in no-overlap set {vars}")
        if len(vars) < 2:
            raise ModelError("no-overlap needs at least two variables")
        self.constraints.append(NoOverlap(vars))

    def add_cumulative(self, vars, demands, capacity: int) -> None:
        vars = tuple(int(v) for v in vars)
        demands = tuple(int(d) for d in demands)
        if len(vars) != len(demands):
            raise ModelError("cumulative: vars and demands differ in length")
        for v in vars:
            self._check(v)
        if len(set(vars)) != len(vars):
            raise ModelError(f"duplicate variables in cumulative set {vars}")
        for v, d in zip(vars, demands):
            if d < 1 or d > capacity:
                raise ModelError(
                    f"demand {d} of variable {v} outside [1, {capacity}]")
        self.constraints.append(Cumulative(vars, demands, int(capacity)))

    def set_objective(self, vars) -> None:
        vars = [int(v) for v in vars]
        for v in vars:
            self._check(v)
        self.objective_vars = vars

    @property
    def objective_scope(self) -> list[int]:
        if self.objective_vars is None:
            return list(range(len(self.variables)))
        return self.objective_vars

    def limit_objective(self, bound: int) -> None:
        """Cap the makespan: every objective var gets start_max <= bound - length.

        A weaker existing cap is replaced; a stronger one is kept. An
        over-tight bound is not an error here, propagation reports the wipeout.
        """
        bound = int(bound)
        if self.objective_bound is None or bound < self.objective_bound:
            self.objective_bound = bound
        b = self.objective_bound
        for v in self.objective_scope:
            iv = self.variables[v]
            iv.start_max = min(iv.start_max, b - iv.length)

    def makespan(self, starts) -> int:
        scope = self.objective_scope
        if not scope:
            return 0
        return max(starts[v] + self.variables[v].length for v in scope)

    def check_solution(self, starts) -> bool:
        """Plain feasibility test of a full start assignment."""
        vs = self.variables
        for v in vs:
            if not (v.start_min <= starts[v.id] <= v.start_max):
                return False
        for c in self.constraints:
            if isinstance(c, Precedence):
                if starts[c.a] + vs[c.a].length + c.delay > starts[c.b]:
                    return False
            elif isinstance(c, NoOverlap):
                ivs = [(starts[v], starts[v] + vs[v].length) for v in c.vars if vs[v].length > 0]
                ivs.sort()
                for (s0, e0), (s1, _) in zip(ivs, ivs[1:]):
                    if s1 < e0:
                        return False
            elif isinstance(c, Cumulative):
                events = []
                for v, d in zip(c.vars, c.demands):
                    if vs[v].length > 0:
                        events.append((starts[v], d))
                        events.append((starts[v] + vs[v].length, -d))
                events.sort(key=lambda e: (e[0], e[1]))
                load = 0
                for _, d in events:
                    load += d
                    if load > c.capacity:
                        return False
        if self.objective_bound is not None and self.makespan(starts) > self.objective_bound:
            return False
        return True
