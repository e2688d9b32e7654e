"""Bound-domain store with trail, and the propagators run at each search node.

Domains are integer start windows ``[smin, smax]``. A ``Propagator`` compiles a
``Model`` into filtering routines (precedence bounds, pairwise disjunctive
reasoning plus overload checking for no-overlap, compulsory-part timetabling
plus energy overload checking for cumulative, clause propagation for nogoods)
and drives them to fixpoint.

``Propagator.propagate`` returns ``FAIL`` (-1) on a wipeout, otherwise the
number of distinct variables tightened during the call (the branch's own cut
excluded).
"""

from __future__ import annotations

from collections import deque

from .model import Cumulative, Model, NoOverlap, Precedence

FAIL = -1


class Fail(Exception):
    """Internal signal: some domain wiped out."""


class StaleMarkError(RuntimeError):
    """A checkpoint mark was restored after it had already been popped."""


class DomainStore:
    """Per-variable start bounds with an undo trail and LIFO checkpoints."""

    __slots__ = ("smin", "smax", "trail", "_marks", "_serial", "hook")

    def __init__(self, smin, smax):
        self.smin = list(smin)
        self.smax = list(smax)
        self.trail: list[tuple[int, int, int]] = []
        self._marks: list[tuple[int, int]] = []
        self._serial = 0
        self.hook = None

    @classmethod
    def from_model(cls, model: Model) -> "DomainStore":
        return cls([v.start_min for v in model.variables],
                   [v.start_max for v in model.variables])

    def __len__(self) -> int:
        return len(self.smin)

    def bounds(self) -> list[tuple[int, int]]:
        return list(zip(self.smin, self.smax))

    def set_min(self, v: int, val: int) -> None:
        smin = self.smin
        if val > smin[v]:
            self.trail.append((v, smin[v], self.smax[v]))
            smin[v] = val
            if self.hook is not None:
                self.hook(v)
            if val > self.smax[v]:
                raise Fail

    def set_max(self, v: int, val: int) -> None:
        smax = self.smax
        if val < smax[v]:
            self.trail.append((v, self.smin[v], smax[v]))
            smax[v] = val
            if self.hook is not None:
                self.hook(v)
            if val < self.smin[v]:
                raise Fail

    def checkpoint(self) -> int:
        self._serial += 1
        self._marks.append((self._serial, len(self.trail)))
        return self._serial

    def restore(self, mark: int) -> None:
        """Undo every change since ``mark`` and pop it with all inner marks."""
        marks = self._marks
        for k in range(len(marks) - 1, -1, -1):
            if marks[k][0] == mark:
                break
        else:
            raise StaleMarkError(f"mark {mark} is not live")
        pos = marks[k][1]
        del marks[k:]
        trail = self.trail
        smin, smax = self.smin, self.smax
        while len(trail) > pos:
            v, lo, hi = trail.pop()
            smin[v] = lo
            smax[v] = hi

    @property
    def depth(self) -> int:
        return len(self._marks)


# --- propagators -----------------------------------------------------------
# Each propagator exposes ``vars`` (for watch lists) and ``run(store)``,
# which tightens bounds through the store and raises Fail on wipeout.

class PrecedenceProp:
    __slots__ = ("a", "b", "gap", "vars")

    def __init__(self, a: int, b: int, gap: int):
        self.a, self.b, self.gap = a, b, gap
        self.vars = (a, b)

    def run(self, store: DomainStore) -> None:
        a, b, gap = self.a, self.b, self.gap
        lo = store.smin[a] + gap
        if lo > store.smin[b]:
            store.set_min(b, lo)
        hi = store.smax[b] - gap
        if hi < store.smax[a]:
            store.set_max(a, hi)


class DisjunctiveProp:
    """Pairwise detectable-precedence filtering plus overload checking."""

    __slots__ = ("vars", "lens")

    def __init__(self, vars, lens):
        keep = [(v, p) for v, p in zip(vars, lens) if p > 0]
        self.vars = tuple(v for v, _ in keep)
        self.lens = tuple(p for _, p in keep)

    def run(self, store: DomainStore) -> None:
        vars, lens = self.vars, self.lens
        smin, smax = store.smin, store.smax
        k = len(vars)
        changed = True
        while changed:
            changed = False
            for x in range(k):
                i = vars[x]
                pi = lens[x]
                for y in range(x + 1, k):
                    j = vars[y]
                    pj = lens[y]
                    i_first = smin[i] + pi <= smax[j]
                    j_first = smin[j] + pj <= smax[i]
                    if i_first:
                        if j_first:
                            continue
                        if smin[j] < smin[i] + pi:
                            store.set_min(j, smin[i] + pi)
                            changed = True
                        if smax[i] > smax[j] - pi:
                            store.set_max(i, smax[j] - pi)
                            changed = True
                    elif j_first:
                        if smin[i] < smin[j] + pj:
                            store.set_min(i, smin[j] + pj)
                            changed = True
                        if smax[j] > smax[i] - pj:
                            store.set_max(j, smax[i] - pj)
                            changed = True
                    else:
                        raise Fail
        if k > 2:
            _overload(vars, lens, None, 1, smin, smax)


class CumulativeProp:
    """Timetable filtering over compulsory parts plus energy overload checking."""

    __slots__ = ("vars", "lens", "demands", "cap")

    def __init__(self, vars, lens, demands, cap):
        keep = [(v, p, d) for v, p, d in zip(vars, lens, demands) if p > 0]
        self.vars = tuple(v for v, _, _ in keep)
        self.lens = tuple(p for _, p, _ in keep)
        self.demands = tuple(d for _, _, d in keep)
        self.cap = cap

    def _profile(self, smin, smax):
        delta: dict[int, int] = {}
        for v, p, d in zip(self.vars, self.lens, self.demands):
            lst, ect = smax[v], smin[v] + p
            if lst < ect:
                delta[lst] = delta.get(lst, 0) + d
                delta[ect] = delta.get(ect, 0) - d
        if not delta:
            return []
        segs = []
        h = 0
        times = sorted(delta)
        for t0, t1 in zip(times, times[1:]):
            h += delta[t0]
            if h > 0:
                segs.append((t0, t1, h))
        return segs

    def run(self, store: DomainStore) -> None:
        smin, smax = store.smin, store.smax
        cap = self.cap
        segs = self._profile(smin, smax)
        if segs:
            peak = max(s[2] for s in segs)
            if peak > cap:
                raise Fail
            for v, p, d in zip(self.vars, self.lens, self.demands):
                if peak + d <= cap:
                    continue
                lst0, ect0 = smax[v], smin[v] + p
                own = lst0 < ect0

                # push start forward past conflicting segments
                t = smin[v]
                moved = True
                while moved:
                    moved = False
                    for s, e, h in segs:
                        if e <= t or s >= t + p:
                            continue
                        if own and s >= lst0 and e <= ect0:
                            h -= d
                        if h + d > cap:
                            t = e
                            moved = True
                if t > smin[v]:
                    store.set_min(v, t)

                # push start backward
                t = smax[v]
                moved = True
                while moved:
                    moved = False
                    for s, e, h in reversed(segs):
                        if e <= t or s >= t + p:
                            continue
                        if own and s >= lst0 and e <= ect0:
                            h -= d
                        if h + d > cap:
                            t = s - p
                            moved = True
                if t < smax[v]:
                    store.set_max(v, t)
        if len(self.vars) > 1:
            _overload(self.vars, self.lens, self.demands, cap, smin, smax)


def _overload(vars, lens, demands, cap, smin, smax) -> None:
    """Fail if some window [est_a, lct_b] must hold more energy than it has."""
    k = len(vars)
    by_lct = sorted(range(k), key=lambda x: smax[vars[x]] + lens[x])
    ests = sorted({smin[v] for v in vars})
    for a in ests:
        energy = 0
        for x in by_lct:
            v = vars[x]
            if smin[v] >= a:
                energy += lens[x] if demands is None else lens[x] * demands[x]
                if energy > cap * (smax[v] + lens[x] - a):
                    raise Fail


class ClauseProp:
    """A nogood as a clause of bound literals ``(var, pivot, is_le)``."""

    __slots__ = ("lits", "vars")

    def __init__(self, lits):
        self.lits = tuple(lits)
        self.vars = tuple(sorted({v for v, _, _ in self.lits}))

    def run(self, store: DomainStore) -> None:
        smin, smax = store.smin, store.smax
        open_lit = None
        for lit in self.lits:
            v, p, le = lit
            if le:
                if smax[v] <= p:
                    return
                if smin[v] > p:
                    continue
            else:
                if smin[v] > p:
                    return
                if smax[v] <= p:
                    continue
            if open_lit is not None:
                return
            open_lit = lit
        if open_lit is None:
            raise Fail
        v, p, le = open_lit
        if le:
            store.set_max(v, p)
        else:
            store.set_min(v, p + 1)


def apply_literal(store: DomainStore, v: int, p: int, le: bool) -> None:
    if le:
        store.set_max(v, p)
    else:
        store.set_min(v, p + 1)


class Propagator:
    """Compiled constraint network for one model.

    The model is only read. The objective cap and the nogood clauses are
    solver-run state kept here, so one Propagator belongs to one run.
    """

    def __init__(self, model: Model):
        self.model = model
        self.lengths = [v.length for v in model.variables]
        self.props: list = []
        for c in model.constraints:
            if isinstance(c, Precedence):
                self.props.append(PrecedenceProp(c.a, c.b, self.lengths[c.a] + c.delay))
            elif isinstance(c, NoOverlap):
                p = DisjunctiveProp(c.vars, [self.lengths[v] for v in c.vars])
                if len(p.vars) >= 2:
                    self.props.append(p)
            elif isinstance(c, Cumulative):
                self.props.append(CumulativeProp(
                    c.vars, [self.lengths[v] for v in c.vars], c.demands, c.capacity))
        self.watch: list[list[int]] = [[] for _ in model.variables]
        for k, p in enumerate(self.props):
            for v in p.vars:
                self.watch[v].append(k)
        self.scope = model.objective_scope
        self.cap = model.objective_bound
        self.nogoods: list[ClauseProp] = []
        self.calls = 0

    def new_store(self) -> DomainStore:
        return DomainStore.from_model(self.model)

    def limit_objective(self, bound: int) -> None:
        if self.cap is None or bound < self.cap:
            self.cap = bound

    def add_nogood(self, lits) -> None:
        clause = ClauseProp(lits)
        k = len(self.props)
        self.props.append(clause)
        self.nogoods.append(clause)
        for v in clause.vars:
            self.watch[v].append(k)

    def propagate(self, store: DomainStore, branch=None, full: bool = False) -> int:
        """Apply ``branch`` (a ``(var, pivot, is_le)`` literal) and run to fixpoint.

        Without a branch every propagator is scheduled; with one, only those
        watching the branched variable (plus the objective cap and nogoods).
        """
        self.calls += 1
        props = self.props
        watch = self.watch
        queued = bytearray(len(props))
        queue: deque[int] = deque()
        changed: set[int] = set()

        def hook(v: int) -> None:
            changed.add(v)
            for k in watch[v]:
                if not queued[k]:
                    queued[k] = 1
                    queue.append(k)

        smin, smax = store.smin, store.smax
        try:
            if branch is not None:
                v, p, le = branch
                if le:
                    if p < smin[v]:
                        return FAIL
                    if p < smax[v]:
                        store.trail.append((v, smin[v], smax[v]))
                        smax[v] = p
                else:
                    if p + 1 > smax[v]:
                        return FAIL
                    if p + 1 > smin[v]:
                        store.trail.append((v, smin[v], smax[v]))
                        smin[v] = p + 1
                for k in watch[v]:
                    queued[k] = 1
                    queue.append(k)
            if branch is None or full:
                if any(lo > hi for lo, hi in zip(smin, smax)):
                    return FAIL
                for k in range(len(props)):
                    if not queued[k]:
                        queued[k] = 1
                        queue.append(k)
            store.hook = hook
            cap = self.cap
            if cap is not None:
                lengths = self.lengths
                for v in self.scope:
                    hi = cap - lengths[v]
                    if hi < smax[v]:
                        store.set_max(v, hi)
            while queue:
                k = queue.popleft()
                queued[k] = 0
                props[k].run(store)
        except Fail:
            return FAIL
        finally:
            store.hook = None
        return len(changed)


def propagate(store: DomainStore, model: Model, new_branch=None) -> int:
    """One-shot propagation with a freshly compiled network."""
    return Propagator(model).propagate(store, new_branch)


def local_rating(outcome: int, sfds_mode: bool = False) -> float:
    """0 on Fail; otherwise ``1 + 0.5**n`` (or 1 in simplified mode)."""
    if outcome < 0:
        return 0.0
    if sfds_mode:
        return 1.0
    return 1.0 + 0.5 ** outcome
