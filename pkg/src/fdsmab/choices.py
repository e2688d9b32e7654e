"""Domain-split choices: generation, refinement, decided status, rotation."""

from __future__ import annotations

import enum
import math


class Decided(enum.Enum):
    LEFT_TRUE = "left"
    RIGHT_TRUE = "right"
    UNDECIDED = "undecided"


class Choice:
    """A split ``start(var) <= pivot`` vs ``start(var) > pivot`` with two rated branches.

    ``left_le`` tells which literal the left branch currently denotes; rotation
    swaps the branch bindings so the lower-rated side is always on the left.
    """

    __slots__ = ("var", "pivot", "left_rating", "right_rating",
                 "left_count", "right_count", "left_le", "last_selected", "index")

    def __init__(self, var: int, pivot: int, initial_rating: float = 0.3):
        self.var = var
        self.pivot = pivot
        self.left_rating = initial_rating
        self.right_rating = initial_rating
        self.left_count = 0
        self.right_count = 0
        self.left_le = True
        self.last_selected = -1
        self.index = -1

    def __repr__(self) -> str:
        return (f"Choice(v{self.var} <= {self.pivot}, L={self.left_rating:.3f}/"
                f"{self.left_count}, R={self.right_rating:.3f}/{self.right_count}, "
                f"left_le={self.left_le})")

    @property
    def key(self) -> tuple[int, int]:
        return (self.var, self.pivot)

    @property
    def rating(self) -> float:
        return self.left_rating + self.right_rating

    @property
    def plays(self) -> int:
        return self.left_count + self.right_count

    def literal(self, left: bool) -> tuple[int, int, bool]:
        """The bound literal of the left (``left=True``) or right branch."""
        return (self.var, self.pivot, self.left_le if left else not self.left_le)

    # canonical views, independent of rotation
    def canonical(self) -> tuple[float, float, int, int]:
        """(rating_le, rating_gt, count_le, count_gt)."""
        if self.left_le:
            return (self.left_rating, self.right_rating, self.left_count, self.right_count)
        return (self.right_rating, self.left_rating, self.right_count, self.left_count)

    def set_canonical(self, r_le: float, r_gt: float, n_le: int, n_gt: int) -> None:
        if self.left_le:
            self.left_rating, self.right_rating = r_le, r_gt
            self.left_count, self.right_count = n_le, n_gt
        else:
            self.left_rating, self.right_rating = r_gt, r_le
            self.left_count, self.right_count = n_gt, n_le


def round_half_away(x: float) -> int:
    return int(math.floor(x + 0.5)) if x >= 0 else -int(math.floor(-x + 0.5))


def choice_step(lengths, length_step_ratio: float, uniform: bool):
    """Pivot spacing: one shared value (uniform) or a list, one per variable."""
    if uniform:
        avg = sum(lengths) / len(lengths) if lengths else 0.0
        return length_step_ratio * avg
    return [length_step_ratio * p for p in lengths]


def pivots_for_window(smin: int, smax: int, step: float, limit: int | None = None) -> list[int]:
    """``round(smin + i*step)`` for ``i = 1..floor((smax-smin)/step)``, kept in ``[smin, smax)``."""
    if smax <= smin:
        return []
    if step <= 0:
        return [(smin + smax) // 2]
    count = int(math.floor((smax - smin) / step))
    out: list[int] = []
    seen = set()
    for i in range(1, count + 1):
        p = round_half_away(smin + i * step)
        if smin <= p < smax and p not in seen:
            seen.add(p)
            out.append(p)
    if limit is not None and len(out) > limit:
        # keep an evenly spread subset rather than the first few
        idx = [round_half_away((j + 0.5) * len(out) / limit - 0.5) for j in range(limit)]
        out = [out[j] for j in sorted(set(idx))]
    return out


def generate_initial_choices(windows, lengths, length_step_ratio: float = 0.7,
                             uniform: bool = True, max_per_variable: int | None = 20,
                             initial_rating: float = 0.3) -> list[Choice]:
    """Initial choice pool over ``windows`` (a list of ``(smin, smax)``).

    ``lengths`` are the fixed interval lengths. If every length is zero the
    step degenerates and each non-singleton variable gets one midpoint pivot.
    """
    if length_step_ratio <= 0:
        raise ValueError("length_step_ratio must be positive")
    step = choice_step(lengths, length_step_ratio, uniform)
    pool: list[Choice] = []
    for v, (lo, hi) in enumerate(windows):
        s = step if uniform else step[v]
        if s <= 0:
            s = 0.0
        for p in pivots_for_window(lo, hi, s, max_per_variable):
            pool.append(Choice(v, p, initial_rating))
    return pool


def refine_pivots(smin: int, smax: int, splits: int = 5) -> list[int]:
    """Up to ``splits`` evenly spaced pivots strictly inside ``(smin, smax)``."""
    if smax <= smin:
        return []
    w = smax - smin
    out: list[int] = []
    for k in range(1, splits + 1):
        p = round_half_away(smin + k * w / (splits + 1))
        if smin < p < smax and p not in out:
            out.append(p)
    if not out:
        out.append(smin)  # width-1 window: the only split there is
    return out


def generate_more_choices(store, existing=None, initial_rating: float = 0.3,
                          splits: int = 5) -> list[Choice]:
    """New choices splitting every unfixed variable's remaining window."""
    existing = existing if existing is not None else set()
    new: list[Choice] = []
    for v, (lo, hi) in enumerate(zip(store.smin, store.smax)):
        if lo >= hi:
            continue
        for p in refine_pivots(lo, hi, splits):
            if (v, p) not in existing:
                new.append(Choice(v, p, initial_rating))
    return new


def decided_status(choice: Choice, store) -> Decided:
    v, p = choice.var, choice.pivot
    if store.smax[v] <= p:
        return Decided.LEFT_TRUE
    if store.smin[v] > p:
        return Decided.RIGHT_TRUE
    return Decided.UNDECIDED


def is_undecided(choice: Choice, smin, smax) -> bool:
    v = choice.var
    return smin[v] <= choice.pivot < smax[v]


def rotate_branches(choice: Choice) -> bool:
    """Put the lower-rated branch on the left; ties do not swap. Returns True on swap."""
    if choice.right_rating < choice.left_rating:
        choice.left_rating, choice.right_rating = choice.right_rating, choice.left_rating
        choice.left_count, choice.right_count = choice.right_count, choice.left_count
        choice.left_le = not choice.left_le
        return True
    return False
