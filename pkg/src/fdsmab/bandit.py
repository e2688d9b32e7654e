"""Branch-rating updates and bandit-style choice selection.

Ratings live in [0, 2]; lower is better. The bandit view of a choice is
``Q = -(left_rating + right_rating)`` and every policy maximises Q.
"""

from __future__ import annotations

import enum
import json
import logging
import math
from dataclasses import asdict, dataclass

from .choices import Choice

log = logging.getLogger(__name__)


class Policy(str, enum.Enum):
    GREEDY = "greedy"
    EPSILON_GREEDY = "epsilon-greedy"
    BOLTZMANN = "boltzmann"
    UCB1 = "ucb1"
    THOMPSON = "thompson"
    B_GREEDY = "b-greedy"
    U_GREEDY = "u-greedy"
    T_GREEDY = "t-greedy"

    @property
    def is_hybrid(self) -> bool:
        return self in _HYBRID


_HYBRID = {Policy.EPSILON_GREEDY, Policy.B_GREEDY, Policy.U_GREEDY, Policy.T_GREEDY}
_DELEGATE = {Policy.B_GREEDY: Policy.BOLTZMANN, Policy.U_GREEDY: Policy.UCB1,
             Policy.T_GREEDY: Policy.THOMPSON}


@dataclass
class StrategyConfig:
    policy: Policy = Policy.B_GREEDY
    epsilon: float = 0.10
    epsilon_decay: float = 1.0
    tau: float = 1.0
    rollback: bool = True
    rating_average_length: int = 30
    initial_rating: float = 0.3
    both_fail_reward_factor: float = 0.9
    rating_average_comparison: bool = False
    freeze_ratings: bool = False
    thompson_sigma0: float = 1.0
    sfds_mode: bool = False

    def __post_init__(self):
        self.policy = Policy(self.policy)
        if not 0.0 <= self.epsilon <= 1.0:
            raise ValueError(f"epsilon {self.epsilon} outside [0, 1]")
        if self.tau <= 0:
            raise ValueError("tau must be positive")
        if self.rating_average_length < 1:
            raise ValueError("rating_average_length must be >= 1")
        if not 0.0 <= self.initial_rating <= 2.0:
            raise ValueError("initial_rating outside [0, 2]")
        if not 0.0 < self.both_fail_reward_factor <= 1.0:
            raise ValueError("both_fail_reward_factor outside (0, 1]")
        if self.thompson_sigma0 <= 0:
            raise ValueError("thompson_sigma0 must be positive")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["policy"] = self.policy.value
        return d


class DepthAverages:
    """Running mean of local ratings per tree depth, seeded with 1."""

    def __init__(self):
        self.mean: list[float] = []
        self.count: list[int] = []

    def get(self, depth: int) -> float:
        self._grow(depth)
        return self.mean[depth]

    def add(self, depth: int, value: float) -> None:
        self._grow(depth)
        self.count[depth] += 1
        n = self.count[depth]
        self.mean[depth] += (value - self.mean[depth]) / n
        if self.mean[depth] <= 0:
            # keep the divisor positive; an all-fail depth would otherwise hit 0
            self.mean[depth] = 1e-6

    def _grow(self, depth: int) -> None:
        while len(self.mean) <= depth:
            self.mean.append(1.0)
            self.count.append(1)


def _clamp(x: float) -> float:
    return 0.0 if x < 0.0 else (2.0 if x > 2.0 else x)


def update_branch_rating(choice: Choice, left: bool, local: float, depth: int,
                         config: StrategyConfig, averages: DepthAverages | None = None) -> None:
    """Hybrid-alpha update of one branch: arithmetic mean for the first L plays."""
    if config.freeze_ratings:
        return
    L = config.rating_average_length
    target = local
    if config.rating_average_comparison and averages is not None:
        target = local / averages.get(depth)
        averages.add(depth, local)
    if left:
        n = choice.left_count + 1
        if n > L:
            n = L
        choice.left_count = n
        choice.left_rating = _clamp(choice.left_rating + (target - choice.left_rating) / n)
    else:
        n = choice.right_count + 1
        if n > L:
            n = L
        choice.right_count = n
        choice.right_rating = _clamp(choice.right_rating + (target - choice.right_rating) / n)


def apply_both_fail_bonus(choice: Choice, config: StrategyConfig) -> None:
    if config.freeze_ratings:
        return
    f = config.both_fail_reward_factor
    choice.left_rating = _clamp(choice.left_rating * f)
    choice.right_rating = _clamp(choice.right_rating * f)


def q_value(choice: Choice) -> float:
    return -(choice.left_rating + choice.right_rating)


def boltzmann_probabilities(qs, tau: float = 1.0) -> list[float]:
    m = max(qs)
    w = [math.exp((q - m) / tau) for q in qs]
    s = sum(w)
    return [x / s for x in w]


def ucb_scores(qs, plays, t: int) -> list[float]:
    """UCB-1 scores; unplayed arms score +inf."""
    lt = math.log(t) if t > 1 else 0.0
    return [math.inf if n == 0 else q + math.sqrt(2.0 * lt / n) for q, n in zip(qs, plays)]


def _greedy(cands, rng) -> Choice:
    best = math.inf
    ties: list[Choice] = []
    for c in cands:
        r = c.left_rating + c.right_rating
        if r < best:
            best = r
            ties = [c]
        elif r == best:
            ties.append(c)
    if len(ties) == 1:
        return ties[0]
    return ties[rng.randrange(len(ties))]


def _boltzmann(cands, rng, tau: float) -> Choice:
    probs = boltzmann_probabilities([q_value(c) for c in cands], tau)
    u = rng.random()
    acc = 0.0
    for c, p in zip(cands, probs):
        acc += p
        if u < acc:
            return c
    return cands[-1]


def _ucb1(cands, rng, t: int) -> Choice:
    unplayed = [c for c in cands if c.left_count + c.right_count == 0]
    if unplayed:
        return unplayed[rng.randrange(len(unplayed))]
    scores = ucb_scores([q_value(c) for c in cands], [c.plays for c in cands], t)
    best = max(scores)
    ties = [c for c, s in zip(cands, scores) if s == best]
    return ties[0] if len(ties) == 1 else ties[rng.randrange(len(ties))]


def _thompson(cands, rng, sigma0: float) -> Choice:
    best, pick = -math.inf, cands[0]
    for c in cands:
        s = rng.gauss(q_value(c), sigma0 / math.sqrt(c.plays + 1))
        if s > best:
            best, pick = s, c
    return pick


def select_from(cands, t: int, rng, config: StrategyConfig, epsilon: float | None = None):
    """Pick one of ``cands`` (all undecided). Returns ``(choice, exploratory)``."""
    pol = config.policy
    eps = config.epsilon if epsilon is None else epsilon
    if pol is Policy.GREEDY:
        return _greedy(cands, rng), False
    if pol is Policy.BOLTZMANN:
        return _boltzmann(cands, rng, config.tau), False
    if pol is Policy.UCB1:
        return _ucb1(cands, rng, t), False
    if pol is Policy.THOMPSON:
        return _thompson(cands, rng, config.thompson_sigma0), False
    # hybrids
    if eps > 0 and rng.random() < eps:
        if pol is Policy.EPSILON_GREEDY:
            return cands[rng.randrange(len(cands))], True
        inner = _DELEGATE[pol]
        if inner is Policy.BOLTZMANN:
            return _boltzmann(cands, rng, config.tau), True
        if inner is Policy.UCB1:
            return _ucb1(cands, rng, t), True
        return _thompson(cands, rng, config.thompson_sigma0), True
    return _greedy(cands, rng), False


def undecided(pool, store) -> list[Choice]:
    smin, smax = store.smin, store.smax
    return [c for c in pool if smin[c.var] <= c.pivot < smax[c.var]]


def select_choice(pool, store, t: int, rng, config: StrategyConfig, epsilon: float | None = None):
    """Select among undecided choices; ``None`` means the pool is exhausted."""
    cands = undecided(pool, store)
    if not cands:
        return None
    return select_from(cands, t, rng, config, epsilon)


# --- persistence -------------------------------------------------------------
# Table format: JSON object {"var:pivot": [rating_le, rating_gt, count_le, count_gt]}.
# Ratings are written with repr-exact floats so a round-trip is bit-identical.

def export_ratings(pool) -> dict[str, list]:
    table = {}
    for c in pool:
        r_le, r_gt, n_le, n_gt = c.canonical()
        table[f"{c.var}:{c.pivot}"] = [r_le, r_gt, n_le, n_gt]
    return table


def import_ratings(pool, table) -> int:
    """Overlay ``table`` onto matching choices. Returns the count of unknown keys."""
    by_key = {f"{c.var}:{c.pivot}": c for c in pool}
    unknown = 0
    for key, vals in table.items():
        c = by_key.get(key)
        if c is None:
            unknown += 1
            continue
        r_le, r_gt, n_le, n_gt = vals
        c.set_canonical(float(r_le), float(r_gt), int(n_le), int(n_gt))
    if unknown:
        log.info("import_ratings: %d keys not present in the pool", unknown)
    return unknown


def save_ratings(table, path) -> None:
    with open(path, "w") as fh:
        json.dump(table, fh, indent=0, sort_keys=True)


def load_ratings(path) -> dict[str, list]:
    try:
        with open(path) as fh:
            table = json.load(fh)
    except json.JSONDecodeError as e:
        raise OSError(f"{path}: malformed rating table ({e})") from e
    if not isinstance(table, dict):
        raise OSError(f"{path}: rating table must be a mapping")
    for k, v in table.items():
        if not (isinstance(v, list) and len(v) == 4) or ":" not in k:
            raise OSError(f"{path}: malformed entry {k!r}")
    return table
