"""Paired comparisons: Wilcoxon signed-rank and paired t-test."""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy import stats as _st

EXACT_MAX_N = 25


def signed_ranks(diffs) -> tuple[list[float], list[float]]:
    """Drop zero differences and rank the rest by magnitude (average ranks on ties).

    Returns ``(nonzero_diffs, ranks)`` aligned.
    """
    d = [x for x in diffs if x != 0]
    order = sorted(range(len(d)), key=lambda i: abs(d[i]))
    ranks = [0.0] * len(d)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and abs(d[order[j + 1]]) == abs(d[order[i]]):
            j += 1
        avg = (i + j) / 2 + 1
        for k in range(i, j + 1):
            ranks[order[k]] = avg
        i = j + 1
    return d, ranks


def _exact_pvalue(ranks, w_plus: float) -> float:
    # doubled ranks are integers even with half-rank ties
    r2 = [int(round(2 * r)) for r in ranks]
    total = sum(r2)
    counts = [0] * (total + 1)
    counts[0] = 1
    for r in r2:
        for s in range(total, r - 1, -1):
            counts[s] += counts[s - r]
    n_pat = 2 ** len(r2)
    w2 = int(round(2 * w_plus))
    lower = sum(counts[: w2 + 1]) / n_pat
    upper = sum(counts[w2:]) / n_pat
    return min(1.0, 2 * min(lower, upper))


def wilcoxon_signed_rank(diffs) -> tuple[float, float]:
    """Two-sided signed-rank test on paired differences. Returns ``(W+, p)``.

    Exact null distribution for up to ``EXACT_MAX_N`` nonzero differences,
    tie-corrected normal approximation with continuity correction above.
    """
    d, ranks = signed_ranks(diffs)
    n = len(d)
    if n == 0:
        return 0.0, 1.0
    w_plus = sum(r for x, r in zip(d, ranks) if x > 0)
    if n <= EXACT_MAX_N:
        return w_plus, _exact_pvalue(ranks, w_plus)
    mean = n * (n + 1) / 4
    var = sum(r * r for r in ranks) / 4
    if var == 0:
        return w_plus, 1.0
    z = (abs(w_plus - mean) - 0.5) / math.sqrt(var)
    return w_plus, min(1.0, 2 * _st.norm.sf(max(z, 0.0)))


def paired_t(diffs) -> tuple[float, float]:
    """Paired t statistic and two-sided p-value of the mean difference."""
    n = len(diffs)
    if n < 2:
        return 0.0, 1.0
    mean = sum(diffs) / n
    var = sum((x - mean) ** 2 for x in diffs) / (n - 1)
    if var == 0:
        return (0.0, 1.0) if mean == 0 else (math.copysign(math.inf, mean), 0.0)
    t = mean / math.sqrt(var / n)
    return t, 2 * _st.t.sf(abs(t), n - 1)


def significance_mark(p: float) -> str:
    """'**' below 0.005, '*' below 0.05, '' otherwise."""
    if p < 0.005:
        return "**"
    if p < 0.05:
        return "*"
    return ""


@dataclass
class Comparison:
    n: int
    mean_diff: float
    wilcoxon_w: float
    wilcoxon_p: float
    t_stat: float
    t_p: float

    @property
    def flags(self) -> dict[str, str]:
        return {"wilcoxon": significance_mark(self.wilcoxon_p),
                "t": significance_mark(self.t_p)}


def compare_paired(a, b) -> Comparison:
    """Compare paired samples ``a`` and ``b`` through their differences ``a - b``."""
    if len(a) != len(b):
        raise ValueError("paired samples differ in length")
    diffs = [x - y for x, y in zip(a, b)]
    n = len(diffs)
    w, pw = wilcoxon_signed_rank(diffs)
    t, pt = paired_t(diffs)
    return Comparison(n, sum(diffs) / n if n else 0.0, w, pw, t, pt)
