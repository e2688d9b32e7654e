import itertools

import pytest
from scipy import stats as st

from fdsmab.stats import (
    compare_paired, paired_t, signed_ranks, significance_mark, wilcoxon_signed_rank,
)


def _enumerated_p(diffs):
    d, ranks = signed_ranks(diffs)
    w = sum(r for x, r in zip(d, ranks) if x > 0)
    mean = sum(ranks) / 2
    total = 0
    extreme = 0
    for signs in itertools.product((0, 1), repeat=len(ranks)):
        s = sum(r for r, b in zip(ranks, signs) if b)
        total += 1
        extreme += abs(s - mean) >= abs(w - mean) - 1e-12
    return extreme / total


@pytest.mark.parametrize("diffs", [
    [1, 2, 3, 4, 5], [-1, 2, -3, 4, 5, 6], [1, 1, 2, -2, 3, 3, 4],
    [0.5, -1.5, 2.5, 3.5, -4.5, 5.5, 6.5, 7.5, 8.5, 9.5],
])
def test_exact_wilcoxon_matches_enumeration(diffs):
    # symmetric null, so the two-sided p equals the "as extreme" enumeration
    assert wilcoxon_signed_rank(diffs)[1] == pytest.approx(_enumerated_p(diffs))


def test_zero_differences_dropped():
    assert wilcoxon_signed_rank([0, 0, 1, 2, 3]) == wilcoxon_signed_rank([1, 2, 3])


def test_large_sample_normal_approximation():
    diffs = [((-1) ** k) * (k + 1) + 0.5 for k in range(40)]
    _, p = wilcoxon_signed_rank(diffs)
    ref = st.wilcoxon(diffs, method="approx", correction=True).pvalue
    assert p == pytest.approx(ref, rel=1e-6)


def test_uniform_sign_twenty_pairs_significant():
    w, p = wilcoxon_signed_rank([1.0] * 20)
    assert w == 210 and p < 0.05


def test_paired_t_matches_scipy():
    a = [3.1, 2.0, 5.5, 4.2, 1.0]
    b = [2.0, 2.5, 4.0, 4.0, 0.2]
    t, p = paired_t([x - y for x, y in zip(a, b)])
    ref = st.ttest_rel(a, b)
    assert t == pytest.approx(ref.statistic) and p == pytest.approx(ref.pvalue)


def test_marks():
    assert significance_mark(0.001) == "**"
    assert significance_mark(0.01) == "*"
    assert significance_mark(0.2) == ""


def test_identical_samples():
    c = compare_paired([1.0, 2.0, 3.0], [1.0, 2.0, 3.0])
    assert c.mean_diff == 0 and c.flags == {"wilcoxon": "", "t": ""}


def test_mismatched_lengths():
    with pytest.raises(ValueError):
        compare_paired([1.0], [1.0, 2.0])
