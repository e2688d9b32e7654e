import pytest

from fdsmab.model import Model
from fdsmab.propagation import FAIL, DomainStore, Propagator, StaleMarkError, local_rating, propagate


def test_chain_reduces_successor():
    m = Model()
    a = m.new_interval(0, 0, 3)
    b = m.new_interval(0, 10, 2)
    m.add_precedence(a, b)
    s = DomainStore.from_model(m)
    assert propagate(s, m) == 1
    assert s.smin[b] == 3


def test_unavoidable_overlap_fails():
    m = Model()
    a = m.new_interval(0, 0, 3)
    b = m.new_interval(0, 0, 3)
    m.add_no_overlap([a, b])
    assert propagate(DomainStore.from_model(m), m) == FAIL


def test_fixpoint_is_idempotent():
    m = Model()
    a = m.new_interval(0, 0, 3)
    b = m.new_interval(0, 10, 2)
    m.add_precedence(a, b)
    p = Propagator(m)
    s = p.new_store()
    p.propagate(s)
    assert p.propagate(s) == 0


def test_branch_own_cut_not_counted():
    m = Model()
    a = m.new_interval(0, 10, 3)
    b = m.new_interval(0, 20, 2)
    m.add_precedence(a, b)
    p = Propagator(m)
    s = p.new_store()
    p.propagate(s)
    # a >= 5 pushes b to >= 8: one reduced variable besides the branch
    assert p.propagate(s, (a, 4, False)) == 1
    assert s.smin[b] == 8


def test_checkpoint_restore_exact():
    s = DomainStore([0, 0, 0], [10, 10, 10])
    mark = s.checkpoint()
    s.set_min(0, 3)
    s.set_max(1, 4)
    s.set_min(2, 7)
    s.restore(mark)
    assert s.bounds() == [(0, 10)] * 3


def test_empty_checkpoint_is_noop():
    s = DomainStore([1], [5])
    mark = s.checkpoint()
    s.restore(mark)
    assert s.bounds() == [(1, 5)]
    assert s.depth == 0


def test_out_of_order_restore_raises():
    s = DomainStore([0], [10])
    outer = s.checkpoint()
    inner = s.checkpoint()
    s.restore(outer)
    with pytest.raises(StaleMarkError):
        s.restore(inner)


def test_nested_restore_unwinds_inner():
    s = DomainStore([0, 0], [10, 10])
    outer = s.checkpoint()
    s.set_min(0, 2)
    s.checkpoint()
    s.set_min(1, 5)
    s.restore(outer)
    assert s.bounds() == [(0, 10), (0, 10)]


@pytest.mark.parametrize("outcome, expected", [(FAIL, 0.0), (0, 2.0), (3, 1.125)])
def test_local_rating(outcome, expected):
    assert local_rating(outcome) == expected


def test_local_rating_simplified_mode():
    assert local_rating(5, sfds_mode=True) == 1.0
    assert local_rating(FAIL, sfds_mode=True) == 0.0


def test_nogood_clause_unit_propagates():
    m = Model()
    a = m.new_interval(0, 10, 1)
    b = m.new_interval(0, 10, 1)
    p = Propagator(m)
    s = p.new_store()
    # clause: a > 4 or b <= 3
    p.add_nogood([(a, 4, False), (b, 3, True)])
    assert p.propagate(s, (a, 4, True)) >= 0
    assert s.smax[b] == 3


def test_cumulative_energy_overload_fails():
    m = Model()
    vs = [m.new_interval(0, 2, 3) for _ in range(3)]
    m.add_cumulative(vs, [1, 1, 1], 1)
    # three unit-demand jobs of length 3 within [0, 5) on capacity 1
    assert propagate(DomainStore.from_model(m), m) == FAIL
