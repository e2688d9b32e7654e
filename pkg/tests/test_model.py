import pytest

from fdsmab.model import Model, ModelError
from fdsmab.propagation import Propagator


def test_new_interval_fields():
    m = Model()
    v = m.new_interval(0, 100, 5)
    assert v == 0
    iv = m.variables[0]
    assert (iv.start_min, iv.start_max, iv.length) == (0, 100, 5)


def test_singleton_zero_length_is_legal():
    m = Model()
    m.new_interval(0, 0, 0)
    v = m.new_interval(7, 7, 0)
    assert m.variables[v].start_min == m.variables[v].start_max == 7


def test_inverted_window_rejected():
    with pytest.raises(ModelError):
        Model().new_interval(10, 3, 5)


@pytest.mark.parametrize("delay, expected", [(0, 3), (2, 5)])
def test_precedence_bound(delay, expected):
    m = Model()
    a = m.new_interval(0, 0, 3)
    b = m.new_interval(0, 20, 1)
    m.add_precedence(a, b, delay)
    p = Propagator(m)
    s = p.new_store()
    assert p.propagate(s) >= 0
    assert s.smin[b] == expected


def test_self_precedence_rejected():
    m = Model()
    a = m.new_interval(0, 5, 1)
    with pytest.raises(ModelError):
        m.add_precedence(a, a)


def test_no_overlap_pushes_second():
    m = Model()
    a = m.new_interval(0, 0, 3)
    b = m.new_interval(0, 10, 2)
    m.add_no_overlap([a, b])
    p = Propagator(m)
    s = p.new_store()
    p.propagate(s)
    assert s.smin[b] == 3


def test_no_overlap_single_element_rejected():
    m = Model()
    a = m.new_interval(0, 5, 1)
    with pytest.raises(ModelError):
        m.add_no_overlap([a])


def test_no_overlap_fixed_disjoint_unchanged():
    m = Model()
    vs = [m.new_interval(s, s, 2) for s in (0, 2, 5)]
    m.add_no_overlap(vs)
    p = Propagator(m)
    s = p.new_store()
    assert p.propagate(s) == 0
    assert s.bounds() == [(0, 0), (2, 2), (5, 5)]


def test_cumulative_exclusive_resource():
    m = Model()
    a = m.new_interval(0, 0, 3)
    b = m.new_interval(0, 10, 2)
    m.add_cumulative([a, b], [2, 2], 2)
    p = Propagator(m)
    s = p.new_store()
    p.propagate(s)
    assert s.smin[b] == 3


def test_cumulative_compatible_demands_unchanged():
    m = Model()
    a = m.new_interval(0, 5, 3)
    b = m.new_interval(0, 5, 3)
    m.add_cumulative([a, b], [1, 1], 2)
    p = Propagator(m)
    s = p.new_store()
    assert p.propagate(s) == 0
    assert s.bounds() == [(0, 5), (0, 5)]


def test_cumulative_demand_over_capacity_rejected():
    m = Model()
    a = m.new_interval(0, 5, 3)
    b = m.new_interval(0, 5, 3)
    with pytest.raises(ModelError):
        m.add_cumulative([a, b], [3, 1], 2)


def test_limit_objective_bounds():
    m = Model()
    v = m.new_interval(0, 100, 5)
    m.limit_objective(20)
    assert m.variables[v].start_max == 15
    m.limit_objective(1000)
    assert m.variables[v].start_max == 15


def test_limit_objective_wipeout_reported_by_propagation():
    m = Model()
    m.new_interval(0, 100, 5)
    m.limit_objective(4)
    p = Propagator(m)
    assert p.propagate(p.new_store()) == -1


def test_check_solution_and_makespan():
    m = Model()
    a = m.new_interval(0, 10, 3)
    b = m.new_interval(0, 10, 2)
    m.add_no_overlap([a, b])
    assert m.check_solution([0, 3])
    assert not m.check_solution([0, 2])
    assert m.makespan([0, 3]) == 5
