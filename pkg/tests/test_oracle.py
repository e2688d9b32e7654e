import pytest

from fdsmab.instances import JsspInstance, RcpspInstance, topological_order
from fdsmab.oracle import (
    OracleRefused, brute_force_feasible, brute_force_optimum, random_tiny_instance,
    solve_exhaustive,
)


def test_two_by_two_optimum(jssp2x2):
    assert brute_force_optimum(jssp2x2) == 6


def test_rcpsp_worked_optimum(rcpsp3):
    assert brute_force_optimum(rcpsp3) == 7


def test_empty_instance():
    assert brute_force_optimum(JsspInstance([], 0)) == 0


@pytest.mark.parametrize("cap, ok", [(5, False), (6, True)])
def test_feasibility(jssp2x2, cap, ok):
    assert brute_force_feasible(jssp2x2, cap) is ok


def test_cap_zero_with_positive_length():
    assert not brute_force_feasible(JsspInstance([[(0, 1)]], 1), 0)


def test_size_guard():
    big = JsspInstance([[(m, 1) for m in range(4)] for _ in range(3)], 4)
    with pytest.raises(OracleRefused):
        solve_exhaustive(big)


def test_tiny_generation_deterministic():
    assert random_tiny_instance("jssp", 1) == random_tiny_instance("jssp", 1)


def test_tiny_rcpsp_acyclic():
    inst = random_tiny_instance("rcpsp", 2)
    assert len(topological_order(inst.successors)) == inst.n_jobs


@pytest.mark.parametrize("kind", ["jssp", "rcpsp"])
def test_tiny_instances_within_guard(kind):
    for seed in range(20):
        inst = random_tiny_instance(kind, seed)
        opt = brute_force_optimum(inst)
        assert brute_force_feasible(inst, opt) and not brute_force_feasible(inst, opt - 1)


def test_rcpsp_infeasible_demand():
    inst = RcpspInstance([0, 2, 0], [[0], [3], [0]], [[1], [2], []], [2])
    assert solve_exhaustive(inst).optimum is None
