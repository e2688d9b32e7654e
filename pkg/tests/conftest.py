import pytest

from fdsmab.instances import JsspInstance, RcpspInstance


@pytest.fixture
def jssp2x2():
    # job0: M0 len 3 then M1 len 2; job1: M1 len 2 then M0 len 3 (optimum 6)
    return JsspInstance([[(0, 3), (1, 2)], [(1, 2), (0, 3)]], 2, "two-by-two")


@pytest.fixture
def rcpsp3():
    # d = (2, 3, 2), demands (1, 2, 1), capacity 2, arc 1 -> 3 (optimum 7)
    succ = [[1, 2], [3], [4], [4], []]
    return RcpspInstance([0, 2, 3, 2, 0], [[0], [1], [2], [1], [0]], succ, [2], "three")
