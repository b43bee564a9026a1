from fractions import Fraction

from derham import linalg


def F(a, b=1):
    return Fraction(a, b)


def test_rank_basic():
    assert linalg.rank([[F(1), F(2)], [F(2), F(4)]]) == 1
    assert linalg.rank([[F(1), F(0)], [F(0), F(1)]]) == 2
    assert linalg.rank([]) == 0
    assert linalg.rank([[F(0), F(0)]]) == 0


def test_rank_rectangular():
    m = [[F(1), F(2), F(3)], [F(2), F(4), F(6)], [F(1), F(0), F(1)]]
    assert linalg.rank(m) == 2


def test_solve():
    a = [[F(2), F(0)], [F(0), F(3)]]
    assert linalg.solve(a, [F(4), F(9)]) == [F(2), F(3)]
    # inconsistent
    assert linalg.solve([[F(1)], [F(1)]], [F(0), F(1)]) is None
    # underdetermined: free variables pinned to zero
    sol = linalg.solve([[F(1), F(1)]], [F(5)])
    assert sol == [F(5), F(0)]
    # no equations
    assert linalg.solve([], []) == []


def test_exactness_of_arithmetic():
    # Hilbert-like fragile matrix: exact rank must be full
    m = [[Fraction(1, i + j + 1) for j in range(5)] for i in range(5)]
    assert linalg.rank(m) == 5
