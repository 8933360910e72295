from fractions import Fraction

from hypothesis import given, settings, strategies as st

from strat import small_fractions

from superalg.linalg import mat_mul, mat_vec, nullspace, rank, rref, solve


@st.composite
def matrices(draw, max_n=5):
    nr = draw(st.integers(1, max_n))
    nc = draw(st.integers(1, max_n))
    return [[draw(small_fractions(6, 4)) for _ in range(nc)]
            for _ in range(nr)]


@settings(max_examples=60)
@given(matrices())
def test_rank_matches_rref_pivot_count(m):
    _, pivots = rref(m)
    assert rank(m) == len(pivots)


@settings(max_examples=60)
@given(matrices())
def test_nullspace_annihilated(m):
    basis = nullspace(m)
    assert len(basis) == len(m[0]) - rank(m)
    for v in basis:
        assert all(x == 0 for x in mat_vec(m, v))


@settings(max_examples=60)
@given(matrices(), st.data())
def test_solve_consistent_systems(m, data):
    x = [data.draw(small_fractions(4, 3)) for _ in m[0]]
    b = mat_vec(m, x)
    got = solve(m, b)
    assert got is not None
    assert mat_vec(m, got) == b


def test_solve_inconsistent():
    assert solve([[1, 1], [1, 1]], [1, 2]) is None
    assert solve([[0, 0]], [1]) is None
    assert solve([], []) == []


def test_rref_canonical():
    R, pivots = rref([[0, 2, 4], [1, 1, 1]])
    assert pivots == [0, 1]
    assert R[0][:2] == [1, 0] and R[1][:2] == [0, 1]


def test_mat_mul():
    a = [[1, 2], [3, 4]]
    b = [[0, 1], [1, 0]]
    assert mat_mul(a, b) == [[2, 1], [4, 3]]
    assert mat_vec(a, [1, 1]) == [3, 7]
    assert rank([[Fraction(1, 2), 1], [1, 2]]) == 1
