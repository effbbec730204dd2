from fractions import Fraction

import sympy
from hypothesis import given, settings, strategies as st

from qalgebroid import linalg

entries = st.builds(Fraction, st.integers(-3, 3), st.integers(1, 2))


@st.composite
def matrices(draw, max_dim=5):
    m = draw(st.integers(1, max_dim))
    n = draw(st.integers(1, max_dim))
    # bias towards low rank by mixing a few random rows
    rows = [[draw(entries) for _ in range(n)] for _ in range(draw(st.integers(1, m)))]
    out = []
    for _ in range(m):
        coeffs = [draw(st.integers(-2, 2)) for _ in rows]
        out.append([sum((c * r[j] for c, r in zip(coeffs, rows)), Fraction(0)) for j in range(n)])
    return out


def _sympy_rank(A):
    return sympy.Matrix([[sympy.Rational(x.numerator, x.denominator) for x in row] for row in A]).rank()


@settings(max_examples=80)
@given(matrices())
def test_rank_matches_sympy(A):
    assert linalg.rank(A) == _sympy_rank(A)


@settings(max_examples=60)
@given(matrices())
def test_nullspace_is_kernel_of_right_size(A):
    n = len(A[0])
    N = linalg.nullspace(A, n)
    assert len(N) == n - linalg.rank(A)
    for v in N:
        assert all(sum(a * b for a, b in zip(row, v)) == 0 for row in A)


@settings(max_examples=40)
@given(matrices(4))
def test_solve_recovers_consistent_rhs(A):
    n = len(A[0])
    x = [Fraction(i + 1, 2) for i in range(n)]
    b = [sum(a * v for a, v in zip(row, x)) for row in A]
    sol = linalg.solve(A, b, n)
    assert sol is not None
    assert [sum(a * v for a, v in zip(row, sol)) for row in A] == b


def test_inverse_and_inconsistent_system():
    A = [[Fraction(2), Fraction(1)], [Fraction(1), Fraction(1)]]
    Ai = linalg.inverse(A)
    assert linalg.matmul(A, Ai) == [[1, 0], [0, 1]]
    assert linalg.solve([[Fraction(1)], [Fraction(1)]], [Fraction(0), Fraction(1)], 1) is None


def test_empty_rank():
    assert linalg.rank([]) == 0
