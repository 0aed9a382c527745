import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from spstab.errors import NotAUnit, NotPrime, NotSkew, NotSquare, OddSize
from spstab.ringkernel import (
    FGAbelianGroup,
    Lattice,
    Ring,
    det,
    invariant_factors,
    make_local_ring,
    parse_ring,
    pfaffian,
    smith_decomposition,
    solve_mod,
    unit_inverse,
)


def leibniz(M):
    n = len(M)
    total = 0
    for perm in itertools.permutations(range(n)):
        inv = sum(1 for i in range(n) for j in range(i + 1, n) if perm[i] > perm[j])
        prod = 1
        for i in range(n):
            prod *= M[i][perm[i]]
        total += -prod if inv % 2 else prod
    return total


def matmul(A, B):
    return [[sum(A[i][k] * B[k][j] for k in range(len(B))) for j in range(len(B[0]))]
            for i in range(len(A))]


int_matrix = st.integers(1, 5).flatmap(
    lambda n: st.lists(st.lists(st.integers(-20, 20), min_size=n, max_size=n),
                       min_size=n, max_size=n))


@pytest.mark.parametrize("spec,p,k", [("3", 3, 1), ("9", 3, 2), ("3^2", 3, 2), ("2^3", 2, 3),
                                      ("49", 7, 2)])
def test_parse_ring(spec, p, k):
    R = parse_ring(spec)
    assert (R.p, R.k, R.modulus) == (p, k, p ** k)


@pytest.mark.parametrize("spec", ["6", "1", "0", "abc", "4^0", "12", "6^1"])
def test_parse_ring_rejects(spec):
    with pytest.raises(NotPrime):
        parse_ring(spec)


def test_units_and_ideal():
    R = parse_ring("9")
    assert R.units() == [1, 2, 4, 5, 7, 8]
    assert R.maximal_ideal() == [0, 3, 6]
    assert R.residue(7) == 1
    with pytest.raises(NotAUnit):
        unit_inverse(R, 6)
    assert all(x * unit_inverse(R, x) % 9 == 1 for x in R.units())


def test_make_local_ring():
    assert make_local_ring(5) == Ring(5, 1)
    with pytest.raises(NotPrime):
        make_local_ring(4)


@given(int_matrix)
def test_det_matches_leibniz(M):
    assert det(M) == leibniz(M)


def test_det_not_square():
    with pytest.raises(NotSquare):
        det([[1, 2]])


def test_pfaffian_small():
    assert pfaffian([]) == 1
    assert pfaffian([[0, 1], [-1, 0]]) == 1
    a, b, c, d, e, f = 2, 3, 5, 7, 11, 13
    A = [[0, a, b, c], [-a, 0, d, e], [-b, -d, 0, f], [-c, -e, -f, 0]]
    assert pfaffian(A) == a * f - b * e + c * d
    with pytest.raises(OddSize):
        pfaffian([[0]])
    with pytest.raises(NotSkew):
        pfaffian([[1, 0], [0, 0]])


@st.composite
def skew(draw, max_half=4):
    n = 2 * draw(st.integers(0, max_half))
    A = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            v = draw(st.integers(-5, 5))
            A[i][j], A[j][i] = v, -v
    return A


@given(skew())
def test_pfaffian_squares_to_det(A):
    assert pfaffian(A) ** 2 == det(A)


@given(int_matrix)
def test_smith_decomposition(M):
    D, U, V, Ui, Vi = smith_decomposition(M, want_inverses=True)
    assert matmul(matmul(U, M), V) == D
    n = len(M)
    ident = [[int(i == j) for j in range(n)] for i in range(n)]
    assert matmul(U, Ui) == ident and matmul(V, Vi) == ident
    diag = [D[i][i] for i in range(n)]
    assert all(D[i][j] == 0 for i in range(n) for j in range(n) if i != j)
    nz = [d for d in diag if d]
    assert all(d > 0 for d in nz)
    assert all(b % a == 0 for a, b in zip(nz, nz[1:]))
    assert abs(det(M)) == abs(leibniz(D))


def test_invariant_factors_known():
    assert invariant_factors([[2, 0], [0, 3]]) == [1, 6]
    assert invariant_factors([[2, 4, 4], [-6, 6, 12], [10, -4, -16]]) == [2, 6, 12]


def test_fg_abelian_group():
    G = FGAbelianGroup.from_relations([[2, 0], [0, 3]], 3)
    assert G == FGAbelianGroup(1, (6,))
    assert str(G) == "Z/6 + Z"
    assert G.order is None and FGAbelianGroup(0, (2, 4)).order == 8
    assert FGAbelianGroup().is_zero() and str(FGAbelianGroup()) == "0"
    with pytest.raises(ValueError):
        FGAbelianGroup(0, (2, 3))


@given(st.integers(1, 4), st.data())
def test_solve_mod(n, data):
    R = parse_ring(data.draw(st.sampled_from(["5", "9", "4"])))
    m = R.modulus
    A = data.draw(st.lists(st.lists(st.integers(0, m - 1), min_size=n, max_size=n),
                           min_size=n, max_size=n))
    b = data.draw(st.lists(st.integers(0, m - 1), min_size=n, max_size=n))
    if not R.is_unit(det(A, R)):
        with pytest.raises(NotAUnit):
            solve_mod(A, b, R)
        return
    x = solve_mod(A, b, R)
    assert [sum(A[i][j] * x[j] for j in range(n)) % m for i in range(n)] == [v % m for v in b]


def test_lattice_membership():
    L = Lattice([[2, 0], [1, 3]], 2)
    assert L.contains([3, 3]) and L.contains([0, 6]) and not L.contains([1, 0])
    assert Lattice([], 3).contains([0, 0, 0]) and not Lattice([], 1).contains([1])
