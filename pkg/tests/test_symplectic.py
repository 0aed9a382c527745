import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from spstab.errors import CapExceeded, NotAUnit, NotOddSymplectic, OddSize, RankOrder
from spstab.ringkernel import parse_ring
from spstab.symplectic import (
    FinGroup,
    conj_diag,
    embed,
    enumerate_group,
    is_symplectic,
    matrix_size,
    monoid_act,
    monoid_act_matrix,
    odd_compose,
    odd_decompose,
    rho,
    sp_generators,
    sp_group,
    sp_order,
    standard_symplectic_form,
    to_matrix,
)


@pytest.fixture(scope="module")
def groups():
    R = parse_ring("3")
    return {r: sp_group(r, R) for r in range(4)}


def rand_element(G, rng):
    return G.element(int(rng.integers(len(G))))


def test_standard_form():
    assert standard_symplectic_form(0) == []
    assert standard_symplectic_form(1) == [[0, 1], [-1, 0]]
    psi2 = standard_symplectic_form(2)
    assert psi2[0][1] == 1 and psi2[2][3] == 1 and psi2[1][0] == -1 and psi2[0][3] == 0


def test_is_symplectic():
    R = parse_ring("3")
    assert is_symplectic([[1, 0], [0, 1]], R)
    assert is_symplectic([[1, 1], [0, 1]], parse_ring("9"))
    assert not is_symplectic([[2, 0], [0, 1]], R)
    with pytest.raises(OddSize):
        is_symplectic([[1]], R)


@pytest.mark.parametrize("r,order", [(0, 1), (1, 3), (2, 24), (3, 648)])
def test_orders_F3(groups, r, order):
    assert len(groups[r]) == order
    assert r == 0 or all(is_symplectic(g, parse_ring("3")) for g in groups[r].E[:50].tolist())


def test_order_formula():
    assert sp_order(1, 3) == 24 and sp_order(2, 3) == 51840 and sp_order(1, 5) == 120
    assert len(sp_group(2, parse_ring("5"))) == 120
    assert len(sp_group(2, parse_ring("9"))) == sp_order(1, 3, 2)


def test_sl2_from_two_transvections():
    R = parse_ring("3")
    G = enumerate_group([((1, 1), (0, 1)), ((1, 0), (1, 1))], R)
    assert len(G) == 24
    with pytest.raises(CapExceeded):
        enumerate_group([((1, 1), (0, 1)), ((1, 0), (1, 1))], R, cap=10)


def test_generators_are_symplectic():
    for spec in ("3", "5", "9"):
        R = parse_ring(spec)
        for r in range(1, 5):
            for g in sp_generators(r, R):
                assert len(g) == matrix_size(r) and is_symplectic(g, R)


def test_group_table_laws(groups):
    G = groups[2]
    T = G.table()
    N = len(G)
    assert (T[G.identity] == np.arange(N)).all() and (T[:, G.identity] == np.arange(N)).all()
    inv = G.inverse
    assert (T[np.arange(N), inv] == G.identity).all()
    a, b, c = np.meshgrid(np.arange(N), np.arange(N), np.arange(N), indexing="ij")
    assert (T[T[a, b], c] == T[a, T[b, c]]).all()


def test_group_save_load(tmp_path, groups):
    G = groups[2]
    path = tmp_path / "g.npz"
    G.save(path)
    H = FinGroup.load(path)
    assert (H.E == G.E).all() and H.gens == G.gens


def test_embed_examples(groups):
    R = parse_ring("3")
    assert embed((), 0, 2) == ((1, 0), (0, 1))
    M = groups[2].element(5)
    g = odd_decompose(embed(M, 2, 3), R)
    assert g.c == 0 and g.u == (0, 0) and g.M == M
    assert embed(((1, 2), (0, 1)), 1, 2) == ((1, 2), (0, 1))
    with pytest.raises(RankOrder):
        embed(M, 3, 2)


def test_embed_functorial_and_homomorphic(groups):
    R = parse_ring("3")
    rng = np.random.default_rng(0)
    for r, s, t in itertools.combinations_with_replacement(range(5), 3):
        if r > 3:
            continue
        A = rand_element(groups[r], rng)
        assert embed(embed(A, r, s), s, t) == embed(A, r, t)
        assert t == 0 or is_symplectic(embed(A, r, t), R)
    for r, s in [(1, 2), (2, 3), (1, 3), (2, 4)]:
        for _ in range(20):
            A, B = rand_element(groups[r], rng), rand_element(groups[r], rng)
            AB = (np.array(A) @ np.array(B)) % 3
            lhs = np.array(embed(AB.tolist(), r, s))
            rhs = (np.array(embed(A, r, s)) @ np.array(embed(B, r, s))) % 3
            assert (lhs == rhs).all()


@given(st.data())
def test_odd_roundtrip(data):
    R = parse_ring(data.draw(st.sampled_from(["3", "5", "9"])))
    m = R.modulus
    c = data.draw(st.integers(0, m - 1))
    u = tuple(data.draw(st.lists(st.integers(0, m - 1), min_size=2, max_size=2)))
    M = sp_group(2, R).element(data.draw(st.integers(0, 23)) if m == 3 else 0)
    A = odd_compose(c, u, M, R)
    assert is_symplectic(A, R) and all(A[i][0] == (1 if i == 0 else 0) for i in range(4))
    g = odd_decompose(A, R)
    assert (g.c, g.u, g.M) == (c, u, M)
    assert to_matrix(g, R) == A and rho(g) == M


def test_odd_decompose_rejects():
    R = parse_ring("3")
    with pytest.raises(NotOddSymplectic):
        odd_decompose(((0, 1), (-1 % 3, 0)), R)
    with pytest.raises(NotOddSymplectic):
        odd_decompose(((1,),), R)


def test_monoid_action_is_endomorphism(groups):
    R = parse_ring("3")
    G = groups[3]
    T = G.table()
    for a in range(3):
        imgs = G.indices_of(np.array([monoid_act_matrix(a, A, R) for A in G.E.tolist()]))
        assert (imgs[T] == T[imgs[:, None], imgs[None, :]]).all()
    g = odd_decompose(G.element(100), R)
    assert monoid_act(1, g, R) == g
    zero = monoid_act(0, g, R)
    assert zero.c == 0 and zero.u == (0, 0) and zero.M == g.M
    for a, b in itertools.product(range(3), repeat=2):
        assert monoid_act(a, monoid_act(b, g, R), R) == monoid_act(a * b % 3, g, R)


def test_conj_diag_matches_monoid_action():
    R = parse_ring("5")
    G = sp_group(3, R)
    rng = np.random.default_rng(1)
    for _ in range(100):
        A = rand_element(G, rng)
        a = int(rng.integers(1, 5))
        assert conj_diag(a, A, R) == monoid_act_matrix(a, A, R)
        b = int(rng.integers(1, 5))
        assert conj_diag(a, conj_diag(b, A, R), R) == conj_diag(a * b % 5, A, R)
    assert conj_diag(1, A, R) == tuple(tuple(int(x) % 5 for x in row) for row in A)
    with pytest.raises(NotAUnit):
        conj_diag(0, A, R)
