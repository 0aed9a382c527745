import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from spstab.errors import CapExceeded, NotNondegenerate, RankBound
from spstab.ringkernel import parse_ring
from spstab.symplectic import sp_group
from spstab.unimodular import (
    SkewMat,
    U_codes,
    UnimodSeq,
    enumerate_U,
    enumerate_skew_plus,
    gram,
    gram_half_ok,
    gram_upper,
    is_normal_form,
    is_nondeg_unimodular,
    is_skew_nondegenerate,
    load_codes,
    lookup_rows,
    normal_form,
    orbit_count,
    orbit_partition,
    residue_rank,
    save_codes,
    skew_codes,
    vec_space,
)

F3, F5, Z9 = parse_ring("3"), parse_ring("5"), parse_ring("9")


def seq(n, *vecs):
    return UnimodSeq(n, tuple(tuple(v) for v in vecs))


def brute_U(q, n, R):
    """Filter all q-tuples of R^{2n} with the scalar predicate."""
    space = vec_space(n, R)
    out = []
    for codes in itertools.product(range(space.V), repeat=q):
        v = UnimodSeq(n, tuple(space.vector(c) for c in codes))
        if is_nondeg_unimodular(v, R):
            out.append(codes)
    return out


def test_skew_nondegenerate_examples():
    assert is_skew_nondegenerate(SkewMat(2, (1,)), F3)
    assert is_skew_nondegenerate(SkewMat(1, ()), F3)
    assert not is_skew_nondegenerate(SkewMat(2, (0,)), F3)
    assert is_skew_nondegenerate(SkewMat(0, ()), F3)


def test_skewmat_roundtrip():
    A = SkewMat(3, (1, 2, 0))
    M = A.matrix(F3)
    assert M == [[0, 1, 2], [2, 0, 0], [1, 0, 0]]
    assert SkewMat.from_matrix(M, F3) == A
    assert A.entry(2, 0, F3) == 1 and A.entry(1, 2, F3) == 0
    assert A.face(0) == SkewMat(2, (0,)) and A.face(2) == SkewMat(2, (1,))
    with pytest.raises(ValueError):
        SkewMat.from_matrix([[1, 0], [0, 0]], F3)


def test_gram_examples():
    assert gram(seq(1, (1, 0), (0, 1)), F3) == SkewMat(2, (1,))
    assert gram(seq(2, (1, 0, 0, 0)), F3) == SkewMat(1, ())
    assert gram(seq(2, (1, 0, 0, 0), (0, 0, 1, 0)), F3) == SkewMat(2, (0,))


def test_nondeg_unimodular_examples():
    assert is_nondeg_unimodular(seq(1, (1, 0), (0, 1)), F3)
    assert is_nondeg_unimodular(seq(1, (3, 1)), Z9)
    assert not is_nondeg_unimodular(seq(1, (3, 3)), Z9)
    assert not is_nondeg_unimodular(seq(2, (1, 0, 0, 0), (0, 0, 1, 0)), F3)  # singular Gram
    assert residue_rank([(3, 1), (6, 2)], Z9) == 1


@pytest.mark.parametrize("R,n,counts", [
    (F3, 1, [1, 8, 48, 192]),
    (F5, 1, [1, 24, 480, 7680]),
    (F3, 0, [1, 1, 1]),
])
def test_U_counts(R, n, counts):
    assert [len(U_codes(q, n, R)) for q in range(len(counts))] == counts


def test_U_counts_F3_rank4():
    assert [len(U_codes(q, 2, F3)) for q in range(1, 4)] == [80, 4320, 138240]


@pytest.mark.parametrize("R,n,q", [(F3, 1, 1), (F3, 1, 2), (F3, 1, 3), (Z9, 1, 2), (F5, 1, 2)])
def test_U_matches_brute_filter(R, n, q):
    assert [tuple(r) for r in U_codes(q, n, R).tolist()] == brute_U(q, n, R)


def test_U_is_sorted_and_threads_agree():
    import spstab.unimodular as um
    a = U_codes(3, 1, F5).copy()
    um._U_CACHE.pop((3, 1, F5))
    b = U_codes(3, 1, F5, threads=4)
    assert (a == b).all()
    keys = [tuple(r) for r in a.tolist()]
    assert keys == sorted(keys)


def test_cap():
    with pytest.raises(CapExceeded):
        U_codes(3, 1, parse_ring("7"), cap=100)


def test_save_load(tmp_path):
    codes = U_codes(2, 1, F3)
    path = tmp_path / "u2.jsonl"
    save_codes(path, codes, 1, F3)
    assert (load_codes(path, 1, F3) == codes).all()
    assert enumerate_U(1, 1, F3)[0] == seq(1, (0, 1))


def test_skew_counts():
    assert [len(skew_codes(q, F3)) for q in range(6)] == [1, 1, 2, 8, 48, 384]
    assert [len(skew_codes(q, F5)) for q in range(3)] == [1, 1, 4]


@pytest.mark.parametrize("R,n,q_max", [(F3, 1, 3), (F5, 1, 2)])
def test_gram_invariant_under_group(R, n, q_max):
    G = sp_group(2 * n, R)
    space = vec_space(n, R)
    for q in range(1, q_max + 1):
        codes = U_codes(q, n, R)
        base = gram_upper(codes, n, R)
        for g in G.E:
            perm = space.act(g)
            moved = perm[codes]
            assert (gram_upper(moved, n, R) == base).all()
            assert (lookup_rows(codes, moved, space.V) >= 0).all()


def test_gram_half_agrees_with_skew_test():
    for q in range(4):
        for row in U_codes(q, 1, F3).tolist():
            v = UnimodSeq(1, tuple(vec_space(1, F3).vector(c) for c in row))
            assert is_skew_nondegenerate(gram(v, F3), F3) == gram_half_ok(v, F3)


@pytest.mark.parametrize("R,n,q_max", [(F3, 1, 3), (F3, 2, 4), (F5, 1, 3), (Z9, 1, 3)])
def test_normal_form_exhaustive(R, n, q_max):
    for q in range(q_max + 1):
        for A in enumerate_skew_plus(q, R):
            u = normal_form(A, n, R)
            assert gram(u, R) == A
            assert is_normal_form(u, R) and is_nondeg_unimodular(u, R)
            if q <= 2 * n:
                assert residue_rank(u.vectors, R) == q


def test_normal_form_examples():
    assert normal_form(SkewMat(1, ()), 1, F5) == seq(1, (1, 0))
    for a in (1, 2, 3, 4):
        assert normal_form(SkewMat(2, (a,)), 1, F5) == seq(1, (1, 0), (0, a))
    with pytest.raises(RankBound):
        normal_form(SkewMat(4, (1, 1, 1, 1, 1, 1)), 1, F3)
    with pytest.raises(NotNondegenerate):
        normal_form(SkewMat(2, (0,)), 1, F3)


@given(st.data())
def test_normal_form_random_F7(data):
    R = parse_ring("7")
    q = data.draw(st.integers(0, 5))
    upper = tuple(data.draw(st.integers(0, 6)) for _ in range(q * (q - 1) // 2))
    A = SkewMat(q, upper)
    if not is_skew_nondegenerate(A, R):
        with pytest.raises(NotNondegenerate):
            normal_form(A, 2, R)
        return
    u = normal_form(A, 2, R)
    assert gram(u, R) == A and is_normal_form(u, R)


@pytest.mark.parametrize("R,n,expected", [
    (F3, 1, [(1, 1), (1, 1), (2, 2), (8, 8)]),
    (F5, 1, [(1, 1), (1, 1), (4, 4)]),
])
def test_orbit_counts(R, n, expected):
    assert [orbit_count(q, n, R) for q in range(len(expected))] == expected


def test_orbit_counts_rank4():
    assert [orbit_count(q, 2, F3) for q in (1, 2, 3)] == [(1, 1), (2, 2), (8, 8)]


def test_orbits_are_gram_classes():
    codes, labels = orbit_partition(3, 1, F3)
    grams = gram_upper(codes, 1, F3)
    for lab in np.unique(labels):
        assert len({tuple(g) for g in grams[labels == lab].tolist()}) == 1
