import pytest

from spstab.mwk import (
    MODES,
    milnor_k,
    milnor_witt_k,
    mw_to_milnor_check,
    mwk_report,
    product_well_defined,
    steinberg_pairs,
)
from spstab.ringkernel import parse_ring


def unit_group_oracle(R):
    """R* as an abstract group via element orders (all rings here have cyclic
    or Z/2 x cyclic unit groups)."""
    m = R.modulus
    orders = []
    for a in R.units():
        k, x = 1, a
        while x != 1:
            x, k = x * a % m, k + 1
        orders.append(k)
    return max(orders)


@pytest.mark.parametrize("spec,pairs", [
    ("3", [(2, 2)]),
    ("5", [(2, 4), (3, 3), (4, 2)]),
    ("9", [(2, 8), (5, 5), (8, 2)]),
    ("2", []),
])
def test_steinberg_pairs(spec, pairs):
    assert steinberg_pairs(parse_ring(spec)) == pairs


@pytest.mark.parametrize("spec,residue,units", [
    ("2", ["Z", "0", "0"], ["Z", "0", "0"]),
    ("3", ["Z", "Z/2", "0"], ["Z", "Z/2", "0"]),
    ("4", ["Z", "0", "0"], ["Z", "Z/2", "Z/2"]),
    ("5", ["Z", "Z/4", "0"], ["Z", "Z/4", "0"]),
    ("7", ["Z", "Z/6", "0"], ["Z", "Z/6", "0"]),
    ("9", ["Z", "Z/2", "0"], ["Z", "Z/6", "0"]),
])
def test_milnor(spec, residue, units):
    R = parse_ring(spec)
    assert [str(milnor_k(R, n)) for n in range(3)] == residue
    assert [str(milnor_k(R, n, over="units")) for n in range(3)] == units


@pytest.mark.parametrize("spec", ["3", "4", "5", "7", "9"])
def test_k1_is_unit_group(spec):
    R = parse_ring(spec)
    K1 = milnor_k(R, 1, over="units")
    assert K1.order == len(R.units())
    assert max(K1.torsion) == unit_group_oracle(R)


@pytest.mark.parametrize("spec,gr,integer", [
    ("2", ["0", "0"], ["0", "0"]),
    ("3", ["Z", "0"], ["Z", "0"]),
    ("4", ["Z", "Z"], ["Z", "Z"]),
    ("5", ["Z^3", "0"], ["Z^3", "Z^6"]),
    ("7", ["Z^5", "0"], ["Z^5", "Z^20"]),
    ("9", ["Z^5", "0"], ["Z^5", "Z^22"]),
])
def test_milnor_witt(spec, gr, integer):
    R = parse_ring(spec)
    assert [str(milnor_witt_k(R, n, "group_ring")) for n in (1, 2)] == gr
    assert [str(milnor_witt_k(R, n, "integer")) for n in (1, 2)] == integer


def test_mw_degree_one_is_augmentation_rank():
    # no relations in degree 1: the augmentation ideal is free of rank |R*| - 1
    for spec in ("3", "5", "7", "9"):
        R = parse_ring(spec)
        for mode in MODES:
            assert milnor_witt_k(R, 1, mode).free_rank == len(R.units()) - 1


@pytest.mark.parametrize("spec", ["3", "4", "5"])
@pytest.mark.parametrize("mode", MODES)
def test_product_and_forgetful_map(spec, mode):
    R = parse_ring(spec)
    assert product_well_defined(R, 1, 1, mode)
    assert mw_to_milnor_check(R, 2, mode)["pass"]
    assert mw_to_milnor_check(R, 1, mode)["pass"]


def test_bad_arguments():
    R = parse_ring("3")
    with pytest.raises(ValueError):
        milnor_witt_k(R, 0)
    with pytest.raises(ValueError):
        milnor_witt_k(R, 1, "other")
    with pytest.raises(ValueError):
        milnor_k(R, 1, over="field")


def test_report():
    rep = mwk_report(parse_ring("5"))
    assert rep["milnor"][1] == {"free_rank": 0, "torsion": [4]}
    assert rep["milnor_witt"][1]["integer"]["free_rank"] == 3
