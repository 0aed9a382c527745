"""Acceptance criteria, one test each.  Every test records a status line;
the lines are printed together when the module finishes."""

import random
import time

import pytest

from spstab import cli
from spstab.complexes import (
    build_aux_complex,
    build_skew_complex,
    build_U_complex,
    check_chain_map,
    endgame_limit_check,
    phi_chain_map,
)
from spstab.grouphomology import (
    bar_homology,
    d1_shapiro_square,
    relative_decomposition,
    relative_quasilinearity_check,
    stabilizer,
    shapiro_check,
    vindep_check,
)
from spstab.homology import complex_homology
from spstab.monoidring import Z0RElem
from spstab.mwk import milnor_k, milnor_witt_k
from spstab.ringkernel import parse_ring
from spstab.symplectic import sp_group
from spstab.unimodular import (
    enumerate_skew_plus,
    gram,
    is_normal_form,
    normal_form,
    orbit_count,
)

LINES: dict = {}
F3, F5, F7 = parse_ring("3"), parse_ring("5"), parse_ring("7")
RANDOM_RINGS = [parse_ring(s) for s in ("4", "9", "5", "7")]


@pytest.fixture(scope="module", autouse=True)
def summary(request):
    yield
    tr = request.config.pluginmanager.get_plugin("terminalreporter")
    write = tr.write_line if tr else print
    write("")
    write("acceptance summary")
    for k in sorted(LINES):
        write(LINES[k])


def record(num, ok, elapsed, limit, detail):
    within = limit is None or elapsed < limit
    status = "PASS" if ok and within else "FAIL"
    if ok is None:
        status = "REPORT"
    bound = f" (limit {limit}s)" if limit else ""
    LINES[num] = f"criterion {num:2d}: {status}  {elapsed:.2f}s{bound}  {detail}"
    print(LINES[num])
    if ok is not None:
        assert ok, detail
        assert within, f"took {elapsed:.1f}s, limit {limit}s"


def test_c01_complexes_square_to_zero():
    t = time.perf_counter()
    built = []
    for R, n, q in ((F3, 1, 3), (F5, 1, 3), (F3, 2, 4)):
        C = build_U_complex(R, n, q)
        built.append(all(C.dd_is_zero(p) for p in C.degrees))
    S = build_skew_complex(F3, 4)
    built.append(all(S.dd_is_zero(p) for p in S.degrees))
    aux = []
    for R, n, r in ((F3, 1, 0), (F3, 1, 1), (F5, 1, 0), (F5, 1, 1), (F3, 2, 0), (F3, 2, 1)):
        A = build_aux_complex(R, n, r)
        full = build_U_complex(R, n, 2 * r + 1 if r < n else 2 * n + 1)
        aux.append(all(A.dd_is_zero(p) for p in A.degrees)
                   and check_chain_map(A, full, phi_chain_map(A, full)))
    ok = all(built) and all(aux)
    record(1, ok, time.perf_counter() - t, 60,
           f"d o d = 0 on {len(built)} complexes, {len(aux)} auxiliary complexes with chain maps")


def test_c02_normal_form_exhaustive():
    t = time.perf_counter()
    count, ok = 0, True
    for n, q_max in ((1, 3), (2, 4)):
        for q in range(q_max + 1):
            for A in enumerate_skew_plus(q, F3):
                u = normal_form(A, n, F3)
                ok &= gram(u, F3) == A and is_normal_form(u, F3)
                count += 1
    record(2, ok, time.perf_counter() - t, 30, f"{count} skew matrices over F3")


def test_c03_orbit_counts():
    t = time.perf_counter()
    f3 = [orbit_count(q, 1, F3) for q in (1, 2, 3)]
    f5 = [orbit_count(q, 1, F5) for q in (1, 2)]
    ok = f3 == [(1, 1), (2, 2), (8, 8)] and f5 == [(1, 1), (4, 4)]
    record(3, ok, time.perf_counter() - t, 300, f"F3 {[o for o, _ in f3]}, F5 {[o for o, _ in f5]}")


def test_c04_multilinearity():
    t = time.perf_counter()
    res = [cli.suite_multlin(R, 1000, seed=2024) for R in RANDOM_RINGS]
    fails = sum(r["failures"] if isinstance(r["failures"], int) else len(r["failures"]) for r in res)
    record(4, all(r["pass"] for r in res), time.perf_counter() - t, 60,
           f"4 x 1000 instances, {fails} failures")


def test_c05_ffitpa():
    t = time.perf_counter()
    res = [cli.suite_ffitpa(R, 500, seed=2024) for R in RANDOM_RINGS]
    record(5, all(r["pass"] for r in res), time.perf_counter() - t, 60, "4 x 500 instances")


def test_c06_endgame():
    t = time.perf_counter()
    rng = random.Random(2024)
    ok, n = True, 0
    for R in (F5, F7):
        m = R.modulus
        for _ in range(50):
            a, b, c = (rng.choice(R.units()) for _ in range(3))
            inv = pow(a * c, -1, m)
            ok &= endgame_limit_check(a, b, c, R) == Z0RElem.basis(inv * inv % m, R)
            n += 1
    record(6, ok, time.perf_counter() - t, 60, f"{n} unit triples over F5, F7")


def test_c07_shapiro():
    t = time.perf_counter()
    G = sp_group(2, F3)
    r = shapiro_check(G, stabilizer(G, (1, 0)), 2)
    ok = r["pass"] and r["G_side"] == ["Z", "Z/3", "0"]
    record(7, ok, time.perf_counter() - t, 300, f"G side {r['G_side']}, H side {r['H_side']}")


def test_c08_d1_square():
    t = time.perf_counter()
    r = d1_shapiro_square(F3, 2)
    record(8, r["pass"], time.perf_counter() - t, 600,
           f"p <= 2, equal in degrees {[d['p'] for d in r['degrees'] if d['equal']]}")


def test_c09_relative_localization():
    t = time.perf_counter()
    dec = relative_decomposition(F3, 1, 1)
    r = relative_quasilinearity_check(F3, 1, 1, [0, 1], 3, 50, seed=2024, decomposition=dec)
    ok = r["pass"] and r["asserted"]
    tilde = dec["degrees"][1]["H_tilde_group"]
    record(9, ok, time.perf_counter() - t, 900,
           f"{r['passes']}/{r['trials']} sigma trials, H~_1 = {tilde}")


def test_c10_vindep():
    t = time.perf_counter()
    r = vindep_check(F3, 1, 1, 1)
    record(10, r["pass"], time.perf_counter() - t, None,
           f"{r['sequences']} spanning sequences, {r['comparisons']} comparisons")


def test_c11_pfaffian():
    t = time.perf_counter()
    rings = [parse_ring(s) for s in ("2", "3", "4", "5", "7", "9")]
    res = [cli.suite_pfaffian(R, 500, seed=2024) for R in rings]
    record(11, all(r["pass"] for r in res), time.perf_counter() - t, None,
           f"{len(rings)} x 500 skew matrices, sizes <= 8")


def test_c12_milnor_k2():
    t = time.perf_counter()
    k3, k5 = milnor_k(F3, 2), milnor_k(F5, 2)
    record(12, k3.is_zero() and k5.is_zero(), time.perf_counter() - t, 60,
           f"K2(F3) = {k3}, K2(F5) = {k5}")


def test_c13_report_only():
    t = time.perf_counter()
    vals = {
        "U(F3^2)": complex_homology(build_U_complex(F3, 1, 3)),
        "U(F5^2)": complex_homology(build_U_complex(F5, 1, 3)),
        "Skew(F3)": complex_homology(build_skew_complex(F3, 4)),
        "Skew(F5)": complex_homology(build_skew_complex(F5, 3)),
    }
    text = "; ".join(f"{k}: {[str(h) for h in v]}" for k, v in vals.items())
    mw = {mode: str(milnor_witt_k(F3, 2, mode)) for mode in ("group_ring", "integer")}
    H1 = bar_homology(sp_group(3, F3), p_max=1, h1_generators=True)[1]
    record(13, None, time.perf_counter() - t, None,
           f"{text}; K^MW_2(F3) {mw}; H_1(Sp3(F3)) = {H1} (SNF oracle)")
