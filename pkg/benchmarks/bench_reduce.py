"""Time the compiled column reducer against the pure-Python one.

Workloads are boundary matrices of the complexes the package actually
builds.  Both backends must return identical output; the script stops if
they do not.

    python3 benchmarks/bench_reduce.py [--repeat 3]
"""

import argparse
import time

import numpy as np
import scipy.sparse as sp

from spstab.complexes import build_skew_complex, build_U_complex
from spstab.grouphomology import BarHomology, GModule, stabilizer
from spstab.homology import available_backends, reduce_columns
from spstab.ringkernel import parse_ring
from spstab.symplectic import sp_group


def workloads():
    F3, F5 = parse_ring("3"), parse_ring("5")
    C = build_U_complex(F3, 2, 4)
    yield "U(F3^4) d4", C.d(4)
    yield "U(F3^4) d3", C.d(3)
    yield "U(F5^2) d3", build_U_complex(F5, 1, 3).d(3)
    yield "Skew(F3) d5", build_skew_complex(F3, 5).d(5)
    G = sp_group(2, F3)
    B = BarHomology(G, GModule.cosets(G, stabilizer(G, (1, 0))), 2).C
    yield "bar SL2(F3) d3", B.d(3)


def run(mat, backend):
    M = sp.csc_matrix(mat)
    t = time.perf_counter()
    out = reduce_columns(M.shape[0], M.indptr, M.indices, M.data, backend)
    return time.perf_counter() - t, out


def same(a, b):
    return a.keys() == b.keys() and all(np.array_equal(np.asarray(a[k]), np.asarray(b[k])) for k in a)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    backends = available_backends()
    if "compiled" not in backends:
        print("compiled reducer not built; only the python backend is available")
    print(f"{'workload':18s} {'shape':>16s} {'nnz':>9s}" + "".join(f" {b:>10s}" for b in backends) + "   speedup")
    for name, mat in workloads():
        best, outs = {}, {}
        for b in backends:
            times = []
            for _ in range(args.repeat):
                dt, outs[b] = run(mat, b)
                times.append(dt)
            best[b] = min(times)
        if len(backends) > 1 and not same(outs["compiled"], outs["python"]):
            raise SystemExit(f"backends disagree on {name}")
        speed = f"{best['python'] / best['compiled']:8.1f}x" if "compiled" in best else "       -"
        shape = f"{mat.shape[0]}x{mat.shape[1]}"
        print(f"{name:18s} {shape:>16s} {mat.nnz:9d}" + "".join(f" {best[b]:9.3f}s" for b in backends)
              + f"  {speed}")


if __name__ == "__main__":
    main()
