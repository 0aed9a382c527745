"""Batch runner: ``spstab <command> [options]`` writes one JSON report per run.

Exit status is 0 when every ``pass`` field in the report is true, 1 on any
failed check and 2 on a configuration error.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import complexes as cx
from . import grouphomology as gh
from . import mwk
from .errors import CapExceeded, ConfigError, NotPrime, SpstabError
from .homology import complex_homology
from .monoidring import PolyR, Z0RElem, multlin_verify, phi_t, s_poly
from .ringkernel import (
    FGAbelianGroup,
    Ring,
    det,
    parse_ring,
    pfaffian,
    smith_decomposition,
    unit_inverse,
)
from .symplectic import sp_group
from .unimodular import orbit_count

SCHEMA = 1
COMMANDS = ("verify", "orbits", "complexes", "group-homology", "limits", "mwk")
SUITES = {
    "verify": ("multlin", "ffitpa", "pfaffian", "snf"),
    "orbits": ("orbits",),
    "complexes": ("u", "skew", "aux"),
    "group-homology": ("shapiro", "d1", "vindep", "relative", "quasilinear", "stable"),
    "limits": ("endgame", "admissible"),
    "mwk": ("steinberg", "milnor", "milnor_witt", "product", "surjection"),
}
# heavier items only run when named with --suite
OPT_IN = {"stable"}


def _rng(seed: int, i: int) -> np.random.Generator:
    return np.random.default_rng([seed, i])


def _random_poly(rng, deg: int, R: Ring) -> PolyR:
    c = [int(x) for x in rng.integers(0, R.modulus, size=deg + 1)]
    c[-1] = int(rng.choice(R.units()))
    return PolyR(c, R)


# ------------------------------------------------------------ verify suites

def suite_multlin(R: Ring, trials: int, seed: int, m_max: int = 7) -> dict:
    """Alternating subset-sum identity for products of polynomials."""
    fails = []
    for i in range(trials):
        rng = _rng(seed, i)
        m = int(rng.integers(2, m_max + 1))
        k = int(rng.integers(1, 4))
        budget = m - 1
        degs = []
        for _ in range(k):
            d = int(rng.integers(0, budget + 1))
            degs.append(d)
            budget -= d
        polys = [_random_poly(rng, d, R) for d in degs]
        x = [int(v) for v in rng.integers(0, R.modulus, size=m)]
        if not multlin_verify(x, polys, R):
            fails.append({"trial": i, "x": x, "polys": [p.coeffs for p in polys]})
    return {"suite": "multlin", "ring": str(R), "trials": trials, "failures": fails,
            "pass": not fails}


def suite_ffitpa(R: Ring, trials: int, seed: int, m_max: int = 7) -> dict:
    """phi_t(s_p(a) - <p(0)>) = 0 whenever 1 <= t deg p < len(a)."""
    fails = []
    for i in range(trials):
        rng = _rng(seed, i)
        m = int(rng.integers(2, m_max + 1))
        d = int(rng.integers(1, m))
        t = int(rng.integers(1, (m - 1) // d + 1))
        p = _random_poly(rng, d, R)
        a = [int(v) for v in rng.integers(0, R.modulus, size=m)]
        val = phi_t(s_poly(a, p, R) - Z0RElem.basis(p(0), R), t, R)
        if val:
            fails.append({"trial": i, "a": a, "p": p.coeffs, "t": t, "value": val})
    return {"suite": "ffitpa", "ring": str(R), "trials": trials, "failures": fails,
            "pass": not fails}


def random_skew(rng, size: int, R: Ring) -> list[list[int]]:
    A = [[0] * size for _ in range(size)]
    for i in range(size):
        for j in range(i + 1, size):
            v = int(rng.integers(0, R.modulus))
            A[i][j], A[j][i] = v, (-v) % R.modulus
    return A


def suite_pfaffian(R: Ring, trials: int, seed: int, max_size: int = 8) -> dict:
    fails = []
    for i in range(trials):
        rng = _rng(seed, i)
        size = 2 * int(rng.integers(0, max_size // 2 + 1))
        A = random_skew(rng, size, R)
        pf = pfaffian(A, R)
        if pf * pf % R.modulus != det(A, R):
            fails.append({"trial": i, "matrix": A})
    return {"suite": "pfaffian", "ring": str(R), "trials": trials, "failures": fails,
            "pass": not fails}


def _snf_ok(M) -> bool:
    D, U, V, _, _ = smith_decomposition(M)
    m, n = len(M), len(M[0])
    prod = [[sum(U[i][k] * sum(M[k][t] * V[t][j] for t in range(n)) for k in range(m))
             for j in range(n)] for i in range(m)]
    if prod != D:
        return False
    if any(D[i][j] for i in range(m) for j in range(n) if i != j):
        return False
    diag = [D[i][i] for i in range(min(m, n))]
    if any(x < 0 for x in diag):
        return False
    for a, b in zip(diag, diag[1:]):
        if (a == 0 and b != 0) or (a and b % a):
            return False
    return abs(det(U)) == 1 and abs(det(V)) == 1


def suite_snf(trials: int, seed: int, max_dim: int = 6) -> dict:
    fails = []
    for i in range(trials):
        rng = _rng(seed, i)
        m, n = (int(x) for x in rng.integers(1, max_dim + 1, size=2))
        M = [[int(x) for x in row] for row in rng.integers(-9, 10, size=(m, n))]
        if not _snf_ok(M):
            fails.append({"trial": i, "matrix": M})
    return {"suite": "snf", "trials": trials, "failures": fails, "pass": not fails}


# ------------------------------------------------------------------ orbits

def run_orbits(R: Ring, n: int, q_max: int) -> list[dict]:
    out = []
    for q in range(q_max + 1):
        orbits, skew = orbit_count(q, n, R)
        out.append({"suite": "orbits", "q": q, "n": n, "orbits": orbits,
                    "skew_plus": skew, "pass": orbits == skew})
    return out


# --------------------------------------------------------------- complexes

HOMOLOGY_CELL_LIMIT = 60_000


def _groups_json(groups) -> list:
    return [g.to_json() for g in groups]


def _report_homology(C) -> dict:
    """Homology for the report, skipped on complexes too large to reduce densely."""
    size = sum(C.rank(p) for p in C.degrees)
    if size > HOMOLOGY_CELL_LIMIT:
        return {"homology": None, "homology_skipped": f"{size} cells"}
    return {"homology": _groups_json(complex_homology(C))}


def run_complexes(R: Ring, n: int, q_max: int | None, suites, threads: int = 1) -> list[dict]:
    out = []
    q_top = 2 * n if q_max is None else q_max
    from .unimodular import U_codes
    for q in range(q_top + 2):
        try:
            U_codes(q, n, R, threads=threads)  # warm the cache
        except CapExceeded:
            break
    if "u" in suites:
        C = cx.build_U_complex(R, n, q_top)
        dd = all(C.dd_is_zero(p) for p in C.degrees)
        out.append({"suite": "u", "n": n, "q_max": q_top, "ranks": [C.rank(p) for p in C.degrees],
                    "dd_zero": dd, **_report_homology(C), "homology_asserted": False,
                    "pass": dd})
    if "skew" in suites:
        S = cx.build_skew_complex(R, q_top)
        dd = all(S.dd_is_zero(p) for p in S.degrees)
        out.append({"suite": "skew", "q_max": q_top, "ranks": [S.rank(p) for p in S.degrees],
                    "dd_zero": dd, **_report_homology(S), "homology_asserted": False,
                    "pass": dd})
    if "aux" in suites:
        try:
            full = cx.build_U_complex(R, n, 2 * n + 1)
        except CapExceeded:
            full = cx.build_U_complex(R, n, 2 * n)
        for r in range(n + 1):
            try:
                if r == n and full.rank(2 * n + 1) == 0:
                    raise CapExceeded(f"U_{2 * n + 1} over the enumeration cap")
                aux = cx.build_aux_complex(R, n, r)
            except CapExceeded as exc:
                out.append({"suite": "aux", "r": r, "skipped": str(exc), "pass": True})
                continue
            dd = all(aux.dd_is_zero(p) for p in aux.degrees)
            chain = cx.check_chain_map(aux, full, cx.phi_chain_map(aux, full))
            out.append({"suite": "aux", "r": r, "ranks": {str(p): aux.rank(p) for p in aux.degrees},
                        "dd_zero": dd, "chain_map": chain, "pass": dd and chain})
    return out


# ---------------------------------------------------------- group homology

def run_group_homology(R: Ring, n: int, p_max: int, m: int, trials: int, seed: int,
                       suites) -> list[dict]:
    out = []
    if "shapiro" in suites:
        G = sp_group(2, R)
        H = gh.stabilizer(G, (1, 0))
        res = gh.shapiro_check(G, H, p_max)
        out.append({"suite": "shapiro", "p_max": p_max, **res})
    if "d1" in suites:
        res = gh.d1_shapiro_square(R, p_max)
        out.append({"suite": "d1", "p_max": p_max, **res})
    if "vindep" in suites:
        res = gh.vindep_check(R, 1, 1, min(p_max, 1))
        out.append({"suite": "vindep", **res})
    dec = None
    if suites & {"relative", "quasilinear", "stable"}:
        dec = gh.relative_decomposition(R, n, min(p_max, 1))
    if "relative" in suites:
        degs = [{"p": d["p"], "H_odd": d["H_odd"].to_json(), "H_even": d["H_even"].to_json(),
                 "H_tilde": d["H_tilde_group"].to_json(), "idempotent": d["idempotent"]}
                for d in dec["degrees"]]
        out.append({"suite": "relative", "n": n, "degrees": degs,
                    "pass": all(d["idempotent"] for d in degs) and degs[0]["H_tilde"]["free_rank"] == 0
                    and not degs[0]["H_tilde"]["torsion"]})
    if "quasilinear" in suites:
        p = min(p_max, 1)
        res = gh.relative_quasilinearity_check(R, n, p, [0, 1], m, trials, seed, dec)
        out.append({"suite": "quasilinear", "p": p, "poly": [0, 1], "m": m,
                    "trials": trials, "passes": res["passes"], "bound_holds": res["bound_holds"],
                    "asserted": res["asserted"], "pass": res["ok"]})
    if "stable" in suites and n == 1:
        res = gh.stable_surjection_check(R, min(p_max, 1), decomposition=dec)
        out.append({"suite": "stable", **res})
    return out


# ------------------------------------------------------------------ limits

def run_limits(R: Ring, trials: int, seed: int, suites) -> list[dict]:
    out = []
    units = R.units()
    if "endgame" in suites:
        fails = []
        for i in range(trials):
            rng = _rng(seed, i)
            a, b, c = (int(x) for x in rng.choice(units, size=3))
            got = cx.endgame_limit_check(a, b, c, R)
            inv = unit_inverse(R, a * c % R.modulus)
            want = Z0RElem.basis(inv * inv % R.modulus, R)
            if got != want:
                fails.append({"trial": i, "abc": [a, b, c], "got": got.to_json()})
        out.append({"suite": "endgame", "trials": trials, "failures": fails, "pass": not fails})
    if "admissible" in suites:
        from .monoidring import AdmissibleFn, eval_admissible, limit_admissible
        fails = []
        for i in range(trials):
            rng = _rng(seed, i)
            d = int(rng.integers(0, 3))
            P = _random_poly(rng, d, R)
            Q = _random_poly(rng, d, R)
            f = AdmissibleFn({(1,): 1, (2,): -1}, [(P, Q)], R)
            for t in range(R.modulus):
                if f.defined_at(t) and limit_admissible(f, t, R) != eval_admissible(f, t, R):
                    fails.append({"trial": i, "t": t})
            # the limit at infinity is the value of the reversed presentation at 0
            lead = P.coeff(d) * unit_inverse(R, Q.lead()) % R.modulus
            want = Z0RElem.basis(lead, R) - Z0RElem.basis(lead * lead % R.modulus, R)
            if limit_admissible(f, None, R) != want:
                fails.append({"trial": i, "t": "inf"})
        out.append({"suite": "admissible", "trials": trials, "failures": fails, "pass": not fails})
    return out


# --------------------------------------------------------------------- mwk

def run_mwk(R: Ring, n_max: int, suites) -> list[dict]:
    out = []
    if "steinberg" in suites:
        out.append({"suite": "steinberg", "pairs": [list(p) for p in mwk.steinberg_pairs(R)],
                    "pass": True})
    if "milnor" in suites:
        groups = [mwk.milnor_k(R, k) for k in range(n_max + 1)]
        ok = groups[0] == FGAbelianGroup(1, ())
        if n_max >= 1:
            ok &= groups[1] == FGAbelianGroup(0, (R.p - 1,) if R.p > 2 else ())
        if n_max >= 2:
            ok &= groups[2].is_zero()  # finite residue field
        out.append({"suite": "milnor", "groups": _groups_json(groups), "pass": ok})
    if "milnor_witt" in suites:
        rec = {mode: [mwk.milnor_witt_k(R, k, mode).to_json() for k in range(1, n_max + 1)]
               for mode in mwk.MODES}
        out.append({"suite": "milnor_witt", "degrees": list(range(1, n_max + 1)), **rec,
                    "asserted": False, "pass": True})
    if "product" in suites:
        res = {mode: mwk.product_well_defined(R, 1, 1, mode) for mode in mwk.MODES}
        out.append({"suite": "product", **res, "pass": all(res.values())})
    if "surjection" in suites:
        res = {mode: mwk.mw_to_milnor_check(R, 2, mode) for mode in mwk.MODES}
        out.append({"suite": "surjection", **res, "pass": all(r["pass"] for r in res.values())})
    return out


# --------------------------------------------------------------- plumbing

def _env_default(name: str, cast, fallback):
    raw = os.environ.get("SPSTAB_" + name.upper().replace("-", "_"))
    if raw is None:
        return fallback
    try:
        return cast(raw)
    except ValueError:
        raise ConfigError(f"bad value for SPSTAB_{name.upper()}: {raw!r}") from None


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="spstab", description=__doc__.splitlines()[0])
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--ring", default=None, help="p^k, or a prime power such as 9")
    ap.add_argument("--n", type=int, default=None)
    ap.add_argument("--q", type=int, default=None)
    ap.add_argument("--r", type=int, default=None)
    ap.add_argument("--p-max", type=int, default=None)
    ap.add_argument("--m", type=int, default=None)
    ap.add_argument("--trials", type=int, default=None)
    ap.add_argument("--seed", type=int, default=None)
    ap.add_argument("--threads", type=int, default=None)
    ap.add_argument("--out", default=None, help="report directory")
    ap.add_argument("--suite", action="append", default=None, help="restrict to named suites")
    ap.add_argument("--csv", action="store_true", help="also write homology tables as CSV")
    ap.add_argument("--timings", action="store_true", help="record wall-clock timings")
    return ap


def resolve(args) -> dict:
    """Merge flags over environment over defaults and validate."""
    cfg = {
        "ring": args.ring if args.ring is not None else _env_default("ring", str, "3"),
        "n": args.n if args.n is not None else _env_default("n", int, 1),
        "q": args.q if args.q is not None else _env_default("q", int, None),
        "r": args.r if args.r is not None else _env_default("r", int, None),
        "p_max": args.p_max if args.p_max is not None else _env_default("p_max", int, 1),
        "m": args.m if args.m is not None else _env_default("m", int, 3),
        "trials": args.trials if args.trials is not None else _env_default("trials", int, 50),
        "seed": args.seed if args.seed is not None else _env_default("seed", int, None),
        "threads": args.threads if args.threads is not None else _env_default("threads", int, 1),
        "out": args.out if args.out is not None else _env_default("out", str, "."),
    }
    try:
        R = parse_ring(cfg["ring"])
    except NotPrime as exc:
        raise ConfigError(str(exc)) from None
    for key in ("n", "p_max", "m", "trials", "threads"):
        if cfg[key] < (1 if key in ("m", "threads") else 0):
            raise ConfigError(f"--{key.replace('_', '-')} out of range: {cfg[key]}")
    if cfg["q"] is not None and cfg["q"] < 0:
        raise ConfigError("--q must be non-negative")
    randomized = args.command in ("verify", "limits", "group-homology")
    if randomized and cfg["seed"] is None:
        if args.command != "group-homology" or not args.suite or "quasilinear" in args.suite:
            raise ConfigError("--seed is required for randomized suites")
    known = SUITES[args.command]
    if args.suite:
        bad = [s for s in args.suite if s not in known]
        if bad:
            raise ConfigError(f"unknown suite(s) {bad} for {args.command}; known: {list(known)}")
        suites = set(args.suite)
    else:
        suites = set(known) - OPT_IN
    cfg["suites"] = sorted(suites)
    cfg["ring_obj"] = R
    return cfg


def run(command: str, cfg: dict) -> list[dict]:
    R = cfg["ring_obj"]
    suites = set(cfg["suites"])
    seed = cfg["seed"]
    if command == "verify":
        jobs = {
            "multlin": lambda: suite_multlin(R, cfg["trials"], seed),
            "ffitpa": lambda: suite_ffitpa(R, cfg["trials"], seed),
            "pfaffian": lambda: suite_pfaffian(R, cfg["trials"], seed),
            "snf": lambda: suite_snf(cfg["trials"], seed),
        }
        return [jobs[s]() for s in SUITES["verify"] if s in suites]
    if command == "orbits":
        q = cfg["q"] if cfg["q"] is not None else 2 * cfg["n"] + 1
        return run_orbits(R, cfg["n"], q)
    if command == "complexes":
        return run_complexes(R, cfg["n"], cfg["q"], suites, cfg["threads"])
    if command == "group-homology":
        return run_group_homology(R, cfg["n"], cfg["p_max"], cfg["m"], cfg["trials"],
                                  seed or 0, suites)
    if command == "limits":
        return run_limits(R, cfg["trials"], seed, suites)
    if command == "mwk":
        return run_mwk(R, max(cfg["n"], 2), suites)
    raise ConfigError(f"unknown command {command}")


def _jsonable(x):
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    if isinstance(x, np.ndarray):
        return x.tolist()
    if isinstance(x, (FGAbelianGroup, Z0RElem)):
        return x.to_json()
    if isinstance(x, (set, frozenset)):
        return sorted(x)
    raise TypeError(f"cannot serialize {type(x).__name__}")


def _write_csv(path: Path, results: list[dict]):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["suite", "degree", "free_rank", "torsion"])
        for res in results:
            for p, g in enumerate(res.get("homology") or []):
                w.writerow([res["suite"], p, g["free_rank"], " ".join(map(str, g["torsion"]))])


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        cfg = resolve(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    t0 = time.perf_counter()
    try:
        results = run(args.command, cfg)
    except CapExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except SpstabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    elapsed = time.perf_counter() - t0
    ok = all(r.get("pass", True) for r in results)
    params = {k: v for k, v in cfg.items() if k not in ("ring_obj", "out", "threads")}
    report = {
        "schema": SCHEMA,
        "command": args.command,
        "params": params,
        "results": results,
        "pass": ok,
        "timings": {"total_s": round(elapsed, 3)} if args.timings else None,
    }
    out = Path(cfg["out"])
    out.mkdir(parents=True, exist_ok=True)
    path = out / f"{args.command}.json"
    path.write_text(json.dumps(report, indent=1, sort_keys=True, default=_jsonable) + "\n")
    if args.csv:
        _write_csv(out / f"{args.command}_homology.csv", results)
    for r in results:
        tag = "PASS" if r.get("pass", True) else "FAIL"
        print(f"{tag} {args.command}:{r.get('suite')}")
    print(f"report: {path}")
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
