"""Milnor and Milnor-Witt K-groups of small local rings from presentations.

Everything is a lattice quotient: a free abelian group on symbol tuples
modulo a list of relation columns, reduced by Smith normal form.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .errors import CapExceeded
from .ringkernel import FGAbelianGroup, Lattice, Ring

GEN_CAP = 5000
MODES = ("group_ring", "integer")


def steinberg_pairs(R: Ring) -> list[tuple[int, int]]:
    m = R.modulus
    return [(a, (1 - a) % m) for a in R.units() if R.is_unit((1 - a) % m)]


def _residue_units(R: Ring) -> tuple[list[int], int]:
    return list(range(1, R.p)), R.p


@dataclass
class GradedPresentation:
    """Degree-n part as Z^generators / span(relations).

    ``relations`` holds sparse columns (dict generator index -> coefficient).
    """

    degree: int
    generators: list
    relations: list = field(default_factory=list)
    mode: str = ""

    def __post_init__(self):
        self.index = {g: i for i, g in enumerate(self.generators)}

    def vector(self, col: dict) -> list[int]:
        v = [0] * len(self.generators)
        for i, c in col.items():
            v[i] += c
        return v

    def group(self) -> FGAbelianGroup:
        n = len(self.generators)
        rels = [c for c in self.relations if c]
        if not rels:
            return FGAbelianGroup(n, ())
        return FGAbelianGroup.from_relations(self.relation_matrix(rels), n)

    def relation_matrix(self, rels) -> list[list[int]]:
        rows = [[0] * len(rels) for _ in range(len(self.generators))]
        for j, col in enumerate(rels):
            for i, c in col.items():
                rows[i][j] += c
        return rows

    def lattice(self) -> Lattice:
        return Lattice([self.vector(c) for c in self.relations if c], len(self.generators))


def _add(col: dict, key: int, c: int):
    v = col.get(key, 0) + c
    if v:
        col[key] = v
    else:
        col.pop(key, None)


# ------------------------------------------------------------------ Milnor

def milnor_presentation(R: Ring, n: int, over: str = "residue") -> GradedPresentation:
    """Symbols {a_1,...,a_n} over F* (``over="residue"``) or R* (``"units"``)."""
    if over == "residue":
        units, mod = _residue_units(R)
    elif over == "units":
        units, mod = R.units(), R.modulus
    else:
        raise ValueError(f"unknown unit group {over!r}")
    if len(units) ** n > GEN_CAP:
        raise CapExceeded(f"{len(units) ** n} Milnor generators")
    gens = list(itertools.product(units, repeat=n))
    P = GradedPresentation(n, gens, mode=over)
    idx = P.index
    rels = []
    for i in range(n):
        for rest in itertools.product(units, repeat=n - 1):
            for a, b in itertools.combinations_with_replacement(units, 2):
                col: dict = {}
                _add(col, idx[rest[:i] + (a * b % mod,) + rest[i:]], 1)
                _add(col, idx[rest[:i] + (a,) + rest[i:]], -1)
                _add(col, idx[rest[:i] + (b,) + rest[i:]], -1)
                rels.append(col)
    pairs = [(a, (1 - a) % mod) for a in units if (1 - a) % mod in units]
    for i in range(n - 1):
        for rest in itertools.product(units, repeat=n - 2):
            for a, b in pairs:
                rels.append({idx[rest[:i] + (a, b) + rest[i:]]: 1})
    P.relations = rels
    return P


def milnor_k(R: Ring, n: int, over: str = "residue") -> FGAbelianGroup:
    """K_n^M by multilinearity and adjacent Steinberg relations."""
    if n == 0:
        return FGAbelianGroup(1, ())
    return milnor_presentation(R, n, over).group()


# ------------------------------------------------------------ Milnor-Witt

class _Aug:
    """Augmentation ideal I[R*] with basis [a] = <a> - <1>, a != 1."""

    def __init__(self, R: Ring):
        self.R = R
        self.units = R.units()
        self.basis = [a for a in self.units if a != 1]

    def times(self, u: int, a: int) -> dict:
        """<u>[a] = [ua] - [u] as a dict over basis labels."""
        m = self.R.modulus
        out: dict = {}
        ua = u * a % m
        if ua != 1:
            out[ua] = out.get(ua, 0) + 1
        if u != 1:
            out[u] = out.get(u, 0) - 1
        return {k: v for k, v in out.items() if v}


def _expand(slots: list[dict]) -> dict:
    """Tensor product of degree-1 elements, as tuple -> coefficient."""
    out = {(): 1}
    for s in slots:
        nxt: dict = {}
        for t, c in out.items():
            for a, d in s.items():
                key = t + (a,)
                nxt[key] = nxt.get(key, 0) + c * d
        out = {k: v for k, v in nxt.items() if v}
    return out


def mw_presentation(R: Ring, n: int, mode: str = "group_ring") -> GradedPresentation:
    """Degree n of T(I[R*]) modulo the ideal generated by [a](x)[1-a].

    ``mode="group_ring"`` tensors over Z[R*], so <u> may move between
    adjacent slots; ``mode="integer"`` tensors over Z.
    """
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    if n < 1:
        raise ValueError("degree must be at least 1")
    aug = _Aug(R)
    B = aug.basis
    if len(B) ** n > GEN_CAP:
        raise CapExceeded(f"{len(B) ** n} Milnor-Witt generators")
    gens = list(itertools.product(B, repeat=n))
    P = GradedPresentation(n, gens, mode=mode)
    idx = P.index

    def col_of(d: dict) -> dict:
        return {idx[t]: c for t, c in d.items() if c}

    st = [(a, b) for a, b in steinberg_pairs(R)]
    base_st = []
    for i in range(n - 1):
        for x in itertools.product(B, repeat=i):
            for y in itertools.product(B, repeat=n - 2 - i):
                for a, b in st:
                    base_st.append(x + (a, b) + y)
    rels = [{idx[t]: 1} for t in base_st]
    if mode == "group_ring":
        for t in base_st:
            for u in aug.units:
                if u != 1:
                    slots = [aug.times(u, t[0])] + [{a: 1} for a in t[1:]]
                    rels.append(col_of(_expand(slots)))
        for i in range(n - 1):
            for t in gens:
                for u in aug.units:
                    if u == 1:
                        continue
                    left = [{a: 1} for a in t]
                    right = [{a: 1} for a in t]
                    left[i] = aug.times(u, t[i])
                    right[i + 1] = aug.times(u, t[i + 1])
                    d = _expand(left)
                    for k, v in _expand(right).items():
                        d[k] = d.get(k, 0) - v
                    rels.append(col_of(d))
    P.relations = [r for r in rels if r]
    return P


def milnor_witt_k(R: Ring, n: int, mode: str = "group_ring") -> FGAbelianGroup:
    return mw_presentation(R, n, mode).group()


# ------------------------------------------------------------------ checks

def product_well_defined(R: Ring, m: int, n: int, mode: str = "group_ring") -> bool:
    """Concatenation sends relations of degree m or n into relations of degree m+n."""
    Pm, Pn, Pmn = mw_presentation(R, m, mode), mw_presentation(R, n, mode), mw_presentation(R, m + n, mode)
    L = Pmn.lattice()

    def cat(left: dict, lp, right: dict, rp) -> list[int]:
        col: dict = {}
        for i, c in left.items():
            for j, d in right.items():
                _add(col, Pmn.index[lp.generators[i] + rp.generators[j]], c * d)
        return Pmn.vector(col)

    for r in Pm.relations:
        for j in range(len(Pn.generators)):
            if not L.contains(cat(r, Pm, {j: 1}, Pn)):
                return False
    for r in Pn.relations:
        for i in range(len(Pm.generators)):
            if not L.contains(cat({i: 1}, Pm, r, Pn)):
                return False
    return True


def mw_to_milnor_check(R: Ring, n: int, mode: str = "group_ring", over: str = "units") -> dict:
    """[a_1]...[a_n] -> {a_1,...,a_n}: relations map into relations, and onto."""
    P = mw_presentation(R, n, mode)
    Q = milnor_presentation(R, n, over)
    red = (lambda a: a % R.p) if over == "residue" else (lambda a: a)
    img = [Q.index[tuple(red(a) for a in g)] for g in P.generators]
    L = Q.lattice()
    well = True
    for col in P.relations:
        v = [0] * len(Q.generators)
        for i, c in col.items():
            v[img[i]] += c
        if not L.contains(v):
            well = False
            break
    span = [Q.vector(c) for c in Q.relations if c]
    for i in sorted(set(img)):
        e = [0] * len(Q.generators)
        e[i] = 1
        span.append(e)
    L2 = Lattice(span, len(Q.generators))
    onto = all(L2.contains([int(i == j) for j in range(len(Q.generators))])
               for i in range(len(Q.generators)))
    return {"well_defined": well, "surjective": onto, "pass": well and onto}


def mwk_report(R: Ring, n_max: int = 2) -> dict:
    out = {"ring": str(R), "steinberg_pairs": [list(p) for p in steinberg_pairs(R)],
           "milnor": {}, "milnor_witt": {}}
    for n in range(n_max + 1):
        out["milnor"][n] = milnor_k(R, n).to_json()
    for n in range(1, n_max + 1):
        out["milnor_witt"][n] = {mode: milnor_witt_k(R, n, mode).to_json() for mode in MODES}
    return out
