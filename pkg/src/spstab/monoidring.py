"""The reduced monoid ring Z0[R] = Z[R, *] / Z<0> and its limit calculus."""

from __future__ import annotations

import itertools
import math
from typing import Iterable, Sequence

import numpy as np

from .errors import DegreeBound, LimitUndefined, NotBasisUnit, NotDefinedAt, SpstabError
from .ringkernel import Ring, matmul, smith_decomposition, unit_inverse

INF = math.inf


class Z0RElem:
    """Finite Z-combination of basis elements <a>, a a nonzero residue."""

    __slots__ = ("R", "_items")

    def __init__(self, coeffs=(), R: Ring | None = None):
        if R is None:
            raise TypeError("Z0RElem needs a ring")
        self.R = R
        m = R.modulus
        acc: dict = {}
        items = coeffs.items() if isinstance(coeffs, dict) else coeffs
        for a, n in items:
            a = int(a) % m
            if a:
                acc[a] = acc.get(a, 0) + int(n)
        self._items = tuple(sorted((a, n) for a, n in acc.items() if n))

    @classmethod
    def basis(cls, a: int, R: Ring) -> "Z0RElem":
        return cls({a: 1}, R)

    @classmethod
    def one(cls, R: Ring) -> "Z0RElem":
        return cls({1: 1}, R)

    @classmethod
    def zero(cls, R: Ring) -> "Z0RElem":
        return cls({}, R)

    @property
    def coeffs(self) -> dict:
        return dict(self._items)

    def items(self):
        return self._items

    def is_zero(self) -> bool:
        return not self._items

    def _coerce(self, other):
        if isinstance(other, Z0RElem):
            if other.R != self.R:
                raise SpstabError("elements over different rings")
            return other
        if isinstance(other, int):
            return Z0RElem({1: other}, self.R)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return Z0RElem(list(self._items) + list(other._items), self.R)

    __radd__ = __add__

    def __neg__(self):
        return Z0RElem([(a, -n) for a, n in self._items], self.R)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return z0_mul(self, other, self.R)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        out = Z0RElem.one(self.R)
        for _ in range(e):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, int):
            other = Z0RElem({1: other}, self.R)
        if not isinstance(other, Z0RElem):
            return NotImplemented
        return self.R == other.R and self._items == other._items

    def __hash__(self):
        return hash((self.R, self._items))

    def __repr__(self):
        if not self._items:
            return "0"
        parts = []
        for a, n in self._items:
            if n == 1:
                parts.append(f"<{a}>")
            elif n == -1:
                parts.append(f"-<{a}>")
            else:
                parts.append(f"{n}<{a}>")
        return " + ".join(parts).replace("+ -", "- ")

    def to_json(self) -> dict:
        return {"coeffs": {str(a): n for a, n in self._items}}

    @classmethod
    def from_json(cls, obj: dict, R: Ring) -> "Z0RElem":
        return cls({int(a): n for a, n in obj["coeffs"].items()}, R)


def z0_mul(x: Z0RElem, y: Z0RElem, R: Ring) -> Z0RElem:
    m = R.modulus
    acc: dict = {}
    for a, n in x.items():
        for b, k in y.items():
            c = a * b % m
            if c:
                acc[c] = acc.get(c, 0) + n * k
    return Z0RElem(acc, R)


def basis_unit_inverse(x: Z0RElem, R: Ring) -> Z0RElem:
    items = x.items()
    if len(items) != 1 or items[0][1] != 1 or not R.is_unit(items[0][0]):
        raise NotBasisUnit(f"{x!r} is not <u> with u a unit")
    return Z0RElem.basis(unit_inverse(R, items[0][0]), R)


# --------------------------------------------------------------- polynomials

class PolyR:
    """Polynomial over R, coefficients lowest degree first."""

    __slots__ = ("R", "coeffs")

    def __init__(self, coeffs: Iterable[int], R: Ring):
        m = R.modulus
        c = [int(a) % m for a in coeffs]
        while c and c[-1] == 0:
            c.pop()
        self.R = R
        self.coeffs = tuple(c)

    @classmethod
    def X(cls, R: Ring) -> "PolyR":
        return cls([0, 1], R)

    @classmethod
    def const(cls, a: int, R: Ring) -> "PolyR":
        return cls([a], R)

    @property
    def degree(self) -> int:
        return max(len(self.coeffs) - 1, 0)

    def is_zero(self) -> bool:
        return not self.coeffs

    def lead(self) -> int:
        return self.coeffs[-1] if self.coeffs else 0

    def coeff(self, i: int) -> int:
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else 0

    def __call__(self, t: int) -> int:
        m = self.R.modulus
        v = 0
        for a in reversed(self.coeffs):
            v = (v * t + a) % m
        return v

    def __add__(self, other: "PolyR") -> "PolyR":
        n = max(len(self.coeffs), len(other.coeffs))
        return PolyR([self.coeff(i) + other.coeff(i) for i in range(n)], self.R)

    def __neg__(self):
        return PolyR([-a for a in self.coeffs], self.R)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, int):
            return PolyR([a * other for a in self.coeffs], self.R)
        out = [0] * (len(self.coeffs) + len(other.coeffs))
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return PolyR(out, self.R)

    __rmul__ = __mul__

    def reversed(self, d: int) -> "PolyR":
        """X^d * self(1/X); requires degree <= d."""
        if self.degree > d:
            raise ValueError("degree exceeds reversal length")
        return PolyR([self.coeff(d - j) for j in range(d + 1)], self.R)

    def __eq__(self, other):
        return isinstance(other, PolyR) and self.R == other.R and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.R, self.coeffs))

    def __repr__(self):
        return f"PolyR({list(self.coeffs)})"


def _as_poly(p, R: Ring) -> PolyR:
    if isinstance(p, PolyR):
        return p
    if isinstance(p, int):
        return PolyR([p], R)
    return PolyR(p, R)


def subset_sums(a: Sequence[int], R: Ring):
    """Yield (|J|, a_J) over nonempty J, in a fixed order."""
    m = R.modulus
    n = len(a)
    for size in range(1, n + 1):
        for J in itertools.combinations(range(n), size):
            yield size, sum(a[j] for j in J) % m


def s_poly(a: Sequence[int], p, R: Ring) -> Z0RElem:
    """s_p(a) = -sum over nonempty J of (-1)^|J| <p(a_J)>."""
    if len(a) < 1:
        raise ValueError("need at least one element")
    p = _as_poly(p, R)
    acc: dict = {}
    for size, s in subset_sums(a, R):
        v = p(s)
        acc[v] = acc.get(v, 0) + (1 if size % 2 else -1)
    return Z0RElem(acc, R)


def phi_t(x, t: int, R: Ring) -> int:
    """The ring map <a> -> a^t into Z/modulus (the cyclic R^{(x)t})."""
    if t < 1:
        raise ValueError("t must be at least 1")
    m = R.modulus
    items = x.items() if isinstance(x, Z0RElem) else dict(x).items()
    return sum(n * pow(int(a) % m, t, m) for a, n in items) % m


def multlin_verify(x: Sequence[int], polys: Sequence, R: Ring) -> bool:
    polys = [_as_poly(p, R) for p in polys]
    m = len(x)
    if sum(p.degree for p in polys) >= m:
        raise DegreeBound("sum of degrees must be below the sequence length")
    mod = R.modulus
    lhs = 0
    for size, s in subset_sums(x, R):
        prod = 1
        for p in polys:
            prod = prod * p(s) % mod
        lhs += prod if size % 2 else -prod
    rhs = 1
    for p in polys:
        rhs = rhs * p(0) % mod
    return lhs % mod == rhs


# ------------------------------------------------------- admissible functions

class AdmissibleFn:
    """f(t) = P(<P_1(t)/Q_1(t)>, ..., <P_n(t)/Q_n(t)>).

    ``P`` maps exponent tuples to integer coefficients.  The presentation is
    part of the value: limits are always taken relative to it.
    """

    def __init__(self, P: dict, pairs: Sequence, R: Ring):
        self.R = R
        self.pairs = [(_as_poly(a, R), _as_poly(b, R)) for a, b in pairs]
        n = len(self.pairs)
        self.P = {}
        for exps, c in P.items():
            exps = tuple(exps)
            if len(exps) != n:
                raise ValueError("monomial arity does not match the number of pairs")
            if c:
                self.P[exps] = self.P.get(exps, 0) + c

    @property
    def domain_excluded(self) -> frozenset:
        p = self.R.p
        bad = set()
        for _, Q in self.pairs:
            for t in range(p):
                if Q(t) % p == 0:
                    bad.add(t)
        return frozenset(bad)

    def defined_at(self, t: int) -> bool:
        return all(self.R.is_unit(Q(t)) for _, Q in self.pairs)


def _eval_P(P: dict, values: Sequence[int], R: Ring) -> Z0RElem:
    m = R.modulus
    acc: dict = {}
    for exps, c in P.items():
        v = 1
        for x, e in zip(values, exps):
            if e:
                v = v * pow(x, e, m) % m
        acc[v] = acc.get(v, 0) + c
    return Z0RElem(acc, R)


def eval_admissible(f: AdmissibleFn, t: int, R: Ring) -> Z0RElem:
    m = R.modulus
    vals = []
    for i, (P, Q) in enumerate(f.pairs, start=1):
        q = Q(t)
        if not R.is_unit(q):
            raise NotDefinedAt(i, t)
        vals.append(P(t) * unit_inverse(R, q) % m)
    return _eval_P(f.P, vals, R)


def reversed_presentation(f: AdmissibleFn) -> AdmissibleFn:
    pairs = []
    for i, (P, Q) in enumerate(f.pairs, start=1):
        d = Q.degree
        if Q.is_zero() or not f.R.is_unit(Q.lead()):
            raise LimitUndefined(f"leading coefficient of Q_{i} is not a unit")
        if P.degree > d and not P.is_zero():
            raise LimitUndefined(f"deg P_{i} > deg Q_{i}")
        pairs.append((P.reversed(d), Q.reversed(d)))
    return AdmissibleFn(f.P, pairs, f.R)


def limit_admissible(f: AdmissibleFn, a, R: Ring) -> Z0RElem:
    if a is None or a == INF or a == "inf":
        return eval_admissible(reversed_presentation(f), 0, R)
    try:
        return eval_admissible(f, a, R)
    except NotDefinedAt as exc:
        raise LimitUndefined(f"Q_{exc.index}({a}) is not a unit") from None


def compare_limits(f: AdmissibleFn, g: AdmissibleFn, a, R: Ring) -> dict:
    """Limits of two presentations at the same point, side by side.

    Whether the limit depends on the presentation is open; nothing is
    asserted here.
    """
    out = {}
    for name, h in (("f", f), ("g", g)):
        try:
            out[name] = limit_admissible(h, a, R)
        except LimitUndefined as exc:
            out[name] = str(exc)
    out["agree"] = isinstance(out["f"], Z0RElem) and out["f"] == out["g"]
    return out


# ---------------------------------------------------------- finite modules

class FinZ0RModule:
    """Finite Z0[R]-module in invariant-factor coordinates.

    Elements are tuples ``y`` with ``0 <= y[i] < d[i]``; ``action[a]`` is
    the integer matrix of <a> acting on such coordinate vectors.
    """

    def __init__(self, invariants: Sequence[int], action: dict, R: Ring, check=True,
                 zero_check=True):
        self.R = R
        self.d = [int(x) for x in invariants]
        if any(x <= 1 for x in self.d):
            raise SpstabError("invariants must exceed 1")
        k = len(self.d)
        self.action = {}
        for a in range(R.modulus):
            A = action.get(a)
            if a == 0 and zero_check and A is not None and any(x % di for row, di in zip(A, self.d) for x in row):
                raise SpstabError("<0> must act as zero")
            if A is None or (a == 0 and zero_check):
                A = [[0] * k for _ in range(k)]
            self.action[a] = [[A[i][j] % self.d[i] for j in range(k)] for i in range(k)]
        if check:
            self._check_well_defined()

    @classmethod
    def from_presentation(cls, n_gens: int, relations, action: dict, R: Ring):
        """Z^n_gens modulo the columns of ``relations``, with <a> given on generators.

        Rejects infinite modules.  Returns the module together with the
        matrix taking generator coordinates to invariant coordinates.
        """
        rel = [list(r) for r in relations] if relations else [[] for _ in range(n_gens)]
        if not rel or not rel[0]:
            if n_gens:
                raise SpstabError("only finite modules are supported")
            return cls([], {}, R), []
        D, U, _, Ui, _ = smith_decomposition(rel, want_inverses=True, right=False)
        diag = [D[i][i] if i < len(D[0]) else 0 for i in range(n_gens)]
        if any(x == 0 for x in diag):
            raise SpstabError("only finite modules are supported")
        keep = [i for i in range(n_gens) if abs(diag[i]) != 1]
        inv = [abs(diag[i]) for i in keep]
        act = {}
        for a, A in action.items():
            T = matmul(matmul(U, A), Ui)
            act[a % R.modulus] = [[T[i][j] for j in keep] for i in keep]
        to_coords = [U[i] for i in keep]
        return cls(inv, act, R), to_coords

    @classmethod
    def natural(cls, R: Ring, q: int = 1) -> "FinZ0RModule":
        """M(q): the additive group of R with <a> acting by a^q."""
        m = R.modulus
        return cls([m], {a: [[pow(a, q, m)]] for a in range(m)}, R)

    @classmethod
    def trivial_units(cls, R: Ring, order: int) -> "FinZ0RModule":
        """Z/order with units acting trivially and non-units by zero."""
        return cls([order], {a: [[1 if R.is_unit(a) else 0]] for a in range(R.modulus)}, R)

    @property
    def rank(self) -> int:
        return len(self.d)

    @property
    def order(self) -> int:
        return math.prod(self.d)

    def zero(self) -> tuple:
        return (0,) * len(self.d)

    def canon(self, y) -> tuple:
        return tuple(int(v) % d for v, d in zip(y, self.d))

    def apply(self, A, y) -> tuple:
        return self.canon([sum(r[j] * y[j] for j in range(len(y))) for r in A])

    def act(self, a: int, y) -> tuple:
        return self.apply(self.action[a % self.R.modulus], y)

    def elements(self):
        return itertools.product(*[range(d) for d in self.d])

    def sigma_matrix(self, sigma: Z0RElem):
        k = len(self.d)
        S = [[0] * k for _ in range(k)]
        for a, n in sigma.items():
            A = self.action[a]
            for i in range(k):
                for j in range(k):
                    S[i][j] += n * A[i][j]
        return [[S[i][j] % self.d[i] for j in range(k)] for i in range(k)]

    def subgroup_order(self, gens) -> int:
        """Order of the subgroup generated by the columns of ``gens``."""
        k = len(self.d)
        if k == 0:
            return 1
        cols = [list(c) for c in gens]
        rel = [[self.d[i] if i == j else 0 for j in range(k)] + [c[i] for c in cols]
               for i in range(k)]
        D = smith_decomposition(rel, left=False, right=False)[0]
        quot = math.prod(D[i][i] for i in range(k))
        return self.order // abs(quot)

    def _check_well_defined(self):
        k = len(self.d)
        for a, A in self.action.items():
            for j in range(k):
                for i in range(k):
                    if (A[i][j] * self.d[j]) % self.d[i]:
                        raise SpstabError(f"<{a}> is not well defined on the module")

    def check_action(self, samples: int = 50, seed: int = 0) -> bool:
        """Multiplicativity on sampled pairs, <1> = id and <0> = 0."""
        m = self.R.modulus
        k = len(self.d)
        ident = [[int(i == j) for j in range(k)] for i in range(k)]
        if self.action[1] != self.canon_matrix(ident):
            return False
        if any(x for row in self.action[0] for x in row):
            return False
        rng = np.random.default_rng(seed)
        for _ in range(samples):
            a, b = (int(v) for v in rng.integers(0, m, size=2))
            lhs = self.canon_matrix(matmul(self.action[a], self.action[b]))
            if lhs != self.action[a * b % m]:
                return False
        return True

    def canon_matrix(self, A):
        return [[A[i][j] % self.d[i] for j in range(len(A[0]))] for i in range(len(A))]

    def submodule(self, gens) -> "FinZ0RModule":
        """Submodule generated (as a group) by the columns of ``gens``.

        ``gens`` must already span a submodule; the action is transported
        by solving in the ambient lattice.
        """
        k = len(self.d)
        cols = [list(c) for c in gens]
        w = len(cols)
        if w == 0 or k == 0:
            return FinZ0RModule([], {}, self.R)
        # lattice of relations: c with sum c_j g_j in diag(d) Z^k
        big = [[cols[j][i] for j in range(w)] + [self.d[i] if i == t else 0 for t in range(k)]
               for i in range(k)]
        Dd, _, V, _, _ = smith_decomposition(big, left=False)
        r = sum(1 for i in range(min(k, w + k)) if Dd[i][i])
        kernel = [[V[row][c] for c in range(r, w + k)] for row in range(w)]
        act = {}
        for a, A in self.action.items():
            img = [self.apply(A, c) for c in cols]
            act[a] = [self._solve(cols, v) for v in img]
            act[a] = [[act[a][j][i] for j in range(w)] for i in range(w)]
        mod, _ = FinZ0RModule.from_presentation(w, kernel, act, self.R)
        return mod

    def _solve(self, cols, target):
        # integer c with sum c_j cols_j == target modulo diag(d)
        k = len(self.d)
        w = len(cols)
        big = [[cols[j][i] for j in range(w)] + [self.d[i] if i == t else 0 for t in range(k)]
               for i in range(k)]
        D, U, V, _, _ = smith_decomposition(big)
        y = [sum(U[i][t] * target[t] for t in range(k)) for i in range(k)]
        z = [0] * (w + k)
        for i in range(k):
            di = D[i][i] if i < w + k else 0
            if di == 0:
                if y[i]:
                    raise SpstabError("target not in the span")
                continue
            if y[i] % di:
                raise SpstabError("target not in the span")
            z[i] = y[i] // di
        c = [sum(V[j][t] * z[t] for t in range(w + k)) for j in range(w)]
        return c

    def quotient(self, gens) -> "FinZ0RModule":
        """Quotient by the submodule generated by the columns of ``gens``."""
        k = len(self.d)
        rel = [[self.d[i] if i == j else 0 for j in range(k)] + [list(c)[i] for c in gens]
               for i in range(k)]
        ident = {a: A for a, A in self.action.items()}
        mod, _ = FinZ0RModule.from_presentation(k, rel, ident, self.R)
        return mod


def localization_vanishes(M: FinZ0RModule, sigma: Z0RElem) -> bool:
    """Decide sigma^{-1} M = 0 via the image chain M, sM, s^2 M, ..."""
    if M.rank == 0:
        return True
    S = M.sigma_matrix(sigma)
    k = M.rank
    W = [[int(i == j) for i in range(k)] for j in range(k)]  # columns
    prev = M.order
    while True:
        W = [M.apply(S, c) for c in W]
        cur = M.subgroup_order(W)
        if cur == 1:
            return True
        if cur == prev:
            return False
        prev = cur


def radical_annihilator_member(M: FinZ0RModule, x, sigma: Z0RElem) -> bool:
    """True iff sigma^k x = 0 for some k >= 0."""
    S = M.sigma_matrix(sigma)
    y = M.canon(x)
    seen = set()
    zero = M.zero()
    while True:
        if y == zero:
            return True
        if y in seen:
            return False
        seen.add(y)
        y = M.apply(S, y)


def quasilinear_probe(M: FinZ0RModule, p, m: int, trials: int, R: Ring, seed: int,
                      region=None) -> dict:
    """Test sigma^{-1} M = 0 for sigma = s_p(a) - <p(0)> on random a of length m.

    ``region`` optionally restricts the partial sums a_J; sequences leaving
    it are redrawn up to 1000 times.
    """
    p = _as_poly(p, R)
    results = []
    for i in range(trials):
        rng = np.random.default_rng([seed, i])
        a = None
        for _ in range(1000):
            cand = [int(v) for v in rng.integers(0, R.modulus, size=m)]
            if region is None or all(region(s) for _, s in subset_sums(cand, R)):
                a = cand
                break
        if a is None:
            results.append({"a": None, "pass": False, "reason": "no sequence in region"})
            continue
        sigma = s_poly(a, p, R) - Z0RElem.basis(p(0), R)
        ok = localization_vanishes(M, sigma)
        results.append({"a": a, "sigma": sigma.to_json(), "pass": ok})
    passes = sum(1 for r in results if r["pass"])
    return {"trials": trials, "passes": passes, "pass": passes == trials, "results": results}
