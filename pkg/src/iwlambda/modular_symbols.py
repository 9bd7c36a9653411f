"""Weight-two modular symbols for Gamma_0(N) and Mazur-Tate elements.

Manin symbols (c:d) run over P^1(Z/N); the symbol (c:d) stands for
g{0, oo} with g = [[a, b], [c, d]] in SL_2(Z), a path from b/d to a/c.
The relations are x + xS = 0 and x + x tau + x tau^2 = 0 with
S = [[0, -1], [1, 0]] and tau = [[0, -1], [1, -1]]; the sign quotients add
x = +-x eta with eta = [[-1, 0], [0, 1]].  Hecke operators come from
Merel's Heilbronn matrices.

An eigen-symbol is a Hecke-equivariant linear functional on the sign
quotient.  It is scaled so that its values on closed cycles (sums of
Manin symbols with zero boundary) form the lattice (1/2) Z; the value
[r] = phi({oo, r}) at r = 0 is then L(E, 1) divided by the real Neron
period when E is the Gamma_0(N)-optimal curve with Manin constant 1.
"""

from __future__ import annotations

import hashlib
import json
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Iterable, Sequence

import gmpy2
import numpy as np

from .characters import Cyclotomic, DirichletCharacter
from .elliptic import CurveQ, classify_reduction, count_points, is_ordinary, minimal_model, primes_up_to, trace
from .errors import BudgetError, HypothesisError, InputError, UncertifiedError
from .lambda_algebra import GroupRingElement, InvariantPair, IwasawaSeries
from .linalg import ONE, ZERO, Q, RelationSolver, kernel, rational_gcd
from .padic_core import PadicNumber, teichmuller, valuation
from .kubota_leopoldt import gamma_index_table

DEFAULT_LEVEL_BUDGET = 2000
CACHE_VERSION = 1


# ---------------------------------------------------------------------------
# P^1(Z/N)


class P1List:
    """Points of P^1(Z/N) with a dense lookup table from pairs (c, d) mod N."""

    def __init__(self, N: int) -> None:
        if N < 1:
            raise InputError("level must be positive")
        self.N = N
        C, D = np.meshgrid(np.arange(N), np.arange(N), indexing="ij")
        valid = np.gcd(np.gcd(C, D), N) == 1 if N > 1 else np.ones((1, 1), dtype=bool)
        units = np.array([u for u in range(1, N + 1) if gcd(u, N) == 1], dtype=np.int64) % N
        table = np.full((N, N), -1, dtype=np.int64)
        reps: list[tuple[int, int]] = []
        for c, d in zip(*np.nonzero(valid)):
            if table[c, d] >= 0:
                continue
            table[(units * c) % N, (units * d) % N] = len(reps)
            reps.append((int(c), int(d)))
        self.table = table
        self.reps = reps

    def __len__(self) -> int:
        return len(self.reps)

    def index(self, c: int, d: int) -> int:
        return int(self.table[c % self.N, d % self.N])


def heilbronn_merel(n: int) -> list[tuple[int, int, int, int]]:
    """Matrices [[a, b], [c, d]] with ad - bc = n, a > b >= 0, d > c >= 0."""
    out = []
    for a in range(1, n + 1):
        for d in range(1, n + 2 - a):
            m = a * d - n
            if m < 0:
                continue
            if m == 0:
                out.extend((a, 0, c, d) for c in range(d))
                out.extend((a, b, 0, d) for b in range(1, a))
                continue
            for b in range(1, a):
                if m % b == 0 and m // b < d:
                    out.append((a, b, m // b, d))
    return out


def _lift(c: int, d: int, N: int) -> tuple[int, int]:
    """Coprime integers congruent to (c, d) mod N."""
    if N == 1:
        return (0, 1)
    c %= N
    d %= N
    if c == 0:
        c = N
    for t in range(0, N * N + 1):
        dd = d + t * N
        if gcd(c, dd) == 1:
            return (c, dd)
    raise AssertionError("no coprime lift")


def _complete(c: int, d: int) -> tuple[int, int, int, int]:
    """[[a, b], [c, d]] in SL_2(Z)."""
    g, x, y = _egcd(c, d)
    # x c + y d = 1, so a = y, b = -x gives a d - b c = 1.
    return (y, -x, c, d)


def _egcd(a: int, b: int) -> tuple[int, int, int]:
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


# ---------------------------------------------------------------------------
# Cusps


class CuspTable:
    """Gamma_0(N)-classes of cusps, using s1 c2 = s2 c1 mod gcd(c1 c2, N) with a_j s_j = 1 mod c_j."""

    def __init__(self, N: int) -> None:
        self.N = N
        self.reps: list[tuple[int, int, int]] = []  # (a, c, s)
        self._cache: dict[tuple[int, int], int] = {}

    def classify(self, a: int, c: int) -> int:
        if c < 0 or (c == 0 and a < 0):
            a, c = -a, -c
        g = gcd(a, c)
        a, c = a // g, c // g
        key = (a % c if c else 1, c)
        if key in self._cache:
            return self._cache[key]
        s = pow(a, -1, c) if c > 1 else 1
        gc = gcd(c, self.N)
        for i, (a2, c2, s2) in enumerate(self.reps):
            if gcd(c2, self.N) != gc:
                continue
            if (s * c2 - s2 * c) % gcd(c * c2, self.N) == 0:
                self._cache[key] = i
                return i
        self.reps.append((a, c, s))
        self._cache[key] = len(self.reps) - 1
        return len(self.reps) - 1

    def __len__(self) -> int:
        return len(self.reps)


# ---------------------------------------------------------------------------
# Relation space


class SymbolSpace:
    """Sign quotient (sign = +1, -1, or 0 for none) of the Manin-symbol space of level N."""

    def __init__(self, N: int, sign: int = 1, budget: int = DEFAULT_LEVEL_BUDGET) -> None:
        if N > budget:
            raise BudgetError(f"level {N} exceeds the modular-symbol budget {budget}")
        if sign not in (-1, 0, 1):
            raise InputError("sign must be -1, 0 or 1")
        self.N = N
        self.sign = sign
        self.p1 = P1List(N)
        n = len(self.p1)
        idx = self.p1.index
        solver = RelationSolver(n)
        for i, (c, d) in enumerate(self.p1.reps):
            solver.add({i: 1} if idx(d, -c) == i else {i: 1, idx(d, -c): 1})
            if sign:
                j = idx(-c, d)
                rel = {i: 1 - sign} if j == i else {i: 1, j: -sign}
                if any(rel.values()):
                    solver.add(rel)
        seen = set()
        for i, (c, d) in enumerate(self.p1.reps):
            if i in seen:
                continue
            j, k = idx(d, -c - d), idx(-c - d, c)
            seen.update((i, j, k))
            rel: dict[int, int] = {}
            for t in (i, j, k):
                rel[t] = rel.get(t, 0) + 1
            solver.add(rel)
        self.free, self.coords = solver.solve()
        self.dim = len(self.free)
        self._heilbronn: dict[int, list] = {}
        self._cusps: CuspTable | None = None

    def heilbronn(self, n: int) -> list[tuple[int, int, int, int]]:
        if n not in self._heilbronn:
            self._heilbronn[n] = heilbronn_merel(n)
        return self._heilbronn[n]

    def hecke_images(self, i: int, n: int) -> list[int]:
        """Indices of (c:d) h over Heilbronn matrices h, omitting images outside P^1."""
        c, d = self.p1.reps[i]
        idx = self.p1.index
        out = []
        for a, b, cc, dd in self.heilbronn(n):
            j = idx(c * a + d * cc, c * b + d * dd)
            if j >= 0:
                out.append(j)
        return out

    def hecke_matrix(self, n: int) -> list[list]:
        """Row j holds the coordinates of T_n applied to the j-th basis symbol."""
        rows = []
        for g in self.free:
            row = [ZERO] * self.dim
            for j in self.hecke_images(g, n):
                for key, val in self.coords[j].items():
                    row[key] += val
            rows.append(row)
        return rows

    def values(self, functional: Sequence) -> list:
        """Extend a functional on the basis to all Manin symbols."""
        return [sum((val * functional[key] for key, val in co.items()), ZERO) for co in self.coords]

    def apply_hecke(self, all_values: Sequence, n: int) -> list:
        """(phi o T_n) on the basis, from the values of phi on every Manin symbol."""
        return [sum((all_values[j] for j in self.hecke_images(g, n)), ZERO) for g in self.free]

    @property
    def cusps(self) -> CuspTable:
        if self._cusps is None:
            self._cusps = CuspTable(self.N)
            for i in range(len(self.p1)):
                self.boundary(i)
        return self._cusps

    def boundary(self, i: int) -> tuple[int, int]:
        """(tail, head) cusp classes of the path b/d -> a/c for the i-th Manin symbol."""
        if self._cusps is None:
            self._cusps = CuspTable(self.N)
        c, d = _lift(*self.p1.reps[i], self.N)
        a, b, c, d = _complete(c, d)
        return self._cusps.classify(b, d), self._cusps.classify(a, c)


@lru_cache(maxsize=16)
def build_space(N: int, sign: int = 1, budget: int = DEFAULT_LEVEL_BUDGET) -> SymbolSpace:
    return SymbolSpace(N, sign, budget)


def cuspidal_dimension(N: int) -> int:
    """dim M^+ + dim M^- - (#cusps - 1), which equals 2 * genus(X_0(N))."""
    plus = build_space(N, 1)
    minus = build_space(N, -1)
    return plus.dim + minus.dim - (len(plus.cusps) - 1)


# ---------------------------------------------------------------------------
# Eigen-symbols


def _continued_fraction_convergents(a: int, b: int) -> list[tuple[int, int]]:
    """Convergents p_k/q_k of a/b (b > 0), starting from k = 0."""
    out = []
    p0, q0, p1, q1 = 0, 1, 1, 0  # p_{-2}/q_{-2}, p_{-1}/q_{-1}
    while True:
        t, r = divmod(a, b)
        p0, q0, p1, q1 = p1, q1, t * p1 + p0, t * q1 + q0
        out.append((p1, q1))
        if r == 0:
            return out
        a, b = b, r


@dataclass
class EigenSymbol:
    """A normalized Hecke eigen-functional on one sign quotient of level N."""

    N: int
    sign: int
    values: list  # value on every Manin symbol, indexed like P1List.reps
    eigenvalues: dict[int, int]
    scale: object = ONE
    p1: P1List | None = field(default=None, repr=False)
    _memo: dict = field(default_factory=dict, repr=False)

    def manin(self, c: int, d: int):
        return self.values[self.p1.index(c, d)]

    def __call__(self, r: Fraction | int | tuple[int, int]):
        """[r] = phi({oo, r})."""
        if isinstance(r, tuple):
            a, b = r
        else:
            r = Fraction(r)
            a, b = r.numerator, r.denominator
        g = gcd(a, b)
        a, b = a // g, b // g
        a %= b
        key = (a, b)
        if key in self._memo:
            return self._memo[key]
        total = ZERO
        prev_q = 0
        for k, (pk, qk) in enumerate(_continued_fraction_convergents(a, b)):
            sgn = -1 if k % 2 == 0 else 1  # (-1)^(k-1)
            total += self.manin(sgn * qk, prev_q)
            prev_q = qk
        self._memo[key] = total
        return total

    def to_text(self) -> str:
        lines = [f"# iwlambda modular symbol cache v{CACHE_VERSION}", f"N\t{self.N}", f"sign\t{self.sign}"]
        lines.append("eigenvalues\t" + ",".join(f"{k}:{v}" for k, v in sorted(self.eigenvalues.items())))
        for (c, d), v in zip(self.p1.reps, self.values):
            lines.append(f"{c}\t{d}\t{v}")
        body = "\n".join(lines) + "\n"
        return body + "checksum\t" + hashlib.sha256(body.encode()).hexdigest() + "\n"

    @classmethod
    def from_text(cls, text: str) -> "EigenSymbol":
        body, _, tail = text.rpartition("checksum\t")
        if not tail or hashlib.sha256(body.encode()).hexdigest() != tail.strip():
            raise InputError("modular symbol cache checksum mismatch")
        lines = body.splitlines()
        if lines[0] != f"# iwlambda modular symbol cache v{CACHE_VERSION}":
            raise InputError("modular symbol cache version mismatch")
        N = int(lines[1].split("\t")[1])
        sign = int(lines[2].split("\t")[1])
        eig = {}
        ev = lines[3].split("\t")[1]
        for item in filter(None, ev.split(",")):
            k, v = item.split(":")
            eig[int(k)] = int(v)
        p1 = P1List(N)
        values = [ZERO] * len(p1)
        for row in lines[4:]:
            c, d, v = row.split("\t")
            values[p1.index(int(c), int(d))] = Q(v)
        return cls(N, sign, values, eig, ONE, p1)


def target_eigenvalues(E: CurveQ, N: int, bound: int = 50) -> dict[int, int]:
    """a_ell for ell <= bound (T_ell for ell prime to N, U_q for q | N) from point counts."""
    Em = minimal_model(E)
    return {ell: trace(Em, ell) for ell in primes_up_to(bound)}


def hecke_eigensymbol(
    space: SymbolSpace, eigenvalues: dict[int, int], verify_bound: int = 50
) -> EigenSymbol:
    """The unique (up to scalar) functional with phi o T_ell = a_ell phi for the supplied ell."""
    N = space.N
    ells = sorted(eigenvalues)
    good = [ell for ell in ells if N % ell]
    order = good + [ell for ell in ells if N % ell == 0]
    if not order:
        raise InputError("no Hecke eigenvalues supplied")
    first = order[0]
    A = space.hecke_matrix(first)
    a = Q(eigenvalues[first])
    for j in range(space.dim):
        A[j][j] -= a
    basis = kernel(A)
    for ell in order[1:]:
        if len(basis) <= 1:
            break
        cols = []
        for vec in basis:
            vals = space.values(vec)
            img = space.apply_hecke(vals, ell)
            cols.append([x - eigenvalues[ell] * y for x, y in zip(img, vec)])
        rows = [[cols[s][j] for s in range(len(basis))] for j in range(space.dim)]
        combos = kernel(rows)
        basis = [[sum((c[s] * basis[s][j] for s in range(len(basis))), ZERO) for j in range(space.dim)] for c in combos]
    if len(basis) != 1:
        raise UncertifiedError(
            f"eigenspace at level {N} has dimension {len(basis)}; need more Hecke operators"
        )
    vec = basis[0]
    vals = space.values(vec)
    for ell in ells:
        if ell > verify_bound:
            continue
        img = space.apply_hecke(vals, ell)
        if any(x != eigenvalues[ell] * y for x, y in zip(img, vec)):
            raise HypothesisError(f"Hecke eigenvalue mismatch at {ell}: the curve does not match level {N}")
    sym = EigenSymbol(N, space.sign, vals, dict(eigenvalues), ONE, space.p1)
    return normalize_integral(sym, space)


hecke_eigenspace = hecke_eigensymbol


def cycle_lattice(sym: EigenSymbol, space: SymbolSpace):
    """Generator of phi(H_1(X_0(N), Z)) via a spanning tree of the cusp graph."""
    ncusp_edges = [space.boundary(i) for i in range(len(space.p1))]
    adj: dict[int, list[tuple[int, int, int]]] = {}
    for i, (t, h) in enumerate(ncusp_edges):
        adj.setdefault(t, []).append((h, i, 1))
        adj.setdefault(h, []).append((t, i, -1))
    pot: dict[int, object] = {}
    tree_edges = set()
    for start in sorted(adj):
        if start in pot:
            continue
        pot[start] = ZERO
        queue = deque([start])
        while queue:
            v = queue.popleft()
            for w, i, direction in adj[v]:
                if w not in pot:
                    pot[w] = pot[v] + direction * sym.values[i]
                    tree_edges.add(i)
                    queue.append(w)
    cycles = []
    for i, (t, h) in enumerate(ncusp_edges):
        if i in tree_edges:
            continue
        cycles.append(sym.values[i] - (pot[h] - pot[t]))
    return rational_gcd(cycles)


def normalize_integral(sym: EigenSymbol, space: SymbolSpace | None = None) -> EigenSymbol:
    """Scale so that values on closed cycles generate (1/2) Z; fix the sign by [0] > 0 when nonzero."""
    space = space or build_space(sym.N, sym.sign)
    g = cycle_lattice(sym, space)
    if g == 0:
        raise UncertifiedError("eigen-symbol vanishes on all cycles")
    factor = Q(1, 2) / g
    vals = [v * factor for v in sym.values]
    out = EigenSymbol(sym.N, sym.sign, vals, sym.eigenvalues, sym.scale * factor, sym.p1)
    ref = out(0)
    if ref == 0:
        ref = next((v for v in vals if v), ONE)
    if ref < 0:
        out = EigenSymbol(sym.N, sym.sign, [-v for v in vals], sym.eigenvalues, -out.scale, sym.p1)
    return out


def modular_symbols_for(E: CurveQ, N: int | None = None, bound: int = 50, budget: int = DEFAULT_LEVEL_BUDGET) -> tuple[EigenSymbol, EigenSymbol]:
    """Plus and minus eigen-symbols of the newform attached to E at its conductor."""
    N = N or E.conductor
    if N is None:
        raise InputError("conductor unknown: pass it explicitly (conductor computation is not implemented)")
    eig = target_eigenvalues(E, N, bound)
    plus = hecke_eigensymbol(build_space(N, 1, budget), eig, bound)
    minus = hecke_eigensymbol(build_space(N, -1, budget), eig, bound)
    return plus, minus


def lvalue_ratio(plus: EigenSymbol) -> Fraction:
    """L(E, 1) / Omega_E = [0]^+."""
    return Fraction(str(plus(0)))


# ---------------------------------------------------------------------------
# Twisted values and Mazur-Tate elements


def twisted_lvalue(plus: EigenSymbol, minus: EigenSymbol, chi: DirichletCharacter) -> Cyclotomic:
    """sum_{a mod m} chi^{-1}(a) [a/m]^{sign chi}, exact in Q(zeta_order(chi))."""
    m = chi.modulus
    ramified = chi.ramified_primes()
    if len(ramified) > 1 and any(plus.N % q == 0 for q in ramified):
        raise InputError("conductor of the character overlaps the level")
    sym = plus if chi.is_even() else minus
    order = chi.order
    out = [Fraction(0)] * order
    inv = chi.conj()
    for a in range(m):
        x = inv.angle(a)
        if x is None:
            continue
        out[int(x * order) % order] += Fraction(str(sym((a, m))))
    return Cyclotomic(order, out)


@dataclass(frozen=True)
class MazurTateElement:
    p: int
    level: int
    tame: int
    alpha: PadicNumber
    element: GroupRingElement
    shift: int = 0
    trivial_zero: bool = False
    reduction: str = "good"

    def series(self) -> IwasawaSeries:
        return self.element.to_series()

    def invariants(self, mu_asserted: int | None = None) -> InvariantPair:
        return self.element.invariants(mu_asserted)

    def project(self, level: int) -> GroupRingElement:
        return self.element.project(level)

    def evaluate(self, rho: DirichletCharacter) -> Cyclotomic:
        """sum_e c_e rho(gamma)^e in (Z/p^k)[zeta] for a wild character rho of conductor dividing p^(level+1)."""
        if rho.is_trivial():
            return Cyclotomic.scalar(1, sum(self.element.coeffs), self.p**self.element.k)
        comps = rho.components
        if len(comps) != 1 or comps[0][0] != "gamma":
            raise InputError("evaluate needs a character of Gamma")
        _, p, m, j = comps[0]
        if m > self.level:
            raise InputError("character conductor exceeds the level")
        order = p**m
        out = [0] * order
        for e, c in enumerate(self.element.coeffs):
            out[(e * j) % order] += c
        return Cyclotomic(order, out, self.p**self.element.k)

    def to_json(self) -> str:
        return json.dumps(
            {
                "p": self.p,
                "level": self.level,
                "tame": self.tame,
                "k": self.element.k,
                "alpha": str(self.alpha.residue),
                "shift": self.shift,
                "coefficients": {str(e): str(c) for e, c in enumerate(self.element.coeffs)},
            },
            sort_keys=True,
        )


def _padic(x, p: int, k: int) -> int:
    x = Q(x)
    num, den = int(x.numerator), int(x.denominator)
    return num * pow(den, -1, p**k) % p**k


def mazur_tate(
    plus: EigenSymbol,
    minus: EigenSymbol,
    p: int,
    n: int,
    a_p: int,
    k: int = 8,
    tame: int = 0,
    reduction: str = "good",
) -> MazurTateElement:
    """alpha-stabilized level-n element: sum over a mod p^(n+1) of mu(a) omega^tame(a) [a]^{-1}.

    Good ordinary p: mu(a) = alpha^{-m} [a/p^m] - alpha^{-(m+1)} [a/p^(m-1)], m = n + 1.
    Multiplicative p: mu(a) = alpha^{-m} [a/p^m] with alpha = a_p.
    """
    if p == 2:
        raise HypothesisError("p = 2 is not covered")
    if reduction == "good":
        if a_p % p == 0:
            raise HypothesisError(f"p = {p} is supersingular (p | a_p); ordinary reduction required")
        if a_p % p == 1:
            raise HypothesisError(f"p = {p} is anomalous (a_p = 1 mod p)")
    elif reduction not in ("split_mult", "nonsplit_mult"):
        raise HypothesisError(f"reduction type {reduction} at p is not covered")
    sym = plus if tame % 2 == 0 else minus
    m = n + 1
    P = p**m
    vals = {}
    for a in range(1, P):
        if a % p:
            vals[a] = sym((a, P))
            if reduction == "good":
                vals[("low", a % p**(m - 1))] = sym((a % p ** (m - 1), p ** (m - 1)))
    den_val = 0
    for v in vals.values():
        if v:
            den_val = max(den_val, valuation(int(Q(v).denominator), p))
    shift = den_val
    K = k + shift
    mod = p**k
    if reduction == "good":
        alpha = _hensel(a_p, p, k + 2)
    else:
        alpha = PadicNumber(p, k + 2, a_p)
    ainv = alpha.inverse().reduce(k).residue
    table = gamma_index_table(p, n)
    size = p**n
    zeta = teichmuller(_prim(p), p, k).residue
    dlog = _dlog_small(p)
    coeffs = [0] * size
    for a in range(1, P):
        if a % p == 0:
            continue
        top = _padic(vals[a] * p**shift, p, k)
        mu = pow(ainv, m, mod) * top
        if reduction == "good":
            low = _padic(vals[("low", a % p ** (m - 1))] * p**shift, p, k)
            mu -= pow(ainv, m + 1, mod) * low
        if tame:
            mu *= pow(zeta, tame * dlog[a % p], mod)
        e = (-int(table[a])) % size
        coeffs[e] = (coeffs[e] + mu) % mod
    elem = GroupRingElement(p, k, n, tuple(coeffs))
    tz = reduction == "split_mult" and tame == 0
    return MazurTateElement(p, n, tame, alpha.reduce(k), elem, shift, tz, reduction)


def _hensel(a_p: int, p: int, k: int) -> PadicNumber:
    from .padic_core import hensel_unit_root

    return hensel_unit_root(a_p, p, k)


@lru_cache(maxsize=16)
def _prim(p: int) -> int:
    from .padic_core import primitive_root

    return primitive_root(p)


@lru_cache(maxsize=16)
def _dlog_small(p: int) -> tuple[int, ...]:
    g = _prim(p)
    table = [0] * p
    x = 1
    for i in range(p - 1):
        table[x] = i
        x = x * g % p
    return tuple(table)


def check_interpolation(mt: MazurTateElement, plus: EigenSymbol, minus: EigenSymbol) -> bool:
    """rho(theta_n) = alpha^{-(m+1)} sum_a rho^{-1}(a) [a/p^(m+1)] for one wild rho per conductor p^(m+1)."""
    if mt.tame:
        return True
    mod = mt.p**mt.element.k
    for m in range(1, mt.level + 1):
        rho = DirichletCharacter.gamma(mt.p, m, 1)
        lhs = mt.evaluate(rho)
        rhs = twisted_lvalue(plus, minus, rho).reduce_mod(mod) * pow(mt.alpha.residue, -(m + 1), mod)
        if lhs != rhs:
            return False
    return True


# ---------------------------------------------------------------------------
# Analytic invariants and congruences


def _reduction_at_p(E: CurveQ, p: int) -> tuple[str, int]:
    loc = classify_reduction(minimal_model(E), p)
    if loc.reduction_type == "additive":
        raise HypothesisError(f"additive reduction at p = {p}: ordinary (good or multiplicative) reduction required")
    return loc.reduction_type, loc.a


def stripped_element(E: CurveQ, element: GroupRingElement, sigma0: Iterable[int]) -> GroupRingElement:
    """Multiply by the Euler elements P_ell(ell^{-1} gamma_ell) for ell in Sigma_0."""
    from .local_factors import euler_group_ring

    Em = minimal_model(E)
    out = element
    for ell in sorted(set(sigma0)):
        if ell == element.p:
            raise InputError("p cannot lie in Sigma_0")
        out = out * euler_group_ring(classify_reduction(Em, ell), element.p, element.k, element.level)
    return out


@dataclass(frozen=True)
class AnalyticReport:
    curve: str
    p: int
    level: int
    lvalue: Fraction
    alpha_mod_p: int
    primitive: InvariantPair
    nonprimitive: InvariantPair | None
    sigma0: tuple[int, ...]
    sigma_total: int
    shift: int
    trivial_zero: bool
    value_at_zero_mod_p: int
    interpolation_checked: bool

    def as_dict(self) -> dict:
        return {
            "curve": self.curve,
            "p": self.p,
            "level": self.level,
            "L(E,1)/Omega": str(self.lvalue),
            "alpha_mod_p": self.alpha_mod_p,
            "lambda": self.primitive.lam,
            "mu": self.primitive.mu,
            "certified": self.primitive.certified,
            "detail": self.primitive.detail,
            "sigma0": list(self.sigma0),
            "sigma_total": self.sigma_total,
            "lambda_sigma0": None if self.nonprimitive is None else self.nonprimitive.lam,
            "mu_sigma0": None if self.nonprimitive is None else self.nonprimitive.mu,
            "period_shift": self.shift,
            "trivial_zero": self.trivial_zero,
            "value_at_zero_mod_p": self.value_at_zero_mod_p,
            "interpolation_checked": self.interpolation_checked,
        }


def analytic_invariants(
    E: CurveQ,
    p: int,
    sigma0: Iterable[int] = (),
    level: int = 2,
    k: int = 6,
    max_level: int = 3,
    mu_asserted: int | None = None,
    symbols: tuple[EigenSymbol, EigenSymbol] | None = None,
) -> AnalyticReport:
    """mu and lambda of the level-n Mazur-Tate projection, raising the level until certified."""
    from .local_factors import sigma as sigma_record
    from .padic_core import Precision

    kind, a_p = _reduction_at_p(E, p)
    plus, minus = symbols or modular_symbols_for(E)
    sigma0 = tuple(sorted(set(sigma0)))
    n = level
    while True:
        mt = mazur_tate(plus, minus, p, n, a_p, k=k, reduction=kind)
        inv = mt.invariants(mu_asserted)
        if inv.certified or n >= max_level:
            break
        n += 1
    if not inv.certified:
        raise UncertifiedError(f"analytic invariants uncertified at level {n}: {inv.detail}")
    if mt.shift:
        inv = InvariantPair(inv.mu - mt.shift, inv.lam, inv.certified, (inv.detail + "; period rescaled by p^-%d" % mt.shift).lstrip("; "))
    nonprim = None
    total = 0
    if sigma0:
        prec = Precision(padic_digits=k, series_degree=max(p**n, 2))
        total = sum(sigma_record(E, ell, p, prec).sigma for ell in sigma0)
        nonprim = stripped_element(E, mt.element, sigma0).invariants(mu_asserted)
        if nonprim.certified and inv.mu == 0 and nonprim.lam != inv.lam + total:
            raise AssertionError(
                f"lambda with Sigma_0 removed is {nonprim.lam}, expected {inv.lam} + {total} from the local factors"
            )
    zero = sum(mt.element.coeffs) % p
    return AnalyticReport(
        E.name(),
        p,
        n,
        lvalue_ratio(plus),
        mt.alpha.residue % p,
        inv,
        nonprim,
        sigma0,
        total,
        mt.shift,
        mt.trivial_zero,
        zero,
        check_interpolation(mt, plus, minus),
    )


@dataclass(frozen=True)
class CongruenceWitness:
    holds: bool
    unit: int | None
    level: int
    detail: str = ""

    def as_dict(self) -> dict:
        return {"holds": self.holds, "unit": self.unit, "level": self.level, "detail": self.detail}


def _good_primes(p: int, levels: Iterable[int], bound: int) -> list[int]:
    return [ell for ell in primes_up_to(bound) if ell != p and all(N % ell for N in levels)]


def verify_congruence_pair(
    E1: CurveQ,
    E2: CurveQ,
    p: int,
    sigma0: Iterable[int],
    n: int = 2,
    k: int = 4,
    screen_bound: int = 100,
) -> CongruenceWitness:
    """Sigma_0-stripped stabilized elements of E1 and E2 agree mod p up to a unit in (Z/p)^x."""
    from .lambda_algebra import congruent_mod_p

    N1, N2 = E1.conductor, E2.conductor
    if N1 is None or N2 is None:
        raise InputError("both conductors are needed")
    for ell in _good_primes(p, (N1, N2), screen_bound) + [p]:
        if (trace(minimal_model(E1), ell) - trace(minimal_model(E2), ell)) % p:
            return CongruenceWitness(False, None, n, f"congruence screen failed at {ell}: a_ell(E1) and a_ell(E2) differ mod {p}")
    sides = []
    for E in (E1, E2):
        kind, a_p = _reduction_at_p(E, p)
        plus, minus = modular_symbols_for(E)
        mt = mazur_tate(plus, minus, p, n, a_p, k=k, reduction=kind)
        sides.append(stripped_element(E, mt.element, sigma0))
    ok, u = congruent_mod_p(sides[0].to_series(), sides[1].to_series())
    return CongruenceWitness(ok, u, n, "" if ok else "series differ mod p for every unit scalar")


def verify_congruence_eisenstein(
    E: CurveQ,
    psi: DirichletCharacter,
    p: int,
    sigma0: Iterable[int],
    n: int = 2,
    k: int = 4,
    screen_bound: int = 100,
) -> CongruenceWitness:
    """L^Sigma0(E) = u [F] L^Sigma0(C) L^Sigma0(D) mod p, with F the conductor of psi.

    The element [F] accounts for the Gauss sum tau(psi^{-1} rho^{-1}) in the
    normalization of the D-side against tau(rho^{-1}) on the curve side; it
    is a unit of Lambda, so it changes no invariant.
    """
    from .kubota_leopoldt import eisenstein_element
    from .lambda_algebra import congruent_mod_p

    if psi.is_even() or psi.modulus % p == 0:
        raise HypothesisError("psi must be odd and unramified at p")
    N = E.conductor
    if N is None:
        raise InputError("the conductor is needed")
    sigma0 = sorted(set(sigma0))
    missing = [q for q in primes_up_to(N) if N % q == 0 and q != p and q not in sigma0]
    if missing:
        raise HypothesisError(f"Sigma_0 must contain every prime ell != p dividing N; missing {missing}")
    Em = minimal_model(E)
    for ell in _good_primes(p, (N, psi.modulus), screen_bound):
        expected = psi.real_value(ell) * (1 + ell)
        if (trace(Em, ell) - expected) % p:
            raise HypothesisError(f"E[p] does not have the composition factors psi and omega psi^-1 (fails at {ell})")
    kind, a_p = _reduction_at_p(E, p)
    plus, minus = modular_symbols_for(E)
    mt = mazur_tate(plus, minus, p, n, a_p, k=k, reduction=kind)
    lhs = stripped_element(E, mt.element, sigma0)
    _, _, G = eisenstein_element(psi, p, n, sigma0, k=k)
    e = int(gamma_index_table(p, n)[psi.conductor % p ** (n + 1)])
    shifted = G * GroupRingElement.from_terms([(e, 1)], p, k, n)
    ok, u = congruent_mod_p(lhs.to_series(), shifted.to_series())
    return CongruenceWitness(ok, u, n, "" if ok else "series differ mod p for every unit scalar")
