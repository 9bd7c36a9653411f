"""Truncated power series over Z_p and the finite group rings Z_p[Gamma_n].

``IwasawaSeries`` models Lambda = Z_p[[T]] with T = gamma - 1 and
kappa(gamma) = 1 + p.  ``GroupRingElement`` models the quotient
Lambda / ((1+T)^(p^n) - 1), written in the basis of group elements
gamma^e, 0 <= e < p^n; it is where Mazur-Tate and Stickelberger elements
live before they are expanded into T.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from math import comb
from typing import Iterable, Sequence

from .errors import InputError
from .padic_core import PadicNumber, valuation


@dataclass(frozen=True)
class InvariantPair:
    """mu and lambda of a series, with a certification flag."""

    mu: int
    lam: int
    certified: bool
    detail: str = ""

    def as_dict(self) -> dict:
        return {"mu": self.mu, "lambda": self.lam, "certified": self.certified, "detail": self.detail}


@dataclass(frozen=True)
class IwasawaSeries:
    """c_0 + c_1 T + ... + c_{n-1} T^{n-1} with coefficients mod p^k."""

    p: int
    k: int
    coeffs: tuple[int, ...]

    def __post_init__(self) -> None:
        mod = self.p**self.k
        object.__setattr__(self, "coeffs", tuple(int(c) % mod for c in self.coeffs))
        if not self.coeffs:
            raise InputError("series needs at least one coefficient")

    @classmethod
    def from_coeffs(cls, coeffs: Iterable[int | PadicNumber], p: int, k: int, n: int | None = None) -> "IwasawaSeries":
        vals = [c.residue if isinstance(c, PadicNumber) else int(c) for c in coeffs]
        if n is not None:
            vals = (vals + [0] * n)[:n]
        return cls(p, k, tuple(vals))

    @classmethod
    def one(cls, p: int, k: int, n: int) -> "IwasawaSeries":
        return cls(p, k, (1,) + (0,) * (n - 1))

    @property
    def n(self) -> int:
        return len(self.coeffs)

    @property
    def modulus(self) -> int:
        return self.p**self.k

    def coefficient(self, i: int) -> PadicNumber:
        return PadicNumber(self.p, self.k, self.coeffs[i])

    def _align(self, other: "IwasawaSeries") -> tuple[int, int]:
        if self.p != other.p:
            raise InputError("prime mismatch")
        return min(self.k, other.k), min(self.n, other.n)

    def __add__(self, other: "IwasawaSeries") -> "IwasawaSeries":
        k, n = self._align(other)
        return IwasawaSeries(self.p, k, tuple(a + b for a, b in zip(self.coeffs[:n], other.coeffs[:n])))

    def __neg__(self) -> "IwasawaSeries":
        return IwasawaSeries(self.p, self.k, tuple(-a for a in self.coeffs))

    def __sub__(self, other: "IwasawaSeries") -> "IwasawaSeries":
        return self + (-other)

    def scale(self, c: int | PadicNumber) -> "IwasawaSeries":
        k = self.k
        if isinstance(c, PadicNumber):
            k = min(k, c.k)
            c = c.residue
        return IwasawaSeries(self.p, k, tuple(a * c for a in self.coeffs))

    def __mul__(self, other: "IwasawaSeries") -> "IwasawaSeries":
        return mul(self, other)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, IwasawaSeries):
            return NotImplemented
        k, n = self._align(other)
        m = self.p**k
        return all((a - b) % m == 0 for a, b in zip(self.coeffs[:n], other.coeffs[:n]))

    def __hash__(self) -> int:
        return hash((self.p, self.k, self.coeffs))

    def truncate(self, n: int) -> "IwasawaSeries":
        return IwasawaSeries(self.p, self.k, self.coeffs[:n])

    def reduce(self, k: int) -> "IwasawaSeries":
        return IwasawaSeries(self.p, min(k, self.k), self.coeffs)

    def to_json(self) -> str:
        return json.dumps({"p": self.p, "k": self.k, "n": self.n, "coefficients": [str(c) for c in self.coeffs]})

    @classmethod
    def from_json(cls, text: str) -> "IwasawaSeries":
        data = json.loads(text)
        coeffs = [int(c) for c in data["coefficients"]]
        if len(coeffs) != int(data["n"]):
            raise InputError("series JSON: coefficient count does not match n")
        return cls(int(data["p"]), int(data["k"]), tuple(coeffs))

    def __repr__(self) -> str:
        terms = [f"{c}*T^{i}" for i, c in enumerate(self.coeffs) if c]
        return f"IwasawaSeries(p={self.p}, k={self.k}, n={self.n}: {' + '.join(terms) or '0'})"


def mul(f: IwasawaSeries, g: IwasawaSeries) -> IwasawaSeries:
    """Truncated product at degree min(n_f, n_g) and precision min(k_f, k_g)."""
    k, n = f._align(g)
    mod = f.p**k
    out = [0] * n
    for i, a in enumerate(f.coeffs[:n]):
        if a == 0:
            continue
        for j in range(n - i):
            b = g.coeffs[j]
            if b:
                out[i + j] += a * b
    return IwasawaSeries(f.p, k, tuple(c % mod for c in out))


def invariants(f: IwasawaSeries) -> InvariantPair:
    """Weierstrass invariants: mu = least coefficient valuation, lambda = first index attaining it.

    Uncertified when every coefficient vanishes modulo p^k.  When mu > 0 the
    truncation can hide a smaller valuation beyond degree n; the detail
    string says so.
    """
    vals = [valuation(c, f.p) if c else None for c in f.coeffs]
    present = [v for v in vals if v is not None]
    if not present:
        raise InputError("insufficient precision: series vanishes at working precision")
    mu = min(present)
    lam = vals.index(mu)
    detail = "" if mu == 0 else f"mu read from the first {f.n} coefficients only"
    return InvariantPair(mu, lam, mu < f.k, detail)


def binomial_power(f_exponent: PadicNumber | int, n: int, p: int | None = None, k: int | None = None) -> IwasawaSeries:
    """(1+T)^f = sum_j C(f, j) T^j for f in Z_p, truncated at degree n.

    The j-th coefficient depends on f modulo p^(k - v_p(j!)) only, so the
    result carries precision k - v_p((n-1)!) where k is the precision of f.
    Integer exponents are exact and keep the requested precision.
    """
    if isinstance(f_exponent, PadicNumber):
        p, kf, rep = f_exponent.p, f_exponent.k, f_exponent.residue
        loss = sum(valuation(j, p) for j in range(2, n))
        k_out = kf - loss
        if k is not None:
            k_out = min(k_out, k)
        if k_out < 1:
            raise InputError("exponent precision too low for the requested truncation")
    else:
        if p is None or k is None:
            raise InputError("integer exponent needs p and k")
        rep, k_out = int(f_exponent), k
    mod = p**k_out
    coeffs = []
    c = 1
    for j in range(n):
        coeffs.append(c % mod)
        # C(f, j+1) = C(f, j) (f - j) / (j + 1), exact over the integers.
        c = c * (rep - j) // (j + 1) if rep >= 0 else _gen_binom(rep, j + 1)
    return IwasawaSeries(p, k_out, tuple(coeffs))


def _gen_binom(x: int, j: int) -> int:
    num = 1
    for i in range(j):
        num *= x - i
    den = 1
    for i in range(2, j + 1):
        den *= i
    return num // den


def involution(f: IwasawaSeries) -> IwasawaSeries:
    """Substitute T -> (1+T)^{-1} - 1."""
    n = f.n
    s = IwasawaSeries(f.p, f.k, tuple([0] + [(-1) ** j for j in range(1, n)]))
    return compose(f, s)


def compose(f: IwasawaSeries, s: IwasawaSeries) -> IwasawaSeries:
    """f(s(T)) for s with zero constant term (Horner evaluation)."""
    if s.coeffs[0] % f.p:
        raise InputError("inner series must have constant term divisible by p")
    k, n = f._align(s)
    acc = IwasawaSeries(f.p, k, (0,) * n)
    for c in reversed(f.coeffs[:n]):
        acc = mul(acc, s) + IwasawaSeries(f.p, k, (c,) + (0,) * (n - 1))
    return acc


def change_generator(f: IwasawaSeries, s: int) -> IwasawaSeries:
    """Substitute T -> (1+T)^s - 1; for a unit s this re-expresses f in another generator."""
    inner = binomial_power(s, f.n, p=f.p, k=f.k)
    inner = IwasawaSeries(f.p, f.k, (0,) + inner.coeffs[1:])
    return compose(f, inner)


def eval_at_zero(f: IwasawaSeries) -> PadicNumber:
    return f.coefficient(0)


def congruent_mod_p(f: IwasawaSeries, g: IwasawaSeries, unit_allowed: bool = True) -> tuple[bool, int | None]:
    """Decide f = u g (mod p) for a scalar u in (Z/p)^x; returns (result, witness)."""
    _, n = f._align(g)
    p = f.p
    fr = [c % p for c in f.coeffs[:n]]
    gr = [c % p for c in g.coeffs[:n]]
    candidates = range(1, p) if unit_allowed else (1,)
    for u in candidates:
        if all((a - u * b) % p == 0 for a, b in zip(fr, gr)):
            return True, u
    return False, None


def weierstrass_degree(f: IwasawaSeries) -> int:
    """Degree of the distinguished polynomial of a series with mu = 0."""
    inv = invariants(f)
    if inv.mu:
        raise InputError("series has positive mu")
    return inv.lam


@dataclass(frozen=True)
class GroupRingElement:
    """sum_e c_e gamma^e in (Z/p^k)[Gamma / Gamma^(p^n)]."""

    p: int
    k: int
    level: int
    coeffs: tuple[int, ...]

    def __post_init__(self) -> None:
        size = self.p**self.level
        if len(self.coeffs) != size:
            raise InputError(f"group ring of level {self.level} needs {size} coefficients")
        mod = self.p**self.k
        object.__setattr__(self, "coeffs", tuple(int(c) % mod for c in self.coeffs))

    @classmethod
    def from_terms(cls, terms: Iterable[tuple[int, int]], p: int, k: int, level: int) -> "GroupRingElement":
        size = p**level
        out = [0] * size
        for e, c in terms:
            out[e % size] += c
        return cls(p, k, level, tuple(out))

    @classmethod
    def euler_factor(cls, coefficients: Sequence[int | PadicNumber], exponent: int, p: int, k: int, level: int) -> "GroupRingElement":
        """sum_i c_i gamma^(i * exponent) for a polynomial sum_i c_i X^i in X = gamma^exponent."""
        terms = []
        for i, c in enumerate(coefficients):
            val = c.residue if isinstance(c, PadicNumber) else int(c)
            terms.append((i * exponent, val))
        return cls.from_terms(terms, p, k, level)

    @property
    def size(self) -> int:
        return self.p**self.level

    def _align(self, other: "GroupRingElement") -> int:
        if (self.p, self.level) != (other.p, other.level):
            raise InputError("group ring mismatch")
        return min(self.k, other.k)

    def __mul__(self, other: "GroupRingElement") -> "GroupRingElement":
        k = self._align(other)
        size, mod = self.size, self.p**k
        out = [0] * size
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    if b:
                        out[(i + j) % size] += a * b
        return GroupRingElement(self.p, k, self.level, tuple(c % mod for c in out))

    def __add__(self, other: "GroupRingElement") -> "GroupRingElement":
        k = self._align(other)
        return GroupRingElement(self.p, k, self.level, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def scale(self, c: int) -> "GroupRingElement":
        return GroupRingElement(self.p, self.k, self.level, tuple(a * c for a in self.coeffs))

    def inverse_twist(self) -> "GroupRingElement":
        """The involution gamma -> gamma^{-1}."""
        size = self.size
        return GroupRingElement(self.p, self.k, self.level, tuple(self.coeffs[(-e) % size] for e in range(size)))

    def project(self, level: int) -> "GroupRingElement":
        """Image under the natural map to a lower level."""
        if level > self.level:
            raise InputError("cannot project to a higher level")
        return GroupRingElement.from_terms(enumerate(self.coeffs), self.p, self.k, level)

    def augmentation(self) -> PadicNumber:
        return PadicNumber(self.p, self.k, sum(self.coeffs))

    def to_series(self) -> IwasawaSeries:
        """Expand sum_e c_e (1+T)^e into the T-basis (degree < p^level).

        The result is congruent modulo (1+T)^(p^n) - 1 to any series with this
        image; coefficientwise it agrees with such a series modulo p.
        """
        size, mod = self.size, self.p**self.k
        out = [0] * size
        for e, c in enumerate(self.coeffs):
            if c:
                for j in range(e + 1):
                    out[j] += c * comb(e, j)
        return IwasawaSeries(self.p, self.k, tuple(v % mod for v in out))

    def invariants(self, mu_asserted: int | None = None) -> InvariantPair:
        """mu and lambda of any series of Lambda with this image.

        Certified when a unit coefficient is present (then mu = 0 and lambda is
        below p^n), or when the caller asserts mu equal to the content found and
        lambda < p^(n - mu): below that degree the coefficients of
        (1+T)^(p^n) - 1 are divisible by p^(mu+1), so the level-n image pins
        down every coefficient modulo p^(mu+1).
        """
        series = self.to_series()
        if not any(series.coeffs):
            raise InputError("insufficient precision: element vanishes; raise level or precision")
        base = invariants(series)
        if base.mu == 0:
            return InvariantPair(0, base.lam, True, "")
        if mu_asserted is not None and mu_asserted == base.mu:
            if base.lam < self.p ** max(self.level - base.mu, 0):
                return InvariantPair(base.mu, base.lam, True, "mu asserted by caller")
            return InvariantPair(base.mu, base.lam, False, "lambda not below p^(n - mu); raise level")
        return InvariantPair(base.mu, base.lam, False, "content divisible by p at this level; raise level")
