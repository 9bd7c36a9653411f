"""Dirichlet characters and exact cyclotomic arithmetic.

A character is a product of components, each of which is one of

* ``("kronecker", D)``: the quadratic character a -> (D/a) of a fundamental
  discriminant D;
* ``("teich", p, j)``: the j-th power of the Teichmuller character mod p;
* ``("gamma", p, m, j)``: the wild character of conductor p^(m+1) sending
  the generator 1+p to exp(2 pi i j / p^m).

Values are recorded as angles in Q/Z (a value zeta = exp(2 pi i x) is
stored as x), which keeps products, conjugates and Galois actions exact.
Roots of unity of order dividing p-1 embed in Z_p through the Teichmuller
lift of the smallest primitive root mod p.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Iterable, Sequence

import gmpy2
import numpy as np
from sympy import cyclotomic_poly, factorint, totient

from .errors import InputError
from .padic_core import PadicNumber, gamma_exponent, primitive_root, teichmuller, one_unit_part


def _lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


def is_fundamental_discriminant(D: int) -> bool:
    if D in (0, 1):
        return False
    if D % 4 == 1:
        return all(e == 1 for e in factorint(abs(D)).values())
    if D % 4 == 0:
        m = D // 4
        if m % 4 not in (2, 3):
            return False
        return all(e == 1 for q, e in factorint(abs(m)).items() if q != 2) and m % 4 != 0
    return False


def fundamental_discriminant(d: int) -> int:
    """Discriminant of Q(sqrt(d)) for a squarefree d != 0, 1."""
    if d in (0, 1):
        raise InputError("d must be a squarefree integer other than 0 and 1")
    if any(e > 1 for e in factorint(abs(d)).values()):
        raise InputError(f"{d} is not squarefree")
    return d if d % 4 == 1 else 4 * d


@lru_cache(maxsize=64)
def _dlog_table(p: int) -> tuple[int, ...]:
    """ind_g(a) for a in (Z/p)^x with g the smallest primitive root."""
    g = primitive_root(p)
    table = [0] * p
    x = 1
    for i in range(p - 1):
        table[x] = i
        x = x * g % p
    return tuple(table)


@dataclass(frozen=True)
class DirichletCharacter:
    components: tuple[tuple, ...] = ()

    # ---- construction -------------------------------------------------
    @classmethod
    def trivial(cls) -> "DirichletCharacter":
        return cls(())

    @classmethod
    def kronecker(cls, D: int) -> "DirichletCharacter":
        if not is_fundamental_discriminant(D):
            raise InputError(f"{D} is not a fundamental discriminant")
        return cls((("kronecker", D),))

    @classmethod
    def teichmuller(cls, p: int, j: int = 1) -> "DirichletCharacter":
        j %= p - 1
        return cls((("teich", p, j),)) if j else cls.trivial()

    @classmethod
    def gamma(cls, p: int, m: int, j: int) -> "DirichletCharacter":
        j %= p**m
        return cls((("gamma", p, m, j),)) if j else cls.trivial()

    @classmethod
    def parse(cls, text: str) -> "DirichletCharacter":
        """Parse "kronecker:-4", "teichmuller^k:5", "teichmuller:5" and products joined by "*"."""
        chi = cls.trivial()
        for part in text.split("*"):
            part = part.strip()
            if not part or part == "trivial":
                continue
            name, _, arg = part.partition(":")
            name, _, power = name.partition("^")
            try:
                if name == "kronecker":
                    factor = cls.kronecker(int(arg))
                elif name in ("teichmuller", "omega"):
                    factor = cls.teichmuller(int(arg or 5), int(power or 1))
                else:
                    raise InputError(f"unknown character component {part!r}")
            except ValueError as exc:
                raise InputError(f"malformed character string {part!r}") from exc
            chi = chi * factor
        return chi

    def __mul__(self, other: "DirichletCharacter") -> "DirichletCharacter":
        return DirichletCharacter(_normalize(self.components + other.components))

    def conj(self) -> "DirichletCharacter":
        out = []
        for c in self.components:
            if c[0] == "kronecker":
                out.append(c)
            elif c[0] == "teich":
                out.append(("teich", c[1], (-c[2]) % (c[1] - 1)))
            else:
                out.append(("gamma", c[1], c[2], (-c[3]) % c[1] ** c[2]))
        return DirichletCharacter(_normalize(tuple(out)))

    def __pow__(self, e: int) -> "DirichletCharacter":
        out = DirichletCharacter.trivial()
        base = self if e >= 0 else self.conj()
        for _ in range(abs(e)):
            out = out * base
        return out

    # ---- structure ----------------------------------------------------
    @property
    def modulus(self) -> int:
        m = 1
        for c in self.components:
            m = _lcm(m, _component_modulus(c))
        return m

    @property
    def conductor(self) -> int:
        f = 1
        for q, e in self._local_exponents().items():
            f *= q**e
        return f

    def ramified_primes(self) -> list[int]:
        return sorted(q for q, e in self._local_exponents().items() if e)

    def _local_exponents(self) -> dict[int, int]:
        """Exponent of each prime in the conductor.

        A prime touched by a single primitive component takes that
        component's exponent; when components share a prime (for instance
        a Kronecker symbol and a Teichmuller power at p) the exponent is
        found by testing triviality on the filtration 1 + q^(e-1).
        """
        touching: dict[int, list[tuple]] = {}
        for c in self.components:
            primes = list(factorint(abs(c[1]))) if c[0] == "kronecker" else [c[1]]
            for q in primes:
                touching.setdefault(q, []).append(c)
        out = {}
        for q, comps in touching.items():
            if len(comps) == 1:
                c = comps[0]
                e = _valuation_int(_component_modulus(c), q)
                if c[0] == "gamma":
                    e -= min(_valuation_int(c[3], q), c[2])
                out[q] = e
            else:
                out[q] = self._tested_exponent(q)
        return out

    def _tested_exponent(self, q: int) -> int:
        mod = self.modulus
        E = _valuation_int(mod, q)
        qE = q**E
        cof = mod // qE
        for e in range(E, 0, -1):
            step = q ** (e - 1)
            for x in range(1, qE, step):
                if x % q and self.angle(_crt(x, qE, 1, cof)) != 0:
                    return e
        return 0

    def is_trivial(self) -> bool:
        return not self.components

    @property
    def order(self) -> int:
        o = 1
        for c in self.components:
            if c[0] == "kronecker":
                o = _lcm(o, 2)
            elif c[0] == "teich":
                o = _lcm(o, (c[1] - 1) // gcd(c[1] - 1, c[2]))
            else:
                o = _lcm(o, c[1] ** c[2] // gcd(c[1] ** c[2], c[3]))
        return o

    @property
    def parity(self) -> int:
        """+1 for even characters, -1 for odd ones."""
        a = self.angle(-1 % self.modulus) if self.modulus > 1 else Fraction(0)
        return 1 if a == 0 else -1

    def is_even(self) -> bool:
        return self.parity == 1

    # ---- values -------------------------------------------------------
    def angle(self, a: int) -> Fraction | None:
        """x in [0, 1) with chi(a) = exp(2 pi i x), or None when gcd(a, modulus) > 1."""
        total = Fraction(0)
        for c in self.components:
            v = _component_angle(c, a)
            if v is None:
                return None
            total += v
        return total - (total.numerator // total.denominator)

    def __call__(self, a: int) -> Fraction | None:
        return self.angle(a)

    def real_value(self, a: int) -> int:
        """Integer value of a character of order at most 2."""
        x = self.angle(a)
        if x is None:
            return 0
        if x == 0:
            return 1
        if x == Fraction(1, 2):
            return -1
        raise InputError("character value is not real")

    def padic_value(self, a: int, p: int, k: int) -> PadicNumber:
        """chi(a) in Z/p^k via the Teichmuller embedding (order must divide p-1)."""
        if (p - 1) % self.order:
            raise InputError(f"character of order {self.order} does not take values in Z_{p}")
        x = self.angle(a)
        if x is None:
            return PadicNumber(p, k, 0)
        e = x * (p - 1)
        zeta = teichmuller(primitive_root(p), p, k)
        return zeta ** int(e)

    def cyclotomic_value(self, a: int, m: int | None = None) -> "Cyclotomic":
        m = m or self.order
        x = self.angle(a)
        if x is None:
            return Cyclotomic.zero(m)
        e = x * m
        if e.denominator != 1:
            raise InputError(f"value of order {x.denominator} does not lie in Q(zeta_{m})")
        return Cyclotomic.zeta_power(m, int(e))

    def table(self) -> np.ndarray:
        """Values of a real character on 0..modulus-1 as an int8 array (0 off the unit group)."""
        if self.order > 2:
            raise InputError("table() needs a character of order at most 2")
        f = self.modulus
        out = np.ones(f, dtype=np.int8)
        for c in self.components:
            out *= _component_table(c, f)
        return out


def _normalize(components: Iterable[tuple]) -> tuple[tuple, ...]:
    """Merge components of the same kind and drop trivial ones."""
    teich: dict[int, int] = {}
    gam: dict[tuple[int, int], int] = {}
    kron: dict[int, int] = {}
    for c in components:
        if c[0] == "teich":
            teich[c[1]] = (teich.get(c[1], 0) + c[2]) % (c[1] - 1)
        elif c[0] == "gamma":
            key = (c[1], c[2])
            gam[key] = (gam.get(key, 0) + c[3]) % c[1] ** c[2]
        else:
            kron[c[1]] = kron.get(c[1], 0) ^ 1
    out: list[tuple] = []
    out += [("kronecker", D) for D, on in sorted(kron.items()) if on]
    out += [("teich", p, j) for p, j in sorted(teich.items()) if j]
    out += [("gamma", p, m, j) for (p, m), j in sorted(gam.items()) if j]
    return tuple(out)


def _component_modulus(c: tuple) -> int:
    if c[0] == "kronecker":
        return abs(c[1])
    if c[0] == "teich":
        return c[1]
    return c[1] ** (c[2] + 1)


def _component_angle(c: tuple, a: int) -> Fraction | None:
    kind = c[0]
    if kind == "kronecker":
        v = gmpy2.kronecker(c[1], a)
        if v == 0:
            return None
        return Fraction(0) if v == 1 else Fraction(1, 2)
    p = c[1]
    if a % p == 0:
        return None
    if kind == "teich":
        return Fraction(_dlog_table(p)[a % p] * c[2] % (p - 1), p - 1)
    m, j = c[2], c[3]
    e = gamma_exponent(one_unit_part(a, p, m + 1)).residue
    return Fraction(e * j % p**m, p**m)


def _component_table(c: tuple, f: int) -> np.ndarray:
    n = np.arange(f, dtype=np.int64)
    if c[0] == "teich":
        if c[2] * 2 % (c[1] - 1):
            raise InputError("non-real Teichmuller power has no integer table")
        p = c[1]
        if c[2] == 0:
            return np.where(n % p == 0, 0, 1).astype(np.int8)
        leg = _legendre_table(p)
        return leg[n % p]
    if c[0] != "kronecker":
        raise InputError("wild characters have no integer table")
    D = c[1]
    out = np.ones(f, dtype=np.int8)
    rest = D
    for q in factorint(abs(D)):
        if q == 2:
            continue
        out *= _legendre_table(q)[n % q]
        qstar = q if q % 4 == 1 else -q
        rest //= qstar
    r8 = n % 8
    if rest == -4:
        out *= np.select([r8 % 4 == 1, r8 % 4 == 3], [1, -1], 0).astype(np.int8)
    elif rest == 8:
        out *= np.select([(r8 == 1) | (r8 == 7), (r8 == 3) | (r8 == 5)], [1, -1], 0).astype(np.int8)
    elif rest == -8:
        out *= np.select([(r8 == 1) | (r8 == 3), (r8 == 5) | (r8 == 7)], [1, -1], 0).astype(np.int8)
    elif rest != 1:
        raise InputError(f"{D} is not a fundamental discriminant")
    return out


def legendre_table(q: int) -> np.ndarray:
    """Read-only int8 array of Legendre symbols (x/q) for x in [0, q)."""
    return _legendre_table(q)


@lru_cache(maxsize=16)
def _legendre_table(q: int) -> np.ndarray:
    sq = np.zeros(q, dtype=np.int8)
    x = np.arange(1, q, dtype=np.int64)
    sq[(x * x) % q] = 1
    out = np.where(sq == 1, 1, -1).astype(np.int8)
    out[0] = 0
    out.setflags(write=False)
    return out


def _valuation_int(n: int, q: int) -> int:
    v = 0
    while n % q == 0:
        n //= q
        v += 1
    return v


def _crt(a: int, m: int, b: int, n: int) -> int:
    """x with x = a mod m and x = b mod n (coprime moduli)."""
    if n == 1:
        return a % m
    if m == 1:
        return b % n
    return (a * n * pow(n, -1, m) + b * m * pow(m, -1, n)) % (m * n)


# ---------------------------------------------------------------------------
# Cyclotomic arithmetic


@lru_cache(maxsize=64)
def _phi_coeffs(m: int) -> tuple[int, ...]:
    """Coefficients of the m-th cyclotomic polynomial, constant term first."""
    poly = cyclotomic_poly(m, polys=True)
    return tuple(int(c) for c in reversed(poly.all_coeffs()))


class Cyclotomic:
    """Element of Q(zeta_m), or of (Z/p^k)[zeta_m], in the power basis mod Phi_m.

    Coefficients are Fractions unless ``modulus`` is given, in which case they
    are integers reduced modulo it.
    """

    __slots__ = ("m", "coeffs", "modulus")

    def __init__(self, m: int, coeffs: Sequence, modulus: int | None = None) -> None:
        self.m = m
        self.modulus = modulus
        deg = int(totient(m))
        c = list(coeffs)
        phi = _phi_coeffs(m)
        # Reduce modulo the monic Phi_m from the top degree down.
        for i in range(len(c) - 1, deg - 1, -1):
            lead = c[i]
            if lead:
                for j in range(deg + 1):
                    c[i - deg + j] -= lead * phi[j]
        c = (c + [0] * deg)[:deg]
        if modulus is None:
            self.coeffs = tuple(Fraction(x) for x in c)
        else:
            self.coeffs = tuple(_mod_coerce(x, modulus) for x in c)

    @classmethod
    def zero(cls, m: int, modulus: int | None = None) -> "Cyclotomic":
        return cls(m, [], modulus)

    @classmethod
    def scalar(cls, m: int, x, modulus: int | None = None) -> "Cyclotomic":
        return cls(m, [x], modulus)

    @classmethod
    def zeta_power(cls, m: int, e: int, modulus: int | None = None) -> "Cyclotomic":
        e %= m
        return cls(m, [0] * e + [1], modulus)

    def _check(self, other: "Cyclotomic") -> None:
        if self.m != other.m or self.modulus != other.modulus:
            raise InputError("cyclotomic fields or moduli differ")

    def __add__(self, other: "Cyclotomic") -> "Cyclotomic":
        self._check(other)
        return Cyclotomic(self.m, [a + b for a, b in zip(self.coeffs, other.coeffs)], self.modulus)

    def __sub__(self, other: "Cyclotomic") -> "Cyclotomic":
        self._check(other)
        return Cyclotomic(self.m, [a - b for a, b in zip(self.coeffs, other.coeffs)], self.modulus)

    def __neg__(self) -> "Cyclotomic":
        return Cyclotomic(self.m, [-a for a in self.coeffs], self.modulus)

    def __mul__(self, other) -> "Cyclotomic":
        if not isinstance(other, Cyclotomic):
            return Cyclotomic(self.m, [a * other for a in self.coeffs], self.modulus)
        self._check(other)
        prod = [0] * (len(self.coeffs) + len(other.coeffs))
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    if b:
                        prod[i + j] += a * b
        return Cyclotomic(self.m, prod, self.modulus)

    __rmul__ = __mul__

    def galois(self, t: int) -> "Cyclotomic":
        """Image under zeta -> zeta^t, gcd(t, m) = 1."""
        if gcd(t, self.m) != 1:
            raise InputError("Galois action needs t prime to m")
        out = [0] * self.m
        for i, a in enumerate(self.coeffs):
            out[i * t % self.m] += a
        return Cyclotomic(self.m, out, self.modulus)

    def conjugate(self) -> "Cyclotomic":
        return self.galois(-1 % self.m)

    def reduce_mod(self, modulus: int) -> "Cyclotomic":
        return Cyclotomic(self.m, list(self.coeffs), modulus)

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Cyclotomic):
            return NotImplemented
        return self.m == other.m and self.modulus == other.modulus and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash((self.m, self.modulus, self.coeffs))

    def to_complex(self) -> complex:
        import cmath

        z = cmath.exp(2j * cmath.pi / self.m)
        return sum(complex(float(a)) * z**i for i, a in enumerate(self.coeffs))

    def __repr__(self) -> str:
        terms = [f"{a}*z^{i}" for i, a in enumerate(self.coeffs) if a]
        return f"Cyclotomic(m={self.m}: {' + '.join(terms) or '0'})"


def _mod_coerce(x, modulus: int) -> int:
    if isinstance(x, Fraction) or hasattr(x, "denominator") and not isinstance(x, int):
        return int(x.numerator) * pow(int(x.denominator), -1, modulus) % modulus
    return int(x) % modulus


def gauss_sum(chi: DirichletCharacter) -> Cyclotomic:
    """tau(chi) = sum_{a mod f} chi(a) zeta_f^a, exact in Q(zeta_L) with L = lcm(f, order)."""
    f = chi.modulus
    L = _lcm(f, chi.order)
    total = Cyclotomic.zero(L)
    out = [0] * L
    for a in range(1, f + 1):
        x = chi.angle(a % f)
        if x is None:
            continue
        e = int(x * L) + a * (L // f)
        out[e % L] += 1
    return total + Cyclotomic(L, out)
