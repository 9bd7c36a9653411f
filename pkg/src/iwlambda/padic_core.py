"""Arithmetic in Z/p^k and the p-adic primitives used throughout.

A :class:`PadicNumber` is an element of Z_p known modulo p^k.  Every
operation reports only the digits it can vouch for: sums and products
carry the smaller of the two precisions, and division by p is a separate
method that loses one digit.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from .errors import InputError

IntLike = Union[int, "PadicNumber"]


def _check_prime(p: int) -> None:
    if p < 3 or p % 2 == 0 or any(p % q == 0 for q in range(3, int(p**0.5) + 1, 2)):
        raise InputError(f"p must be an odd prime, got {p}")


@dataclass(frozen=True)
class Precision:
    """Working precision: p-adic digits k and series truncation n."""

    padic_digits: int = 16
    series_degree: int = 32

    def __post_init__(self) -> None:
        if self.padic_digits < 1 or self.series_degree < 1:
            raise InputError("precision parameters must be positive")


@dataclass(frozen=True)
class IndeterminateValuation:
    """Returned by :func:`valuation` when a residue vanishes at its precision."""

    lower_bound: int

    def __str__(self) -> str:
        return f">= {self.lower_bound}"


@dataclass(frozen=True)
class PadicNumber:
    """An element of Z_p modulo p^k, stored as a reduced residue."""

    p: int
    k: int
    residue: int

    def __post_init__(self) -> None:
        if self.k < 1:
            raise InputError("precision must be at least 1")
        object.__setattr__(self, "residue", self.residue % self.p**self.k)

    @classmethod
    def of(cls, x: int | Fraction, p: int, k: int) -> "PadicNumber":
        """Embed an integer or a p-integral rational."""
        if isinstance(x, Fraction) or hasattr(x, "denominator") and not isinstance(x, int):
            num, den = int(x.numerator), int(x.denominator)
            if den % p == 0:
                raise InputError(f"{x} is not p-integral at p={p}")
            mod = p**k
            return cls(p, k, num * pow(den, -1, mod))
        return cls(p, k, int(x))

    @property
    def modulus(self) -> int:
        return self.p**self.k

    def _coerce(self, other: IntLike) -> "PadicNumber":
        if isinstance(other, PadicNumber):
            if other.p != self.p:
                raise InputError("prime mismatch")
            return other
        if isinstance(other, int):
            return PadicNumber(self.p, self.k, other)
        if isinstance(other, Fraction):
            return PadicNumber.of(other, self.p, self.k)
        return NotImplemented

    def __add__(self, other: IntLike) -> "PadicNumber":
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        k = min(self.k, o.k)
        return PadicNumber(self.p, k, self.residue + o.residue)

    __radd__ = __add__

    def __neg__(self) -> "PadicNumber":
        return PadicNumber(self.p, self.k, -self.residue)

    def __sub__(self, other: IntLike) -> "PadicNumber":
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other: IntLike) -> "PadicNumber":
        return (-self) + other

    def __mul__(self, other: IntLike) -> "PadicNumber":
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        k = min(self.k, o.k)
        return PadicNumber(self.p, k, self.residue * o.residue)

    __rmul__ = __mul__

    def __pow__(self, e: int) -> "PadicNumber":
        if e < 0:
            return self.inverse() ** (-e)
        return PadicNumber(self.p, self.k, pow(self.residue, e, self.modulus))

    def is_unit(self) -> bool:
        return self.residue % self.p != 0

    def inverse(self) -> "PadicNumber":
        """Inverse of a unit; non-units raise."""
        if not self.is_unit():
            raise InputError("division by a non-unit; use div_p for powers of p")
        return PadicNumber(self.p, self.k, pow(self.residue, -1, self.modulus))

    def __truediv__(self, other: IntLike) -> "PadicNumber":
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other: IntLike) -> "PadicNumber":
        return self._coerce(other) * self.inverse()

    def div_p(self) -> "PadicNumber":
        """Exact division by p; the result has one digit less."""
        if self.residue % self.p:
            raise InputError("not divisible by p")
        if self.k == 1:
            raise InputError("no digits left after division by p")
        return PadicNumber(self.p, self.k - 1, self.residue // self.p)

    def reduce(self, k: int) -> "PadicNumber":
        """Forget digits beyond p^k (k may not exceed the current precision)."""
        if k > self.k:
            raise InputError(f"cannot raise precision from {self.k} to {k}")
        return PadicNumber(self.p, k, self.residue)

    def signed(self) -> int:
        """Representative in (-p^k/2, p^k/2]."""
        r, m = self.residue, self.modulus
        return r - m if r > m // 2 else r

    def __eq__(self, other: object) -> bool:
        if isinstance(other, int):
            return (self.residue - other) % self.modulus == 0
        if isinstance(other, PadicNumber):
            k = min(self.k, other.k)
            return self.p == other.p and (self.residue - other.residue) % self.p**k == 0
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.p, self.k, self.residue))

    def __int__(self) -> int:
        return self.residue

    def __repr__(self) -> str:
        return f"{self.residue} + O({self.p}^{self.k})"


def valuation(x: IntLike | Fraction, p: int) -> int | IndeterminateValuation:
    """p-adic valuation of a nonzero integer, rational or PadicNumber.

    A PadicNumber whose residue is 0 has no determinable valuation; an
    :class:`IndeterminateValuation` carrying the lower bound k is returned.
    """
    if isinstance(x, PadicNumber):
        if x.residue == 0:
            return IndeterminateValuation(x.k)
        return valuation(x.residue, p)
    if isinstance(x, Fraction):
        if x == 0:
            raise InputError("valuation of zero")
        return valuation(x.numerator, p) - valuation(x.denominator, p)
    x = int(x)
    if x == 0:
        raise InputError("valuation of zero")
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


def teichmuller(a: int, p: int, k: int) -> PadicNumber:
    """The (p-1)-st root of unity congruent to a mod p, modulo p^k."""
    if a % p == 0:
        raise InputError(f"teichmuller undefined for p | a (a={a}, p={p})")
    mod = p**k
    x = a % mod
    # x -> x^p contracts towards the root of unity; k iterations reach p^k.
    for _ in range(k):
        x = pow(x, p, mod)
    return PadicNumber(p, k, x)


def one_unit_part(a: int, p: int, k: int) -> PadicNumber:
    """The principal-unit projection <a> = a * omega(a)^{-1}."""
    return PadicNumber(p, k, a) * teichmuller(a, p, k).inverse()


def plog(u: PadicNumber | int, k: int | None = None, p: int | None = None) -> PadicNumber:
    """Iwasawa logarithm of a principal unit u = 1 + x.

    For odd p the logarithm maps 1 + p^j Z_p isometrically onto p^j Z_p,
    so the output carries exactly the input precision.  Integer input is
    treated as exact, with the requested precision k.
    """
    if isinstance(u, PadicNumber):
        p, prec, val = u.p, u.k, u.residue
        if k is not None:
            prec = min(prec, k)
    else:
        if p is None or k is None:
            raise InputError("integer input to plog needs p and k")
        prec, val = k, int(u)
    if (val - 1) % p:
        raise InputError("log domain: argument is not 1 mod p")
    x = (val - 1) % p**prec
    if x == 0:
        return PadicNumber(p, prec, 0)
    # Term i has valuation >= i - v_p(i); stop once that exceeds prec.
    extra = 0
    while p ** (extra + 1) <= 4 * prec + 8:
        extra += 1
    work = p ** (prec + extra)
    total = 0
    i = 1
    while i - (i.bit_length()) < prec + extra + 2:
        v = valuation(i, p)
        term = x**i // p**v  # x^i is divisible by p^i >= p^v
        unit = i // p**v
        sign = 1 if i % 2 else -1
        total = (total + sign * term * pow(unit, -1, work)) % work
        i += 1
    return PadicNumber(p, prec, total)


def gamma_exponent(u: PadicNumber) -> PadicNumber:
    """Exponent s with (1+p)^s = u for a principal unit u.

    Known modulo p^(k-1) when u is known modulo p^k.
    """
    if u.k < 2:
        raise InputError("need at least two digits to take a gamma-exponent")
    num = plog(u)
    den = plog(1 + u.p, k=u.k + 1, p=u.p)
    # Both logarithms are divisible by p exactly once in the denominator.
    return PadicNumber(u.p, u.k - 1, (num.residue // u.p) * pow(den.residue // u.p, -1, u.p ** (u.k - 1)))


def hensel_unit_root(a_p: int, p: int, k: int, multiplicative: bool = False) -> PadicNumber:
    """Unit root alpha of x^2 - a_p x + p modulo p^k.

    With ``multiplicative=True`` the Frobenius polynomial is 1 - a_p X and
    alpha = a_p = +-1.
    """
    if multiplicative:
        if a_p not in (1, -1):
            raise InputError("multiplicative reduction needs a_p = +-1")
        return PadicNumber(p, k, a_p)
    if a_p % p == 0:
        raise InputError("not ordinary: p divides a_p")
    mod = p**k
    x = a_p % p
    # f'(x) = 2x - a_p is congruent to a_p mod p, a unit, so Newton converges.
    for _ in range(k.bit_length() + 1):
        fx = x * x - a_p * x + p
        dfx = 2 * x - a_p
        x = (x - fx * pow(dfx, -1, mod)) % mod
    return PadicNumber(p, k, x)


def primitive_root(p: int) -> int:
    """Smallest generator of (Z/p)^x; fixes the embedding of (p-1)-st roots of unity."""
    order = p - 1
    factors = []
    n, q = order, 2
    while q * q <= n:
        if n % q == 0:
            factors.append(q)
            while n % q == 0:
                n //= q
        q += 1
    if n > 1:
        factors.append(n)
    for g in range(2, p):
        if all(pow(g, order // q, p) != 1 for q in factors):
            return g
    raise InputError(f"no primitive root for {p}")
