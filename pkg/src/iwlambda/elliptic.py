"""Elliptic curves over Q: models, reduction types and traces of Frobenius."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from functools import cached_property
from importlib import resources
from math import gcd, isqrt
from typing import Iterable

import numpy as np
from sympy import factorint, isprime

from .characters import legendre_table
from .errors import HypothesisError, InputError
from .padic_core import PadicNumber, hensel_unit_root, valuation

DEFAULT_POINT_BOUND = 10**6

GOOD = "good"
SPLIT = "split_mult"
NONSPLIT = "nonsplit_mult"
ADDITIVE = "additive"


@dataclass(frozen=True)
class CurveQ:
    """y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6 with integer coefficients."""

    a1: int
    a2: int
    a3: int
    a4: int
    a6: int
    label: str | None = field(default=None, compare=False)
    conductor: int | None = field(default=None, compare=False)

    def __post_init__(self) -> None:
        if self.discriminant == 0:
            raise InputError("singular curve: discriminant is zero")

    @classmethod
    def from_ainvs(cls, ainvs: Iterable[int], label: str | None = None, conductor: int | None = None) -> "CurveQ":
        a = [int(x) for x in ainvs]
        if len(a) == 2:
            a = [0, 0, 0] + a
        if len(a) != 5:
            raise InputError("need five a-invariants a1,a2,a3,a4,a6 (or two: a4,a6)")
        return cls(*a, label=label, conductor=conductor)

    @classmethod
    def parse(cls, text: str, catalog: dict[str, "CurveQ"] | None = None) -> "CurveQ":
        """Accept "a1,a2,a3,a4,a6" or a catalog label."""
        text = text.strip().strip("[]")
        if "," in text:
            try:
                return cls.from_ainvs(int(t) for t in text.split(","))
            except ValueError as exc:
                raise InputError(f"cannot parse curve {text!r}") from exc
        catalog = catalog if catalog is not None else load_catalog()
        if text not in catalog:
            raise InputError(f"unknown curve label {text!r}")
        return catalog[text]

    @property
    def ainvs(self) -> tuple[int, int, int, int, int]:
        return (self.a1, self.a2, self.a3, self.a4, self.a6)

    @property
    def b2(self) -> int:
        return self.a1 * self.a1 + 4 * self.a2

    @property
    def b4(self) -> int:
        return self.a1 * self.a3 + 2 * self.a4

    @property
    def b6(self) -> int:
        return self.a3 * self.a3 + 4 * self.a6

    @property
    def b8(self) -> int:
        a1, a2, a3, a4, a6 = self.ainvs
        return a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4

    @property
    def c4(self) -> int:
        return self.b2**2 - 24 * self.b4

    @property
    def c6(self) -> int:
        return -(self.b2**3) + 36 * self.b2 * self.b4 - 216 * self.b6

    @cached_property
    def discriminant(self) -> int:
        b2, b4, b6, b8 = self.b2, self.b4, self.b6, self.b8
        return -b2 * b2 * b8 - 8 * b4**3 - 27 * b6 * b6 + 9 * b2 * b4 * b6

    def name(self) -> str:
        return self.label or "[" + ",".join(str(a) for a in self.ainvs) + "]"

    def bad_primes(self) -> list[int]:
        return sorted(factorint(abs(self.discriminant)))

    def is_minimal_at(self, ell: int) -> bool:
        c4, c6 = self.c4, self.c6
        if c4 and valuation(c4, ell) < 4 or c6 and valuation(c6, ell) < 6:
            return True
        u4, u6 = ell**4, ell**6
        return not _kraus(c4 // u4, c6 // u6)

    def __str__(self) -> str:
        return self.name()


def _kraus(c4: int, c6: int) -> bool:
    """Whether (c4, c6) are the invariants of an integral Weierstrass model."""
    disc = c4**3 - c6 * c6
    if disc == 0 or disc % 1728:
        return False
    if c6 and valuation(c6, 3) == 2:
        return False
    if c6 % 4 == 3:
        return True
    return (c4 == 0 or valuation(c4, 2) >= 4) and c6 % 32 in (0, 8)


def curve_from_c4c6(c4: int, c6: int, label: str | None = None) -> CurveQ:
    """Reduced integral model with a1, a3 in {0, 1} and a2 in {-1, 0, 1}."""
    if not _kraus(c4, c6):
        raise InputError("c4, c6 do not come from an integral model")
    b2 = (-c6) % 12
    if b2 > 6:
        b2 -= 12
    b4, r4 = divmod(b2 * b2 - c4, 24)
    b6, r6 = divmod(-(b2**3) + 36 * b2 * b4 - c6, 216)
    if r4 or r6:
        raise InputError("c4, c6 do not come from an integral model")
    a1 = b2 % 2
    a3 = b6 % 2
    return CurveQ(a1, (b2 - a1) // 4, a3, (b4 - a1 * a3) // 2, (b6 - a3) // 4, label=label)


def minimal_model(E: CurveQ) -> CurveQ:
    """Global minimal model, reduced (Kraus conditions with the Laska scaling search)."""
    c4, c6 = E.c4, E.c6
    g = gcd(c4, c6)
    u = 1
    for q in factorint(g):
        e = 0
        while (c4 == 0 or c4 % q ** (4 * (e + 1)) == 0) and (c6 == 0 or c6 % q ** (6 * (e + 1)) == 0):
            e += 1
        while e > 0 and not _kraus(c4 // q ** (4 * e), c6 // q ** (6 * e)):
            e -= 1
        u *= q**e
    m = curve_from_c4c6(c4 // u**4, c6 // u**6, label=E.label)
    return CurveQ(*m.ainvs, label=E.label, conductor=E.conductor)


def quadratic_twist(E: CurveQ, d: int) -> CurveQ:
    """Minimal model of the twist by Q(sqrt(d)); c4 -> d^2 c4, c6 -> d^3 c6."""
    if d == 0 or any(e > 1 for e in factorint(abs(d)).values()):
        raise InputError(f"twist parameter {d} must be a nonzero squarefree integer")
    label = f"{E.name()}^({d})" if d != 1 else E.label
    # y^2 = x^3 - 27 d^2 c4 x - 54 d^3 c6 has invariants (6^4 d^2 c4, 6^6 d^3 c6).
    W = CurveQ(0, 0, 0, -27 * d * d * E.c4, -54 * d**3 * E.c6)
    out = minimal_model(W)
    return CurveQ(*out.ainvs, label=label)


@dataclass(frozen=True)
class LocalData:
    prime: int
    reduction_type: str
    a: int
    euler_poly: tuple[int, ...]

    def as_dict(self) -> dict:
        return {"prime": self.prime, "type": self.reduction_type, "a": self.a, "euler_poly": list(self.euler_poly)}


def _euler_poly(kind: str, a: int, ell: int) -> tuple[int, ...]:
    if kind == GOOD:
        return (1, -a, ell)
    if kind == ADDITIVE:
        return (1,)
    return (1, -a)


def _count_brute(E: CurveQ, ell: int) -> int:
    """Affine points of the reduction plus the point at infinity (singular point included)."""
    a1, a2, a3, a4, a6 = (a % ell for a in E.ainvs)
    n = 1
    for x in range(ell):
        for y in range(ell):
            if (y * y + a1 * x * y + a3 * y - x**3 - a2 * x * x - a4 * x - a6) % ell == 0:
                n += 1
    return n


def _count_odd(E: CurveQ, ell: int) -> int:
    """Number of projective points over F_ell for odd ell, via (2y + a1 x + a3)^2 = 4x^3 + b2 x^2 + 2 b4 x + b6."""
    x = np.arange(ell, dtype=np.int64)
    b2, b4, b6 = E.b2 % ell, E.b4 % ell, E.b6 % ell
    x2 = x * x % ell
    f = (4 * x2 % ell * x + b2 * x2 + 2 * b4 * x + b6) % ell
    return ell + 1 + int(legendre_table(ell)[f].sum(dtype=np.int64))


def _points_total(E: CurveQ, ell: int) -> int:
    return _count_brute(E, ell) if ell <= 3 else _count_odd(E, ell)


def count_points(E: CurveQ, ell: int, bound: int = DEFAULT_POINT_BOUND) -> int:
    """a_ell = ell + 1 - #E(F_ell) at a prime of good reduction."""
    if ell > bound:
        raise InputError(f"prime {ell} exceeds the point-count bound {bound}")
    if not isprime(ell):
        raise InputError(f"{ell} is not prime")
    if E.discriminant % ell == 0:
        raise InputError(f"bad reduction at {ell}: count_points needs good reduction")
    a = ell + 1 - _points_total(E, ell)
    if a * a > 4 * ell:
        raise AssertionError(f"Hasse bound violated at {ell}: a = {a}")
    return a


def classify_reduction(E: CurveQ, ell: int) -> LocalData:
    if not E.is_minimal_at(ell):
        raise InputError(f"model is not minimal at {ell}; pass minimal_model(E) first")
    if E.discriminant % ell:
        a = count_points(E, ell)
        return LocalData(ell, GOOD, a, _euler_poly(GOOD, a, ell))
    if E.c4 % ell == 0:
        return LocalData(ell, ADDITIVE, 0, (1,))
    if ell > 3:
        split = legendre_table(ell)[(-E.c6) % ell] == 1
    else:
        # On a minimal model the singular fibre has ell (split) or ell + 2 (nonsplit) points.
        split = _count_brute(E, ell) == ell
    kind = SPLIT if split else NONSPLIT
    a = 1 if split else -1
    return LocalData(ell, kind, a, _euler_poly(kind, a, ell))


def bad_reduction_trace(E: CurveQ, ell: int) -> int:
    """ell + 1 - #E~(F_ell) counting the singular point; on a minimal model this is 1, -1 or 0."""
    return ell + 1 - _points_total(E, ell)


def trace(E: CurveQ, ell: int) -> int:
    """a_ell for any prime: point count when good, +-1 or 0 when bad."""
    if E.discriminant % ell:
        return count_points(E, ell)
    return classify_reduction(E, ell).a


def primes_up_to(n: int) -> list[int]:
    if n < 2:
        return []
    sieve = np.ones(n + 1, dtype=bool)
    sieve[:2] = False
    for q in range(2, isqrt(n) + 1):
        if sieve[q]:
            sieve[q * q :: q] = False
    return [int(q) for q in np.nonzero(sieve)[0]]


def ap_table(E: CurveQ, bound: int) -> dict[int, int]:
    """a_ell for all primes ell <= bound (bad primes included)."""
    return {ell: trace(E, ell) for ell in primes_up_to(bound)}


def is_ordinary(E: CurveQ, p: int, k: int = 16) -> tuple[bool, PadicNumber | None]:
    """Ordinarity at p with the unit root alpha_p (a_p itself for multiplicative reduction)."""
    loc = classify_reduction(E, p)
    if loc.reduction_type == ADDITIVE:
        raise HypothesisError(f"additive reduction at p = {p} is not covered (good ordinary or multiplicative needed)")
    if loc.reduction_type in (SPLIT, NONSPLIT):
        return True, hensel_unit_root(loc.a, p, k, multiplicative=True)
    if loc.a % p == 0:
        return False, None
    return True, hensel_unit_root(loc.a, p, k)


def is_anomalous(E: CurveQ, p: int) -> bool:
    return trace(E, p) % p == 1


def load_catalog(path: str | None = None) -> dict[str, CurveQ]:
    """Read the bundled TSV catalog (label, a-invariants, optional conductor)."""
    if path is None:
        text = resources.files("iwlambda").joinpath("data/curves.tsv").read_text()
    else:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    out: dict[str, CurveQ] = {}
    rows = [r for r in text.splitlines() if r.strip() and not r.startswith("#")]
    for row in csv.reader(rows, delimiter="\t"):
        if len(row) < 2:
            raise InputError(f"catalog row needs a label and a-invariants: {row!r}")
        label, ainvs = row[0].strip(), row[1].strip()
        cond = int(row[2]) if len(row) > 2 and row[2].strip() else None
        try:
            E = CurveQ.from_ainvs((int(t) for t in ainvs.strip("[]").split(",")), label=label, conductor=cond)
        except ValueError as exc:
            raise InputError(f"bad catalog row for {label}") from exc
        out[label] = E
    return out


def catalog_dump(entries: dict[str, CurveQ]) -> str:
    lines = ["# label\ta-invariants\tconductor"]
    for label, E in entries.items():
        cond = "" if E.conductor is None else str(E.conductor)
        lines.append(f"{label}\t[{','.join(str(a) for a in E.ainvs)}]\t{cond}")
    return "\n".join(lines) + "\n"
