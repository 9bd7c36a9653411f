"""Local corrections at primes ell != p.

For a prime ell away from p, the Euler factor P_ell(X) becomes an element of
Lambda once the Frobenius at ell is written as a power of gamma:
Frob_ell acts on the cyclotomic Z_p-extension as gamma^(f_ell), where
(1+p)^(f_ell) = <ell> is the principal-unit part of ell.  The Lambda-element
is P_ell(ell^{-1} (1+T)^(f_ell)); its lambda-invariant is s_ell * d_ell,
with s_ell the p-part of (ell^(p-1) - 1)/p and d_ell the multiplicity of
ell^{-1} as a root of P_ell mod p.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .characters import DirichletCharacter
from .elliptic import ADDITIVE, GOOD, SPLIT, NONSPLIT, CurveQ, LocalData, classify_reduction, minimal_model
from .errors import HypothesisError, InputError, UncertifiedError
from .lambda_algebra import GroupRingElement, InvariantPair, IwasawaSeries, binomial_power, invariants
from .padic_core import PadicNumber, Precision, gamma_exponent, one_unit_part, valuation


def s_ell(ell: int, p: int) -> int:
    if ell % p == 0:
        raise InputError("s_ell needs ell != p")
    return p ** (valuation(pow(ell, p - 1) - 1, p) - 1)


def root_multiplicity(coeffs: tuple[int, ...] | list[int], root: int, p: int) -> int:
    """Multiplicity of X = root in sum c_i X^i over F_p (0 for the zero polynomial's constant 1)."""
    poly = [c % p for c in coeffs]
    while poly and poly[-1] == 0:
        poly.pop()
    mult = 0
    while len(poly) > 1:
        # Synthetic division by (X - root).
        rem = 0
        quot = [0] * (len(poly) - 1)
        for i in range(len(poly) - 1, -1, -1):
            rem = (rem * root + poly[i]) % p
            if i:
                quot[i - 1] = rem
        if rem:
            break
        mult += 1
        poly = quot
    return mult


def d_ell(local: LocalData, p: int) -> int:
    ell = local.prime
    if ell % p == 0:
        raise InputError("d_ell needs ell != p")
    return root_multiplicity(local.euler_poly, pow(ell, -1, p), p)


def f_ell(ell: int, p: int, k: int) -> PadicNumber:
    """Exponent f with (1+p)^f = <ell>, known modulo p^k."""
    if ell % p == 0:
        raise InputError("f_ell needs ell != p")
    return gamma_exponent(one_unit_part(ell, p, k + 1))


def _binomial_loss(n: int, p: int) -> int:
    return sum(valuation(j, p) for j in range(2, n))


def abelian_euler_series(coeffs: list[PadicNumber | int], ell: int, p: int, precision: Precision) -> IwasawaSeries:
    """sum_i c_i (1+T)^(i f_ell) at the requested precision (c_i already include any ell^{-i} scaling)."""
    k, n = precision.padic_digits, precision.series_degree
    work = k + _binomial_loss(n, p)
    f = f_ell(ell, p, work)
    total = IwasawaSeries(p, k, (0,) * n)
    for i, c in enumerate(coeffs):
        c_res = c.residue if isinstance(c, PadicNumber) else int(c)
        if c_res % p**k == 0:
            continue
        term = binomial_power(PadicNumber(p, work, i * f.residue), n).reduce(k)
        total = total + term.scale(c_res)
    return total


def euler_element(local: LocalData, p: int, precision: Precision | None = None) -> IwasawaSeries:
    """P_ell(ell^{-1} (1+T)^(f_ell)) expanded from the integer coefficients of P_ell."""
    precision = precision or Precision()
    ell = local.prime
    if ell % p == 0:
        raise InputError("the Euler element is defined for ell != p only")
    k = precision.padic_digits
    inv = pow(ell, -1, p**k)
    coeffs = [c * pow(inv, i, p**k) for i, c in enumerate(local.euler_poly)]
    return abelian_euler_series(coeffs, ell, p, precision)


def euler_group_ring(local: LocalData, p: int, k: int, level: int) -> GroupRingElement:
    """Image of the Euler element in (Z/p^k)[Gamma / Gamma^(p^level)]."""
    ell = local.prime
    e = f_ell(ell, p, level + 1).residue % p**level
    inv = pow(ell, -1, p**k)
    coeffs = [c * pow(inv, i, p**k) for i, c in enumerate(local.euler_poly)]
    return GroupRingElement.euler_factor(coeffs, e, p, k, level)


@dataclass(frozen=True)
class SigmaRecord:
    ell: int
    s: int
    d: int
    sigma: int
    euler_element: IwasawaSeries = field(repr=False)
    f: PadicNumber
    local: LocalData
    invariants: InvariantPair

    def as_dict(self) -> dict:
        return {
            "ell": self.ell,
            "s": self.s,
            "d": self.d,
            "sigma": self.sigma,
            "f_ell": str(self.f.residue),
            "reduction": self.local.reduction_type,
            "a": self.local.a,
            "lambda_P": self.invariants.lam,
            "mu_P": self.invariants.mu,
        }


def sigma(E: CurveQ, ell: int, p: int, precision: Precision | None = None) -> SigmaRecord:
    """s_ell, d_ell and the Euler element, with the check lambda(P_ell) = s_ell d_ell."""
    if ell == p:
        raise InputError("sigma is defined for ell != p")
    precision = precision or Precision()
    if not E.is_minimal_at(ell):
        E = minimal_model(E)
    local = classify_reduction(E, ell)
    s = s_ell(ell, p)
    d = d_ell(local, p)
    elem = euler_element(local, p, precision)
    inv = invariants(elem)
    if inv.mu != 0:
        raise AssertionError(f"Euler element at {ell} has positive mu")
    if s * d >= precision.series_degree:
        raise UncertifiedError(f"sigma at {ell} is {s * d}; raise the series degree above it")
    if inv.lam != s * d:
        raise AssertionError(f"lambda of the Euler element at {ell} is {inv.lam}, expected {s * d}")
    return SigmaRecord(ell, s, d, s * d, elem, f_ell(ell, p, precision.padic_digits), local, inv)


def character_local_corank(theta: DirichletCharacter, ell: int, p: int) -> int:
    """Corank of A_theta over the local cyclotomic tower at ell: 1 iff theta is unramified at ell with theta(ell) = 1."""
    if theta.order % p == 0:
        raise InputError("characters of order divisible by p are not supported")
    if ell == p:
        raise InputError("character_local_corank needs ell != p")
    if ell in theta.ramified_primes():
        return 0
    return 1 if theta.angle(ell) == 0 else 0


@dataclass(frozen=True)
class TorsionCorank:
    corank: int
    flagged: bool
    note: str = ""


def corank_torsion(local: LocalData, p: int) -> TorsionCorank:
    """Z_p-corank of the p-power torsion over the local cyclotomic tower at ell.

    Counts Frobenius eigenvalues on the inertia invariants that are
    principal units: for good reduction the multiplicity of X = 1 as a root
    of X^2 - a X + ell mod p; for multiplicative reduction the single
    eigenvalue a * ell; none for additive reduction.
    """
    ell = local.prime
    kind = local.reduction_type
    if kind == GOOD:
        m = root_multiplicity((ell, -local.a, 1), 1, p)
        flagged = m == 2
        note = "double eigenvalue 1 mod p: principal-unit multiplicity taken as 2" if flagged else ""
        return TorsionCorank(m, flagged, note)
    if kind in (SPLIT, NONSPLIT):
        return TorsionCorank(1 if (local.a * ell - 1) % p == 0 else 0, False)
    if kind == ADDITIVE:
        return TorsionCorank(0, False)
    raise InputError(f"unknown reduction type {kind}")


@dataclass(frozen=True)
class TLRecord:
    ell: int
    corank_phi: int
    corank_psi: int
    corank_torsion: int
    t: int
    s: int
    flagged: bool = False

    def as_dict(self) -> dict:
        return {
            "ell": self.ell,
            "corank_phi": self.corank_phi,
            "corank_psi": self.corank_psi,
            "corank_torsion": self.corank_torsion,
            "t": self.t,
            "s": self.s,
            "flagged": self.flagged,
        }


def t_ell(E: CurveQ, phi: DirichletCharacter, psi: DirichletCharacter, ell: int, p: int) -> TLRecord:
    """t_ell = corank(A_phi) + corank(A_psi) - corank(torsion) on the local tower at ell."""
    if phi * psi != DirichletCharacter.teichmuller(p, 1):
        raise HypothesisError("reducible case needs phi * psi = omega (the Teichmuller character)")
    if not E.is_minimal_at(ell):
        E = minimal_model(E)
    local = classify_reduction(E, ell)
    c_phi = character_local_corank(phi, ell, p)
    c_psi = character_local_corank(psi, ell, p)
    tors = corank_torsion(local, p)
    t = c_phi + c_psi - tors.corank
    if t < 0:
        raise AssertionError(f"negative t at {ell}: coranks {c_phi}, {c_psi}, {tors.corank}")
    return TLRecord(ell, c_phi, c_psi, tors.corank, t, s_ell(ell, p), tors.flagged)
