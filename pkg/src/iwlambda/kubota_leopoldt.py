"""Kubota-Leopoldt p-adic L-functions through Stickelberger elements.

For an even character theta of order dividing p-1 put theta' = theta omega^{-1}
and M = F p^(n+1), with F the prime-to-p part of the modulus of theta'.  The
level-n element

    G_theta = - sum_{a mod M, (a, Fp) = 1} B_1(a/M) theta'(a) [a]

projected to (Z/p^k)[Gamma / Gamma^(p^n)] sends a character rho of Gamma of
conductor p^(m), m <= n+1, to -B_{1, theta' rho}.  Its image in Lambda / p
is the Iwasawa power series of L_p(s, theta) up to degree p^n, which is all
that mu and lambda need.

When theta' = psi omega^j with psi nontrivial of conductor F prime to p,
the inner sum over a = b (mod p^(n+1)) collapses: writing P = p^(n+1) and
Q = P^{-1} mod F, the coefficient of [b] equals

    - omega^j(b) psi(P) (B_{1,psi} + Psi(b Q mod F)),   Psi(t) = sum_{0 <= w < t} psi(w),

so one pass over the residues mod F replaces the O(F P) double sum.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable

import numpy as np

from .characters import Cyclotomic, DirichletCharacter
from .errors import BudgetError, HypothesisError, InputError, UncertifiedError
from .lambda_algebra import GroupRingElement, InvariantPair, IwasawaSeries
from .padic_core import PadicNumber, Precision, teichmuller
from .local_factors import f_ell

DEFAULT_BUDGET = 5 * 10**7


def bernoulli_b1(chi: DirichletCharacter) -> Cyclotomic:
    """B_{1,chi} = (1/f) sum_{a=1}^{f} chi(a) a, exact in Q(zeta_order), f the modulus of chi."""
    if chi.is_trivial():
        raise InputError("B_1 of the trivial character is attached to the pole")
    f = chi.modulus
    m = chi.order
    out = [Fraction(0)] * m
    for a in range(1, f + 1):
        x = chi.angle(a % f)
        if x is not None:
            out[int(x * m) % m] += Fraction(a, f)
    return Cyclotomic(m, out)


def bernoulli_b1_padic(chi: DirichletCharacter, p: int, k: int) -> PadicNumber:
    """B_{1,chi} in Z/p^k (the modulus of chi must be prime to p or the sum must be p-integral)."""
    f = chi.modulus
    total = 0
    for a in range(1, f + 1):
        v = chi.padic_value(a % f, p, k + 8).residue
        total += a * v
    return _divide(total, f, p, k)


def _divide(num: int, den: int, p: int, k: int) -> PadicNumber:
    v = 0
    while den % p == 0:
        if num % p:
            raise UncertifiedError("value is not p-integral")
        num //= p
        den //= p
        v += 1
    return PadicNumber(p, k, num * pow(den, -1, p**k))


@lru_cache(maxsize=32)
def gamma_index_table(p: int, n: int) -> np.ndarray:
    """e(b) in [0, p^n) with <b> = (1+p)^e(b) mod p^(n+1); -1 on multiples of p."""
    P = p ** (n + 1)
    table = np.full(P, -1, dtype=np.int64)
    roots = sorted({teichmuller(a, p, n + 1).residue for a in range(1, p)})
    u = 1
    for e in range(p**n):
        for z in roots:
            table[z * u % P] = e
        u = u * (1 + p) % P
    table.setflags(write=False)
    return table


def _split_tame(theta_prime: DirichletCharacter, p: int) -> tuple[DirichletCharacter, int]:
    """Write theta' = psi * omega^j with psi of modulus prime to p."""
    j = 0
    rest = []
    for c in theta_prime.components:
        if c[0] == "teich" and c[1] == p:
            j = c[2]
        elif c[0] == "gamma":
            raise InputError("wild components are not tame characters")
        else:
            rest.append(c)
    psi = DirichletCharacter(tuple(rest))
    if psi.modulus % p == 0:
        # A Kronecker factor ramified at p: fold its p-part into omega^j.
        raise InputError("tame part must have conductor prime to p; pass the Teichmuller factor explicitly")
    return psi, j


def _check_branch(theta: DirichletCharacter, p: int) -> None:
    if (p - 1) % theta.order:
        raise InputError(f"character order {theta.order} does not divide p - 1")
    if not theta.is_even():
        raise HypothesisError("the Kubota-Leopoldt branch needs an even character theta")
    if theta.is_trivial():
        raise InputError("the trivial character has a pole")


def stickelberger_element(
    theta: DirichletCharacter,
    p: int,
    n: int,
    k: int = 16,
    method: str = "fast",
    budget: int = DEFAULT_BUDGET,
) -> GroupRingElement:
    """Level-n Stickelberger element G_theta in (Z/p^k)[Gamma / Gamma^(p^n)]."""
    _check_branch(theta, p)
    theta_prime = theta * DirichletCharacter.teichmuller(p, -1)
    psi, j = _split_tame(theta_prime, p)
    F = psi.modulus
    P = p ** (n + 1)
    if method == "fast" and not psi.is_trivial():
        if F > budget:
            raise BudgetError(f"conductor {F} exceeds the budget {budget}")
        coeffs = _fast_coefficients(psi, j, p, n, k)
    else:
        if F * P > budget:
            raise BudgetError(f"direct sum over {F * P} residues exceeds the budget {budget}")
        coeffs = _direct_coefficients(psi, j, p, n, k)
    table = gamma_index_table(p, n)
    out = [0] * p**n
    for b, c in coeffs.items():
        out[int(table[b])] += c
    return GroupRingElement(p, k, n, tuple(out))


def _psi_padic_table(psi: DirichletCharacter, p: int, K: int) -> np.ndarray | list[int]:
    F = psi.modulus
    if psi.order <= 2:
        return psi.table().astype(np.int64)
    return [psi.padic_value(w, p, K).residue for w in range(F)]


def _fast_coefficients(psi: DirichletCharacter, j: int, p: int, n: int, k: int) -> dict[int, int]:
    F = psi.modulus
    P = p ** (n + 1)
    mod = p**k
    Q = pow(P, -1, F)
    vals = _psi_padic_table(psi, p, k)
    if isinstance(vals, np.ndarray):
        prefix = np.concatenate(([0], np.cumsum(vals, dtype=np.int64)))
        weighted = int(np.dot(np.arange(F, dtype=np.int64), vals))
        psi_P = int(vals[P % F])
    else:
        prefix = [0]
        for v in vals:
            prefix.append(prefix[-1] + v)
        weighted = sum(w * v for w, v in enumerate(vals))
        psi_P = vals[P % F]
    b1 = _divide(weighted, F, p, k).residue
    zeta = teichmuller(_generator(p), p, k).residue
    dlog = _dlog(p)
    out = {}
    for b in range(1, P):
        if b % p == 0:
            continue
        w = pow(zeta, j * dlog[b % p], mod) if j else 1
        s = b * Q % F
        out[b] = -w * psi_P * (b1 + int(prefix[s])) % mod
    return out


def _direct_coefficients(psi: DirichletCharacter, j: int, p: int, n: int, k: int) -> dict[int, int]:
    """Plain double sum with B_1(a/M) = a/M - 1/2; the reference path."""
    F = psi.modulus
    P = p ** (n + 1)
    M = F * P
    K = k + n + 2
    modK = p**K
    zeta = teichmuller(_generator(p), p, K).residue
    dlog = _dlog(p)
    vals = [1] if psi.is_trivial() else [psi.padic_value(w, p, K).residue for w in range(F)]
    S = {}
    C = {}
    for a in range(1, M):
        if a % p == 0 or vals[a % F] == 0:
            continue
        v = vals[a % F] * (pow(zeta, j * dlog[a % p], modK) if j else 1) % modK
        b = a % P
        S[b] = (S.get(b, 0) + a * v) % modK
        C[b] = (C.get(b, 0) + v) % modK
    out = {}
    mod = p**k
    for b in S:
        X = (2 * S[b] - M * C[b]) % modK
        if X % P:
            raise UncertifiedError("Stickelberger coefficient is not p-integral for this character")
        out[b] = -(X // P) * pow(2 * F, -1, mod) % mod
    return out


@lru_cache(maxsize=32)
def _dlog(p: int) -> tuple[int, ...]:
    g = _generator(p)
    table = [0] * p
    x = 1
    for i in range(p - 1):
        table[x] = i
        x = x * g % p
    return tuple(table)


def _generator(p: int) -> int:
    from .padic_core import primitive_root

    return primitive_root(p)


def stickelberger_series(theta: DirichletCharacter, p: int, n: int, k: int = 16, **kw) -> IwasawaSeries:
    """T-expansion of the level-n element; coefficients are meaningful modulo p below degree p^n."""
    return stickelberger_element(theta, p, n, k, **kw).to_series()


def branch_character(psi: DirichletCharacter, p: int) -> DirichletCharacter:
    """The even character whose Kubota-Leopoldt series carries lambda_psi: omega psi^{-1} for odd psi, psi for even psi."""
    if psi.is_even():
        return psi
    return DirichletCharacter.teichmuller(p, 1) * psi.conj()


@dataclass(frozen=True)
class ClassicalInvariants:
    character: DirichletCharacter
    lam: int | None
    mu: int | None
    certified: bool
    level_used: int
    series: IwasawaSeries | None = field(default=None, repr=False)
    partner_lambda: int | None = None
    status: str = ""

    def as_dict(self) -> dict:
        return {
            "character": repr(self.character.components),
            "lambda": self.lam,
            "mu": self.mu,
            "certified": self.certified,
            "level": self.level_used,
            "partner_lambda": self.partner_lambda,
            "status": self.status,
        }


def classical_lambda(
    psi: DirichletCharacter,
    p: int,
    level: int = 3,
    k: int = 4,
    budget: int = DEFAULT_BUDGET,
    max_level: int | None = None,
    check_partner: bool = True,
) -> ClassicalInvariants:
    """lambda_psi and mu_psi from the C-branch element, raising the level until certified.

    mu = 0 is asserted for every series produced: a positive content is
    reported as an error in the software, not as a result.  When the budget
    runs out the answer is "undecided" with the lower bound p^n.
    """
    if psi.modulus % p == 0:
        raise HypothesisError(f"psi must be unramified at p = {p}")
    theta = branch_character(psi, p)
    max_level = max_level if max_level is not None else level + 2
    n = level
    while True:
        try:
            elem = stickelberger_element(theta, p, n, k, budget=budget)
        except BudgetError as exc:
            return ClassicalInvariants(psi, None, None, False, n, status=f"undecided, lambda >= {p ** (n - 1)}: {exc}")
        series = elem.to_series()
        if not any(c % p for c in series.coeffs):
            if n >= max_level:
                raise AssertionError(f"mu = 0 assertion failed for {psi.components} at level {n}")
            n += 1
            continue
        inv = elem.invariants()
        partner = None
        if check_partner:
            partner = _partner_lambda(theta, p, n, k, budget)
            if partner is not None and partner != inv.lam:
                raise AssertionError(f"duality check failed: {inv.lam} vs {partner}")
        return ClassicalInvariants(psi, inv.lam, 0, True, n, series, partner, "certified")


def _partner_lambda(theta: DirichletCharacter, p: int, n: int, k: int, budget: int) -> int | None:
    """lambda of the D-branch element, rebuilt by the direct sum and twisted by the involution."""
    theta_prime = theta * DirichletCharacter.teichmuller(p, -1)
    psi, _ = _split_tame(theta_prime, p)
    if psi.modulus * p ** (n + 1) > min(budget, 2 * 10**6):
        return None
    elem = stickelberger_element(theta, p, n, k, method="direct", budget=budget).inverse_twist().scale(pow(2, -1, p**k))
    return elem.invariants().lam


def euler_factor_group_ring(
    coeff: PadicNumber | int, ell: int, p: int, k: int, level: int
) -> GroupRingElement:
    """1 - c [gamma_ell] in the level-n group ring, [gamma_ell] = gamma^(f_ell)."""
    e = f_ell(ell, p, level + 1).residue % p**level
    c = coeff.residue if isinstance(coeff, PadicNumber) else int(coeff)
    return GroupRingElement.euler_factor([1, -c], e, p, k, level)


def nonprimitive_product(
    series: GroupRingElement,
    sigma0: Iterable[int],
    psi: DirichletCharacter,
    side: str,
    chi: DirichletCharacter | None = None,
) -> GroupRingElement:
    """Multiply in the abelian Euler factors at the primes of Sigma_0.

    C side: 1 - chi psi^{-1}(ell) [gamma_ell]; D side: 1 - chi psi(ell) ell^{-1} [gamma_ell].
    """
    p, k, level = series.p, series.k, series.level
    chi = chi or DirichletCharacter.trivial()
    out = series
    for ell in sorted(set(sigma0)):
        if ell == p:
            raise InputError("p cannot lie in Sigma_0")
        if side == "C":
            c = (chi * psi.conj()).padic_value(ell, p, k)
        elif side == "D":
            c = (chi * psi).padic_value(ell, p, k) * pow(ell, -1, p**k)
        else:
            raise InputError("side must be 'C' or 'D'")
        out = out * euler_factor_group_ring(c, ell, p, k, level)
    return out


def eisenstein_element(
    psi: DirichletCharacter, p: int, n: int, sigma0: Iterable[int], k: int = 4, budget: int = DEFAULT_BUDGET
) -> tuple[GroupRingElement, GroupRingElement, GroupRingElement]:
    """(L^Sigma0(C), L^Sigma0(D), their product L(G)) at level n, trivial chi, odd psi unramified at p."""
    if psi.is_even():
        raise HypothesisError("psi must be odd and unramified at p")
    if psi.modulus % p == 0:
        raise HypothesisError("psi must be odd and unramified at p")
    theta = branch_character(psi, p)
    G = stickelberger_element(theta, p, n, k, budget=budget)
    C = nonprimitive_product(G, sigma0, psi, "C")
    D = nonprimitive_product(G.inverse_twist().scale(pow(2, -1, p**k)), sigma0, psi, "D")
    return C, D, C * D
