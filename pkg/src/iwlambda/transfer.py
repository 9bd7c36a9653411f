"""Hypothesis screening and lambda bookkeeping across congruent curves.

Two modes are covered.  In the irreducible mode E1[p] and E2[p] are
isomorphic irreducible Galois modules; the non-primitive invariants agree,
so lambda(E2) = lambda(E1) + sum over Sigma_0 of (sigma_E1 - sigma_E2).
In the reducible mode E[p] has composition factors phi and psi with
phi psi = omega, psi odd and unramified at p; then
lambda(E) = 2 lambda_psi + sum over Sigma_0 of s_ell t_ell(E).

Every conclusion carries a ledger of the hypotheses it used, each marked
"verified" (checked by this package) or "asserted" (taken from the caller or
from cited theory).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import gcd
from typing import Iterable

import sympy
from sympy.ntheory import factorint

from .characters import DirichletCharacter, is_fundamental_discriminant
from .elliptic import ADDITIVE, CurveQ, classify_reduction, is_ordinary, minimal_model, primes_up_to, trace
from .errors import HypothesisError, InputError
from .kubota_leopoldt import classical_lambda
from .local_factors import sigma as sigma_record
from .local_factors import t_ell
from .padic_core import Precision

SCHEMA_VERSION = 1
VERIFIED = "verified"
ASSERTED = "asserted"
REDUCIBLE_CASE_PRIMES = (3, 5, 7, 13, 37)


# ---------------------------------------------------------------------------
# Congruence screening


def sturm_bound(M: int) -> int:
    """Weight-two Sturm bound: floor of the index of Gamma_0(M) divided by 6."""
    index = Fraction(M)
    for q in factorint(M):
        index *= Fraction(q + 1, q)
    return int(index) // 6


@dataclass(frozen=True)
class CongruenceEvidence:
    curve1: str
    curve2: str
    p: int
    bound: int
    residues: dict[int, tuple[int, int]]
    sturm_bound: int
    status: str
    failures: tuple[int, ...] = ()

    def as_dict(self) -> dict:
        return {
            "curves": [self.curve1, self.curve2],
            "p": self.p,
            "bound": self.bound,
            "sturm_bound": self.sturm_bound,
            "status": self.status,
            "failures": list(self.failures),
            "checked_primes": len(self.residues),
        }


def _require_conductor(E: CurveQ) -> int:
    if E.conductor is None:
        raise InputError(f"conductor of {E.name()} is unknown; supply it (conductor computation is not implemented)")
    return E.conductor


def pair_sturm_bound(E1: CurveQ, E2: CurveQ, p: int) -> int:
    """Sturm bound at level lcm(N1, N2) p."""
    N1, N2 = _require_conductor(E1), _require_conductor(E2)
    M = N1 * N2 // gcd(N1, N2)
    if M % p:
        M *= p
    return sturm_bound(M)


def screen_congruence(E1: CurveQ, E2: CurveQ, p: int, bound: int) -> CongruenceEvidence:
    """a_ell(E1) = a_ell(E2) mod p for ell <= bound prime to p N1 N2, plus the a_p (unit root) congruence."""
    M1, M2 = minimal_model(E1), minimal_model(E2)
    for E in (M1, M2):
        ordinary, _ = is_ordinary(E, p)
        if not ordinary:
            raise HypothesisError(f"{E.name()} is supersingular at p = {p}; ordinary reduction required")
    N1, N2 = _require_conductor(E1), _require_conductor(E2)
    residues: dict[int, tuple[int, int]] = {}
    failures = []
    for ell in primes_up_to(bound):
        if ell != p and (N1 * N2) % ell == 0:
            continue
        r = (trace(M1, ell) % p, trace(M2, ell) % p)
        residues[ell] = r
        if r[0] != r[1]:
            failures.append(ell)
    sb = pair_sturm_bound(E1, E2, p)
    if failures:
        status = "failed"
    elif bound >= sb:
        status = "verified_to_sturm"
    else:
        status = "heuristic"
    return CongruenceEvidence(E1.name(), E2.name(), p, bound, residues, sb, status, tuple(failures))


# ---------------------------------------------------------------------------
# Irreducibility screening


def division_polynomial(E: CurveQ, n: int) -> sympy.Poly:
    """f_n(x): psi_n for odd n, psi_n / psi_2 for even n, in Z[x]."""
    x = sympy.Symbol("x")
    b2, b4, b6, b8 = E.b2, E.b4, E.b6, E.b8
    B = sympy.Poly(4 * x**3 + b2 * x**2 + 2 * b4 * x + b6, x)
    f: dict[int, sympy.Poly] = {
        0: sympy.Poly(0, x),
        1: sympy.Poly(1, x),
        2: sympy.Poly(1, x),
        3: sympy.Poly(3 * x**4 + b2 * x**3 + 3 * b4 * x**2 + 3 * b6 * x + b8, x),
        4: sympy.Poly(
            2 * x**6 + b2 * x**5 + 5 * b4 * x**4 + 10 * b6 * x**3 + 10 * b8 * x**2
            + (b2 * b8 - b4 * b6) * x + (b4 * b8 - b6**2),
            x,
        ),
    }

    def get(m: int) -> sympy.Poly:
        if m in f:
            return f[m]
        h = m // 2
        if m % 2:
            if h % 2 == 0:
                val = B**2 * get(h + 2) * get(h) ** 3 - get(h - 1) * get(h + 1) ** 3
            else:
                val = get(h + 2) * get(h) ** 3 - B**2 * get(h - 1) * get(h + 1) ** 3
        else:
            val = get(h) * (get(h + 2) * get(h - 1) ** 2 - get(h - 2) * get(h + 1) ** 2)
        f[m] = val
        return val

    return get(n)


def _subset_sums(degrees: list[int], target: int) -> bool:
    reachable = {0}
    for d in degrees:
        reachable |= {r + d for r in reachable if r + d <= target}
    return target in reachable


@dataclass(frozen=True)
class IrreducibilityScreen:
    status: str  # likely_irreducible | reducible | undecided
    phi: DirichletCharacter | None = None
    psi: DirichletCharacter | None = None
    witness_prime: int | None = None
    detail: str = ""

    def as_dict(self) -> dict:
        return {
            "status": self.status,
            "phi": None if self.phi is None else repr(self.phi.components),
            "psi": None if self.psi is None else repr(self.psi.components),
            "witness_prime": self.witness_prime,
            "detail": self.detail,
        }


def _candidate_psis(E: CurveQ, p: int) -> list[DirichletCharacter]:
    primes = sorted(set(minimal_model(E).bad_primes()) - {p})
    discs = {1}
    for r in range(1, len(primes) + 1):
        for combo in combinations(primes, r):
            base = 1
            for q in combo:
                base *= q
            for D in (base, -base, 4 * base, -4 * base, 8 * base, -8 * base, 4, -4, 8, -8):
                if is_fundamental_discriminant(D):
                    discs.add(D)
    for D in (-4, 8, -8):
        discs.add(D)
    out = []
    for D in sorted(discs, key=lambda d: (abs(d), d)):
        chi = DirichletCharacter.trivial() if D == 1 else DirichletCharacter.kronecker(D)
        for i in range(p - 1):
            out.append(chi * DirichletCharacter.teichmuller(p, i))
    return out


def _frobenius_match(E: CurveQ, phi: DirichletCharacter, psi: DirichletCharacter, p: int, ells: list[int]) -> bool:
    for ell in ells:
        s = phi.padic_value(ell, p, 1).residue + psi.padic_value(ell, p, 1).residue
        if (trace(E, ell) - s) % p:
            return False
    return True


def screen_irreducible(E: CurveQ, p: int, aux_bound: int = 60, frob_bound: int = 200) -> IrreducibilityScreen:
    """Division-polynomial factorization patterns, then a character search for reducible candidates.

    A rational p-isogeny gives a rational factor of degree (p-1)/2 of the
    p-division polynomial, so a good prime ell whose factor degrees admit no
    subset summing to (p-1)/2 rules it out.  Otherwise the search looks for
    (phi, psi) with phi psi = omega and a_ell = phi(ell) + psi(ell) mod p.
    """
    Em = minimal_model(E)
    fp = division_polynomial(Em, p)
    bad = set(Em.bad_primes()) | {p}
    half = (p - 1) // 2
    for ell in primes_up_to(aux_bound):
        if ell in bad or ell == 2:
            continue
        red = sympy.Poly(fp.as_expr(), fp.gens[0], modulus=ell)
        if red.degree() != fp.degree():
            continue
        degrees = []
        for fac, mult in red.factor_list()[1]:
            degrees.extend([fac.degree()] * mult)
        if not _subset_sums(degrees, half):
            return IrreducibilityScreen(
                "likely_irreducible", witness_prime=ell, detail=f"no factor of degree {half} modulo {ell}"
            )
    N = E.conductor or 1
    ells = [ell for ell in primes_up_to(frob_bound) if ell not in bad and N % ell]
    omega = DirichletCharacter.teichmuller(p, 1)
    for psi in _candidate_psis(E, p):
        phi = omega * psi.conj()
        if _frobenius_match(Em, phi, psi, p, ells):
            return IrreducibilityScreen("reducible", phi, psi, detail=f"a_ell = phi(ell) + psi(ell) mod {p} for {len(ells)} primes")
    return IrreducibilityScreen("undecided", detail="factor patterns allow an isogeny but no (phi, psi) pair was found")


# ---------------------------------------------------------------------------
# Reports


@dataclass
class TransferReport:
    mode: str
    inputs: dict
    sigma0: tuple[int, ...]
    table: list[dict]
    lambda_in: int | None
    lambda_out: int
    mu: dict
    ledger: list[tuple[str, str]] = field(default_factory=list)
    analytic: dict | None = None
    extras: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "mode": self.mode,
            "inputs": self.inputs,
            "sigma0": list(self.sigma0),
            "table": self.table,
            "lambda_in": self.lambda_in,
            "lambda_out": self.lambda_out,
            "mu": self.mu,
            "ledger": [{"entry": e, "status": s} for e, s in self.ledger],
            "analytic": self.analytic,
            "extras": self.extras,
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), sort_keys=True, indent=2)


def default_sigma0(*curves: CurveQ, p: int, extra: Iterable[int] = ()) -> tuple[int, ...]:
    primes = set(extra)
    for E in curves:
        primes |= set(factorint(_require_conductor(E)))
    primes.discard(p)
    return tuple(sorted(primes))


def sigma_table(E: CurveQ, p: int, sigma0: Iterable[int], precision: Precision | None = None) -> list[dict]:
    precision = precision or Precision(padic_digits=8, series_degree=64)
    return [sigma_record(E, ell, p, precision).as_dict() for ell in sorted(sigma0)]


def transfer_lambda(
    E1: CurveQ,
    lambda1: int,
    E2: CurveQ,
    p: int,
    sigma0: Iterable[int] | None = None,
    mu1: str = ASSERTED,
    evidence: CongruenceEvidence | None = None,
    assert_irreducible: bool = False,
    screen_bound: int | None = None,
    precision: Precision | None = None,
) -> TransferReport:
    """lambda(E2) = lambda(E1) + sum (sigma_E1 - sigma_E2) under E1[p] = E2[p] irreducible and mu(E1) = 0.

    ``mu1`` records how mu(E1) = 0 is known: "verified" when established
    analytically by the caller, "asserted" otherwise.
    """
    if p == 2:
        raise HypothesisError("p = 2 is excluded: p must be an odd prime")
    if lambda1 < 0:
        raise InputError("lambda(E1) must be nonnegative")
    ledger: list[tuple[str, str]] = []
    missing: list[str] = []
    for E in (E1, E2):
        loc = classify_reduction(minimal_model(E), p)
        if loc.reduction_type == ADDITIVE:
            raise HypothesisError(f"{E.name()} has additive reduction at p = {p}; ordinary reduction required")
    if evidence is None:
        evidence = screen_congruence(E1, E2, p, screen_bound or pair_sturm_bound(E1, E2, p))
    if evidence.status == "failed":
        raise HypothesisError(
            f"E1[p] = E2[p] fails: a_ell differ mod {p} at {list(evidence.failures)}"
        )
    ledger.append(
        (
            f"E1[{p}] = E2[{p}] evidenced by a_ell congruence up to {evidence.bound} (Sturm bound {evidence.sturm_bound})",
            VERIFIED if evidence.status == "verified_to_sturm" else ASSERTED,
        )
    )
    for E in (E1, E2):
        scr = screen_irreducible(E, p)
        if scr.status == "reducible":
            raise HypothesisError(f"{E.name()}[{p}] is reducible; the irreducible transfer needs an irreducible E[p]")
        if scr.status == "likely_irreducible":
            ledger.append((f"{E.name()}[{p}] irreducible: {scr.detail}", VERIFIED))
        elif assert_irreducible:
            ledger.append((f"{E.name()}[{p}] irreducible", ASSERTED))
        else:
            missing.append(f"irreducibility of {E.name()}[{p}] (pass assert_irreducible)")
    if mu1 not in (VERIFIED, ASSERTED):
        missing.append("mu(E1) = 0")
    else:
        ledger.append(("mu(E1) = 0", mu1))
    if missing:
        raise HypothesisError("missing hypotheses: " + "; ".join(missing))
    sigma0 = tuple(sorted(set(sigma0))) if sigma0 is not None else default_sigma0(E1, E2, p=p)
    t1 = sigma_table(E1, p, sigma0, precision)
    t2 = sigma_table(E2, p, sigma0, precision)
    s1 = sum(r["sigma"] for r in t1)
    s2 = sum(r["sigma"] for r in t2)
    lam_sigma0 = lambda1 + s1
    lambda2 = lam_sigma0 - s2
    if lambda2 < 0:
        raise HypothesisError(f"negative lambda {lambda2}: inputs are inconsistent (ledger: {ledger})")
    ledger.append((f"sigma tables computed for Sigma_0 = {list(sigma0)}", VERIFIED))
    ledger.append(("lambda_Sigma0(E1) = lambda_Sigma0(E2) from the isomorphism of E[p]", ASSERTED))
    table = [
        {"ell": a["ell"], "sigma_E1": a["sigma"], "sigma_E2": b["sigma"], "s": a["s"], "d_E1": a["d"], "d_E2": b["d"]}
        for a, b in zip(t1, t2)
    ]
    return TransferReport(
        "irreducible_pair",
        {"E1": E1.name(), "E2": E2.name(), "p": p, "lambda_E1": lambda1},
        sigma0,
        table,
        lambda1,
        lambda2,
        {"E1": 0, "E2": 0, "E2_basis": "mu(E1) = 0 transported through E1[p] = E2[p]"},
        ledger,
        extras={"lambda_sigma0": lam_sigma0, "sigma_E1": s1, "sigma_E2": s2, "evidence": evidence.as_dict()},
    )


def reducible_lambda(
    E: CurveQ,
    phi: DirichletCharacter,
    psi: DirichletCharacter,
    p: int,
    sigma0: Iterable[int] | None = None,
    kl_level: int = 2,
    kl_budget: int | None = None,
) -> TransferReport:
    """lambda(E) = 2 lambda_psi + sum over Sigma_0 of s_ell t_ell(E)."""
    if p not in REDUCIBLE_CASE_PRIMES:
        raise HypothesisError(f"p = {p} is outside the list {REDUCIBLE_CASE_PRIMES} for the reducible case")
    if phi * psi != DirichletCharacter.teichmuller(p, 1):
        raise HypothesisError("phi * psi must equal omega")
    ledger: list[tuple[str, str]] = [("phi * psi = omega", VERIFIED)]
    if psi.is_even() or psi.modulus % p == 0:
        if not phi.is_even() and phi.modulus % p:
            phi, psi = psi, phi
            ledger.append(("roles of phi and psi swapped so that psi is odd and unramified at p", VERIFIED))
        else:
            raise HypothesisError("need psi odd and unramified at p (equivalently phi even and ramified at p)")
    ledger.append(("psi odd and unramified at p", VERIFIED))
    N = _require_conductor(E)
    sigma0 = (
        tuple(sorted(set(sigma0)))
        if sigma0 is not None
        else tuple(sorted((set(factorint(N)) | set(psi.ramified_primes())) - {p}))
    )
    kw = {} if kl_budget is None else {"budget": kl_budget}
    kl = classical_lambda(psi, p, level=kl_level, **kw)
    if kl.lam is None:
        raise HypothesisError(f"lambda_psi is {kl.status}")
    ledger.append((f"lambda_psi = {kl.lam} from the Kubota-Leopoldt element at level {kl.level_used}", VERIFIED))
    ledger.append(("mu_psi = 0 (Ferrero-Washington), checked on the computed series", VERIFIED))
    rows = []
    total = 0
    flagged = False
    for ell in sigma0:
        rec = t_ell(E, phi, psi, ell, p)
        rows.append(rec.as_dict())
        total += rec.s * rec.t
        flagged |= rec.flagged
    if flagged:
        ledger.append(("torsion corank at a double eigenvalue 1 taken as the mod-p multiplicity", ASSERTED))
    lam = 2 * kl.lam + total
    extras = {"lambda_psi": kl.lam, "sum_s_t": total}
    if N % 11 == 0 and 11 in sigma0:
        row = next(r for r in rows if r["ell"] == 11)
        extras["epsilon_psi"] = row["t"]
    return TransferReport(
        "reducible_single",
        {"E": E.name(), "p": p, "phi": repr(phi.components), "psi": repr(psi.components)},
        sigma0,
        rows,
        None,
        lam,
        {"E": 0, "basis": "mu(E) = 0 in the reducible case with psi odd and unramified at p"},
        ledger,
        extras=extras,
    )


@dataclass(frozen=True)
class AuditResult:
    agree: bool
    lambda_alg: int
    lambda_anal: int
    lambda_alg_sigma0: int | None
    lambda_anal_sigma0: int | None
    detail: str = ""

    def as_dict(self) -> dict:
        return {
            "agree": self.agree,
            "lambda_alg": self.lambda_alg,
            "lambda_anal": self.lambda_anal,
            "lambda_alg_sigma0": self.lambda_alg_sigma0,
            "lambda_anal_sigma0": self.lambda_anal_sigma0,
            "detail": self.detail,
        }


def equivalence_audit(report: TransferReport, analytic) -> AuditResult:
    """Compare algebraic and analytic invariants, both primitive and with Sigma_0 removed.

    A mismatch is reported as a falsification candidate; nothing is corrected.
    """
    lam_alg = report.lambda_out
    lam_an = analytic.primitive.lam
    sig = sum(r.get("sigma_E2", r.get("sigma", 0)) for r in report.table) if report.mode == "irreducible_pair" else None
    alg_s0 = lam_alg + sig if sig is not None else None
    an_s0 = analytic.nonprimitive.lam if analytic.nonprimitive is not None else None
    problems = []
    if lam_alg != lam_an:
        problems.append(f"lambda: algebraic {lam_alg} vs analytic {lam_an}")
    if alg_s0 is not None and an_s0 is not None and tuple(analytic.sigma0) == tuple(report.sigma0) and alg_s0 != an_s0:
        problems.append(f"lambda with Sigma_0 removed: algebraic {alg_s0} vs analytic {an_s0}")
    if analytic.primitive.mu != report.mu.get("E2", report.mu.get("E", 0)):
        problems.append("mu disagrees")
    detail = "; ".join(problems) if problems else ""
    if problems:
        detail = "falsification candidate: " + detail
    return AuditResult(not problems, lam_alg, lam_an, alg_s0, an_s0, detail)
