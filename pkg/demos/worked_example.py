"""Lambda of E2 from the unit series of E1, then checked against modular symbols.

    python demos/worked_example.py
"""

from __future__ import annotations

from iwlambda.elliptic import CurveQ, is_ordinary
from iwlambda.modular_symbols import analytic_invariants, verify_congruence_pair
from iwlambda.transfer import equivalence_audit, screen_congruence, transfer_lambda

p = 5
sigma0 = (2, 7, 13)
E1 = CurveQ.from_ainvs([0, 0, 0, 1, -10], label="E1", conductor=52)
E2 = CurveQ.from_ainvs([0, 0, 0, -584, 5444], label="E2", conductor=364)

# The two mod-5 representations agree: compare traces up to the Sturm bound.
evidence = screen_congruence(E1, E2, p, 700)
print("congruence screen:", evidence.status, "up to", evidence.bound, "(Sturm bound", evidence.sturm_bound, ")")

# E1 at 5: ordinary, and the Mazur-Tate element is a unit.
ordinary, alpha = is_ordinary(E1, p)
an1 = analytic_invariants(E1, p, sigma0)
print("E1: alpha_5 mod 5 =", alpha.residue % p, " L/Omega =", an1.lvalue, " lambda =", an1.primitive.lam, " mu =", an1.primitive.mu)
print("E1 with Sigma_0 removed: lambda =", an1.nonprimitive.lam)

# Transfer the invariant to E2 through the local factors at 2, 7 and 13.
report = transfer_lambda(E1, an1.primitive.lam, E2, p, sigma0)
for row in report.table:
    print(f"  ell = {row['ell']:>2}: sigma(E1) = {row['sigma_E1']}, sigma(E2) = {row['sigma_E2']}")
print("lambda(E2) from the transfer:", report.lambda_out)
for entry, status in report.ledger:
    print(f"  [{status}] {entry}")

# Independent check with modular symbols at level 364.
an2 = analytic_invariants(E2, p, sigma0)
audit = equivalence_audit(report, an2)
print("analytic lambda(E2):", an2.primitive.lam, " audit agrees:", audit.agree)

witness = verify_congruence_pair(E1, E2, p, sigma0, n=2)
print("stripped Mazur-Tate elements congruent mod 5:", witness.holds, "with unit", witness.unit)
