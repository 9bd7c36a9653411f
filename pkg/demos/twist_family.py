"""Twists J_{-c} of the conductor-11 curve 11a3 at p = 5.

For each c, lambda is computed twice: from the Kubota-Leopoldt element of
psi = chi_{-c} together with the local term at 11, and from the Mazur-Tate
element of the twist.  The last line redoes the large discriminant case on
the character side only.

    python demos/twist_family.py
"""

from __future__ import annotations

import time

from iwlambda.characters import DirichletCharacter
from iwlambda.cli import twist_curve
from iwlambda.elliptic import load_catalog
from iwlambda.kubota_leopoldt import classical_lambda
from iwlambda.local_factors import s_ell, t_ell
from iwlambda.modular_symbols import analytic_invariants
from iwlambda.transfer import reducible_lambda, screen_irreducible

p = 5
base = load_catalog()["11a3"]

for c in (3, 7, 2):
    J, psi = twist_curve(c, base)
    scr = screen_irreducible(J, p)
    alg = reducible_lambda(J, scr.phi, scr.psi, p)
    an = analytic_invariants(J, p, level=2)
    splits = "split" if psi.real_value(11) == 1 else "inert"
    print(
        f"c = {c}: N = {J.conductor}, 11 {splits}, lambda_psi = {alg.extras['lambda_psi']}, "
        f"eps = {alg.extras['epsilon_psi']}, lambda_alg = {alg.lambda_out}, lambda_anal = {an.primitive.lam}"
    )

c = 3624233
J, psi = twist_curve(c, base)
start = time.perf_counter()
res = classical_lambda(psi, p, level=2)
print(f"c = {c}: lambda_psi = {res.lam} ({res.status}, level {res.level_used}, {time.perf_counter() - start:.2f}s)")
if res.lam is not None:
    omega = DirichletCharacter.teichmuller(p, 1)
    eps = t_ell(J, omega * psi, psi, 11, p).t * s_ell(11, p)
    print(f"  eps = {eps}, lambda = 2 * lambda_psi + eps = {2 * res.lam + eps}")
