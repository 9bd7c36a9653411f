"""Command-line interface: ``iwlambda <command> [options]``.

Exit codes: 0 success, 2 hypothesis refusal, 3 uncertified result,
4 input error.  Reports go to stdout as JSON (sorted keys), TSV or text.
"""

from __future__ import annotations

import argparse
import dataclasses
import fcntl
import hashlib
import json
import os
import sys
import tempfile
from contextlib import contextmanager
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, Sequence

from sympy.ntheory import factorint

from .characters import DirichletCharacter, fundamental_discriminant
from .elliptic import ADDITIVE, CurveQ, classify_reduction, is_ordinary, load_catalog, minimal_model, quadratic_twist
from .errors import HypothesisError, InputError, IwlambdaError, UncertifiedError
from .kubota_leopoldt import DEFAULT_BUDGET, classical_lambda
from .padic_core import Precision

SCHEMA_VERSION = 1
EXIT_OK, EXIT_HYPOTHESIS, EXIT_UNCERTIFIED, EXIT_INPUT = 0, 2, 3, 4
FORMATS = ("json", "tsv", "text")


@dataclass(frozen=True)
class RunConfig:
    p: int = 5
    k: int = 6
    n: int = 64
    point_bound: int = 10**6
    level: int = 2
    sigma0: tuple[int, ...] | None = None
    cache_dir: str | None = None
    fmt: str = "json"
    catalog: str | None = None
    assert_irreducible: bool = False
    assert_mu_zero: bool = False

    def __post_init__(self) -> None:
        if self.p < 2 or len(factorint(self.p)) != 1 or sum(factorint(self.p).values()) != 1:
            raise InputError(f"p = {self.p} is not prime")
        if self.p == 2:
            raise HypothesisError("p = 2 is excluded: p must be an odd prime")
        if self.k < 1 or self.n < 1:
            raise InputError("precision must be positive")
        if not 1 <= self.level <= 4:
            raise InputError("level must be between 1 and 4")
        if self.fmt not in FORMATS:
            raise InputError(f"format must be one of {FORMATS}")
        if self.sigma0 is not None and self.p in self.sigma0:
            raise InputError("Sigma_0 may not contain p")

    @property
    def precision(self) -> Precision:
        return Precision(padic_digits=self.k, series_degree=self.n)


# ---------------------------------------------------------------------------
# Curves, catalog and cache


def resolve_curve(text: str, cfg: RunConfig, conductor: int | None = None) -> CurveQ:
    """Label or a-invariants; the conductor annotation comes from the flag or a catalog entry with the same model."""
    catalog = load_catalog(cfg.catalog)
    E = CurveQ.parse(text, catalog)
    if conductor is not None:
        return dataclasses.replace(E, conductor=conductor)
    if E.conductor is None:
        for entry in catalog.values():
            if entry == E or minimal_model(entry) == minimal_model(E):
                return dataclasses.replace(E, conductor=entry.conductor, label=entry.label)
    return E


@contextmanager
def _locked(cache_dir: Path) -> Iterator[None]:
    cache_dir.mkdir(parents=True, exist_ok=True)
    with open(cache_dir / ".lock", "w") as fh:
        fcntl.flock(fh, fcntl.LOCK_EX)
        try:
            yield
        finally:
            fcntl.flock(fh, fcntl.LOCK_UN)


def _atomic_write(path: Path, text: str) -> None:
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    with os.fdopen(fd, "w") as fh:
        fh.write(text)
    os.replace(tmp, path)


def _cache_key(E: CurveQ) -> str:
    from .modular_symbols import target_eigenvalues

    eig = target_eigenvalues(E, E.conductor)
    digest = hashlib.sha256(repr(sorted(eig.items())).encode()).hexdigest()[:16]
    return f"msym_{E.conductor}_{digest}"


def load_symbols(E: CurveQ, cfg: RunConfig, log: list[str] | None = None):
    """Plus/minus eigen-symbols, through the cache directory when one is configured."""
    from .modular_symbols import EigenSymbol, modular_symbols_for

    if E.conductor is None:
        raise InputError(f"conductor of {E.name()} is unknown; pass --conductor")
    if not cfg.cache_dir:
        return modular_symbols_for(E)
    cache = Path(cfg.cache_dir)
    key = _cache_key(E)
    with _locked(cache):
        found = []
        for sign in ("plus", "minus"):
            path = cache / f"{key}_{sign}.txt"
            if path.exists():
                try:
                    found.append(EigenSymbol.from_text(path.read_text()))
                except (InputError, ValueError) as exc:
                    if log is not None:
                        log.append(f"cache entry {path.name} rejected ({exc}); recomputed")
        if len(found) == 2:
            for sym in found:
                from .modular_symbols import P1List

                sym.p1 = sym.p1 or P1List(sym.N)
            return tuple(found)
        plus, minus = modular_symbols_for(E)
        _atomic_write(cache / f"{key}_plus.txt", plus.to_text())
        _atomic_write(cache / f"{key}_minus.txt", minus.to_text())
        return plus, minus


# ---------------------------------------------------------------------------
# Commands


def _check_p(E: CurveQ, p: int) -> None:
    loc = classify_reduction(minimal_model(E), p)
    if loc.reduction_type == ADDITIVE:
        raise HypothesisError(f"{E.name()} has additive reduction at p = {p}; ordinary reduction is required")
    ordinary, _ = is_ordinary(minimal_model(E), p)
    if not ordinary:
        raise HypothesisError(f"{E.name()} is supersingular at p = {p}; ordinary reduction is required")


def cmd_invariants(args: argparse.Namespace, cfg: RunConfig) -> dict:
    from .local_factors import sigma

    E = resolve_curve(args.curve, cfg, args.conductor)
    _check_p(E, cfg.p)
    ells = set(q for q in minimal_model(E).bad_primes() if q != cfg.p)
    ells |= set(args.ell or [])
    if cfg.sigma0 is not None:
        ells |= set(cfg.sigma0)
    ells.discard(cfg.p)
    rows = [sigma(E, ell, cfg.p, cfg.precision).as_dict() for ell in sorted(ells)]
    out = {"curve": E.name(), "ainvs": list(E.ainvs), "p": cfg.p, "sigma": rows, "sigma_total": sum(r["sigma"] for r in rows)}
    if args.analytic:
        from .modular_symbols import analytic_invariants

        sigma0 = cfg.sigma0 if cfg.sigma0 is not None else tuple(sorted(ells))
        rep = analytic_invariants(E, cfg.p, sigma0, level=cfg.level, k=cfg.k, symbols=load_symbols(E, cfg))
        out["analytic"] = rep.as_dict()
    return out


def cmd_transfer(args: argparse.Namespace, cfg: RunConfig) -> dict:
    from .transfer import ASSERTED, VERIFIED, equivalence_audit, screen_congruence, pair_sturm_bound, transfer_lambda

    E1 = resolve_curve(args.curve1, cfg, args.conductor1)
    E2 = resolve_curve(args.curve2, cfg, args.conductor2)
    evidence = screen_congruence(E1, E2, cfg.p, args.bound or pair_sturm_bound(E1, E2, cfg.p))
    if evidence.status == "failed":
        raise HypothesisError(
            "E1[p] = E2[p] is refuted by the a_ell congruence screen; evidence: " + json.dumps(evidence.as_dict(), sort_keys=True)
        )
    analytic1 = None
    if args.lambda1 is None:
        from .modular_symbols import analytic_invariants

        analytic1 = analytic_invariants(E1, cfg.p, (), level=cfg.level, k=cfg.k, symbols=load_symbols(E1, cfg))
        lam1, mu_status = analytic1.primitive.lam, VERIFIED
        if analytic1.primitive.mu != 0:
            raise HypothesisError("mu(E1) = 0 is required and the analytic mu is positive")
    else:
        lam1 = args.lambda1
        if not cfg.assert_mu_zero:
            raise HypothesisError("mu(E1) = 0 is required: pass --assert-mu-zero or omit --lambda1 to compute it")
        mu_status = ASSERTED
    report = transfer_lambda(
        E1, lam1, E2, cfg.p, cfg.sigma0, mu1=mu_status, evidence=evidence,
        assert_irreducible=cfg.assert_irreducible, precision=cfg.precision,
    )
    if analytic1 is not None:
        report.ledger.append(("mu(E1) = 0 algebraically: analytic unit series and Kato's divisibility", ASSERTED))
    out = report.as_dict()
    if args.audit:
        from .modular_symbols import analytic_invariants

        an = analytic_invariants(E2, cfg.p, report.sigma0, level=cfg.level, k=cfg.k, symbols=load_symbols(E2, cfg))
        out["analytic"] = an.as_dict()
        out["audit"] = equivalence_audit(report, an).as_dict()
    return out


def twist_curve(c: int, base: CurveQ) -> tuple[CurveQ, DirichletCharacter]:
    """J_{-c} for the conductor-11 base curve, with its conductor annotation and psi = chi_{-c}."""
    if c <= 0:
        raise InputError("c must be a positive integer")
    sq = 1
    for q, e in factorint(c).items():
        sq *= q ** (e % 2)
    D = fundamental_discriminant(-sq)
    E = quadratic_twist(base, -sq)
    N = 11 * D * D if D % 11 else D * D
    return dataclasses.replace(E, conductor=N, label=f"{base.name()}_twist({-c})"), DirichletCharacter.kronecker(D)


def cmd_twist_family(args: argparse.Namespace, cfg: RunConfig) -> dict:
    from .transfer import reducible_lambda, screen_irreducible

    p = cfg.p
    base = resolve_curve(args.base, cfg)
    E, psi = twist_curve(args.c, base)
    if psi.modulus % p == 0:
        raise HypothesisError(f"psi(p) = 0: {p} ramifies in Q(sqrt(-{args.c})); the twist family needs psi(p) != 0")
    scr = screen_irreducible(E, p)
    if scr.status != "reducible":
        raise HypothesisError(f"E[{p}] is not reducible with a (phi, psi) pair: {scr.detail}")
    report = reducible_lambda(E, scr.phi, scr.psi, p, cfg.sigma0, kl_level=cfg.level, kl_budget=args.budget)
    out = {
        "schema_version": SCHEMA_VERSION,
        "c": args.c,
        "curve": E.name(),
        "ainvs": list(E.ainvs),
        "conductor": E.conductor,
        "psi": repr(psi.components),
        "algebraic": report.as_dict(),
        "lambda_alg": report.lambda_out,
        "lambda_psi": report.extras["lambda_psi"],
        "epsilon_psi": report.extras.get("epsilon_psi"),
    }
    if args.analytic:
        from .modular_symbols import DEFAULT_LEVEL_BUDGET, analytic_invariants

        if E.conductor > DEFAULT_LEVEL_BUDGET:
            out["analytic"] = {"status": f"skipped: level {E.conductor} exceeds the modular-symbol budget {DEFAULT_LEVEL_BUDGET}"}
        else:
            try:
                an = analytic_invariants(E, p, report.sigma0, level=cfg.level, k=cfg.k, symbols=load_symbols(E, cfg))
                out["analytic"] = an.as_dict()
                out["lambda_anal"] = an.primitive.lam
                out["agree"] = an.primitive.lam == report.lambda_out
            except HypothesisError as exc:
                out["analytic"] = {"status": f"skipped: {exc}"}
    return out


def cmd_kl(args: argparse.Namespace, cfg: RunConfig) -> dict:
    chi = DirichletCharacter.parse(args.char)
    res = classical_lambda(chi, cfg.p, level=cfg.level, k=cfg.k, budget=args.budget)
    out = res.as_dict()
    out["p"] = cfg.p
    if res.lam is None:
        out["exit"] = "uncertified"
    return out


def cmd_congruence(args: argparse.Namespace, cfg: RunConfig) -> dict:
    from .modular_symbols import verify_congruence_eisenstein, verify_congruence_pair
    from .transfer import default_sigma0, screen_irreducible

    if args.mode == "pair":
        if not args.curve2:
            raise InputError("pair mode needs --curve2")
        E1 = resolve_curve(args.curve, cfg, args.conductor)
        E2 = resolve_curve(args.curve2, cfg)
        sigma0 = cfg.sigma0 if cfg.sigma0 is not None else default_sigma0(E1, E2, p=cfg.p)
        w = verify_congruence_pair(E1, E2, cfg.p, sigma0, n=cfg.level, k=cfg.k)
    else:
        E = resolve_curve(args.curve, cfg, args.conductor)
        if args.psi:
            psi = DirichletCharacter.parse(args.psi)
        else:
            scr = screen_irreducible(E, cfg.p)
            if scr.status != "reducible":
                raise HypothesisError(f"E[{cfg.p}] is not reducible: {scr.detail}")
            psi = scr.psi if not scr.psi.is_even() else scr.phi
        sigma0 = cfg.sigma0 if cfg.sigma0 is not None else default_sigma0(E, p=cfg.p, extra=psi.ramified_primes())
        w = verify_congruence_eisenstein(E, psi, cfg.p, sigma0, n=cfg.level, k=cfg.k)
    out = w.as_dict()
    out.update({"mode": args.mode, "p": cfg.p, "sigma0": list(sigma0), "schema_version": SCHEMA_VERSION})
    return out


def cmd_msym_cache(args: argparse.Namespace, cfg: RunConfig) -> dict:
    from .modular_symbols import lvalue_ratio

    if not cfg.cache_dir:
        raise InputError("msym-cache needs --cache-dir")
    E = resolve_curve(args.curve, cfg, args.conductor)
    log: list[str] = []
    plus, minus = load_symbols(E, cfg, log)
    return {
        "curve": E.name(),
        "conductor": E.conductor,
        "key": _cache_key(E),
        "L(E,1)/Omega": str(lvalue_ratio(plus)),
        "log": log,
    }


# ---------------------------------------------------------------------------
# Output and entry point


def _flatten(prefix: str, obj, rows: list[tuple[str, str]]) -> None:
    if isinstance(obj, dict):
        for key in sorted(obj):
            _flatten(f"{prefix}.{key}" if prefix else str(key), obj[key], rows)
    elif isinstance(obj, list) and obj and isinstance(obj[0], dict):
        for i, item in enumerate(obj):
            _flatten(f"{prefix}[{i}]", item, rows)
    else:
        rows.append((prefix, json.dumps(obj) if isinstance(obj, (list, bool)) or obj is None else str(obj)))


def render(report: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(report, sort_keys=True, indent=2)
    rows: list[tuple[str, str]] = []
    _flatten("", report, rows)
    if fmt == "tsv":
        return "\n".join(f"{k}\t{v}" for k, v in rows)
    width = max((len(k) for k, _ in rows), default=0)
    return "\n".join(f"{k.ljust(width)}  {v}" for k, v in rows)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--p", type=int, default=5, help="odd prime p (default 5)")
    common.add_argument("--prec", type=int, nargs=2, metavar=("K", "N"), default=(6, 64), help="p-adic digits and series degree")
    common.add_argument("--level", type=int, default=2, help="Mazur-Tate / Stickelberger level n")
    common.add_argument("--sigma0", type=str, default=None, help="comma-separated primes of Sigma_0")
    common.add_argument("--format", dest="fmt", choices=FORMATS, default="json")
    common.add_argument("--cache-dir", default=None)
    common.add_argument("--catalog", default=None, help="TSV curve catalog (defaults to the bundled one)")
    common.add_argument("--assert-irreducible", action="store_true")
    common.add_argument("--assert-mu-zero", action="store_true")

    parser = argparse.ArgumentParser(prog="iwlambda", description="Iwasawa lambda/mu invariants of elliptic curves and characters.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("invariants", parents=[common], help="sigma table and optional analytic invariants")
    p.add_argument("--curve", required=True)
    p.add_argument("--conductor", type=int)
    p.add_argument("--ell", type=int, action="append")
    p.add_argument("--analytic", action="store_true")
    p.set_defaults(func=cmd_invariants)

    p = sub.add_parser("transfer", parents=[common], help="transfer lambda between congruent curves")
    p.add_argument("--curve1", required=True)
    p.add_argument("--curve2", required=True)
    p.add_argument("--conductor1", type=int)
    p.add_argument("--conductor2", type=int)
    p.add_argument("--lambda1", type=int)
    p.add_argument("--bound", type=int, help="congruence screen bound (defaults to the Sturm bound)")
    p.add_argument("--audit", action="store_true", help="compare with the analytic invariants of curve2")
    p.set_defaults(func=cmd_transfer)

    p = sub.add_parser("twist-family", parents=[common], help="lambda of the twist J_{-c} of a conductor-11 curve")
    p.add_argument("--c", type=int, required=True)
    p.add_argument("--base", default="11a3")
    p.add_argument("--analytic", action="store_true")
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    p.set_defaults(func=cmd_twist_family)

    p = sub.add_parser("kl", parents=[common], help="classical lambda of a Dirichlet character")
    p.add_argument("--char", required=True, help="e.g. kronecker:-4 or kronecker:-3*teichmuller^1:5")
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    p.set_defaults(func=cmd_kl)

    p = sub.add_parser("congruence", parents=[common], help="finite-level congruence of p-adic L-functions")
    p.add_argument("--mode", choices=("pair", "eisenstein"), default="pair")
    p.add_argument("--curve", required=True)
    p.add_argument("--curve2")
    p.add_argument("--conductor", type=int)
    p.add_argument("--psi")
    p.set_defaults(func=cmd_congruence)

    p = sub.add_parser("msym-cache", parents=[common], help="build or verify the modular-symbol cache")
    p.add_argument("--curve", required=True)
    p.add_argument("--conductor", type=int)
    p.set_defaults(func=cmd_msym_cache)
    return parser


def _config(args: argparse.Namespace) -> RunConfig:
    sigma0 = None
    if args.sigma0 is not None:
        try:
            sigma0 = tuple(sorted({int(t) for t in args.sigma0.split(",") if t.strip()}))
        except ValueError as exc:
            raise InputError(f"cannot parse --sigma0 {args.sigma0!r}") from exc
    return RunConfig(
        p=args.p,
        k=args.prec[0],
        n=args.prec[1],
        level=args.level,
        sigma0=sigma0,
        cache_dir=args.cache_dir,
        fmt=args.fmt,
        catalog=args.catalog,
        assert_irreducible=args.assert_irreducible,
        assert_mu_zero=args.assert_mu_zero,
    )


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _config(args)
        report = args.func(args, cfg)
    except HypothesisError as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return EXIT_HYPOTHESIS
    except UncertifiedError as exc:
        print(f"uncertified: {exc}", file=sys.stderr)
        return EXIT_UNCERTIFIED
    except (InputError, ValueError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    print(render(report, cfg.fmt))
    if report.get("exit") == "uncertified":
        return EXIT_UNCERTIFIED
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
