"""Command-line front end.

Every command writes one JSON report (to ``--out`` or stdout) that embeds the
resolved configuration, the package version and the full tolerance set.
Reports are deterministic for a fixed configuration.

Exit codes: 0 success, 1 a verification check failed, 2 invalid input,
3 numerical failure.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .domains import DomainTag, SampleKind, sample_domain
from .errors import InvalidInputError, NpextError
from .tolerances import DEFAULT, Tolerances

EXIT_OK, EXIT_CHECK, EXIT_INPUT, EXIT_NUMERIC = 0, 1, 2, 3
SEED_ENV = "NPEXT_SEED"


class InputFailure(Exception):
    """Raised for user-facing input problems that map to exit code 2."""


def _complex_arg(text: str) -> complex:
    try:
        parts = [float(x) for x in text.split(",")]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected RE,IM but got {text!r}") from exc
    if len(parts) == 1:
        parts.append(0.0)
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected RE,IM but got {text!r}")
    return complex(parts[0], parts[1])


def _tol_arg(text: str) -> tuple:
    name, sep, value = text.partition("=")
    if not sep:
        raise argparse.ArgumentTypeError(f"expected NAME=VALUE, got {text!r}")
    try:
        return name.strip(), float(value)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"tolerance {name!r} needs a number") from exc


def _default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        return 0


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, (np.bool_,)):
        return bool(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, (np.floating, float)):
        return float(x)
    if isinstance(x, (complex, np.complexfloating)):
        return [float(x.real), float(x.imag)]
    if isinstance(x, Path):
        return str(x)
    return x


def _dump(obj) -> str:
    return json.dumps(_jsonable(obj), indent=2, sort_keys=True, allow_nan=False) + "\n"


def _read_json(path: str):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputFailure(f"cannot read {path}: {exc.strerror or exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputFailure(f"malformed JSON in {path} at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc


def _read_points(path: str) -> np.ndarray:
    data = _read_json(path)
    if isinstance(data, dict):
        if "points" not in data:
            raise InputFailure(f"{path}: expected a list of points or an object with 'points'")
        data = data["points"]
    try:
        if data and isinstance(data[0], dict):
            return np.array([[r["re1"] + 1j * r["im1"], r["re2"] + 1j * r["im2"]] for r in data], dtype=complex)
        arr = np.asarray(data, dtype=float)
        if arr.ndim != 3 or arr.shape[1:] != (2, 2):
            raise ValueError(f"shape {arr.shape}")
    except (KeyError, TypeError, ValueError) as exc:
        raise InputFailure(f"{path}: points must be [[re, im], [re, im]] pairs ({exc})") from exc
    return arr[..., 0] + 1j * arr[..., 1]


def _tolerances(args) -> Tolerances:
    try:
        return DEFAULT.updated(**dict(args.tol or []))
    except (KeyError, TypeError) as exc:
        raise InputFailure(str(exc)) from exc


def _config(args) -> dict:
    skip = {"func", "tol"}
    cfg = {k: v for k, v in sorted(vars(args).items()) if k not in skip}
    return _jsonable(cfg)


def _report(args, tol: Tolerances, body: dict) -> dict:
    return {"command": args.command, "config": _config(args), "version": __version__,
            "tolerances": tol.as_dict(), **body}


def _load_variety(args, tol):
    from .extension import VarietyFunction

    data = _read_json(args.input)
    domain = getattr(args, "domain", None)
    if isinstance(data, dict) and domain and "domain" in data and data["domain"] != domain:
        raise InputFailure(f"input domain {data['domain']!r} does not match --domain {domain!r}")
    return VarietyFunction.from_dict(data, domain, tol)


# ---------------------------------------------------------------------------
# commands


def cmd_extend(args, tol):
    from .extension import build_extension, verify_extension

    if args.beta != 0:
        raise InputFailure("only beta = 0 varieties are supported; map a beta != 0 variety to the "
                           "royal disc model by its holomorphic equivalence before extending")
    f = _load_variety(args, tol)
    F = build_extension(f, n_samples=args.realize_nodes, tol=args.realize_tol)
    rep = verify_extension(F, f, n=args.samples, seed=args.seed)
    if args.export:
        Path(args.export).write_text(_dump(F.to_dict()))
    body = {"verification": rep.to_dict(), "passed": rep.passed(tol),
            "extension": {"dims": {"H": F.dH, "E": F.dE, "K": F.dK}, "taus": F.taus}}
    return body, EXIT_OK if rep.passed(tol) else EXIT_CHECK


def cmd_verify(args, tol):
    from .extension import ExtensionFunction, verify_extension

    F = ExtensionFunction.from_dict(_read_json(args.extension), tol)
    args.domain = F.domain.value
    f = _load_variety(args, tol)
    rep = verify_extension(F, f, n=args.samples, seed=args.seed)
    return {"verification": rep.to_dict(), "passed": rep.passed(tol)}, EXIT_OK if rep.passed(tol) else EXIT_CHECK


def cmd_eval(args, tol):
    from .extension import ExtensionFunction, eval_extension
    from .schur.operators import opnorm

    F = ExtensionFunction.from_dict(_read_json(args.extension), tol)
    pts = _read_points(args.points)
    vals = eval_extension(F, pts)
    norms = opnorm(vals)
    return {"domain": F.domain.value, "n_points": len(pts),
            "values": [[[[z.real, z.imag] for z in row] for row in v] for v in vals],
            "norms": norms, "max_norm": float(norms.max(initial=0.0))}, EXIT_OK


def cmd_realize(args, tol):
    from .schur.colligation import chebyshev_disc_nodes, realize, transfer_function
    from .schur.operators import opnorm
    from .schur.polynomial import MatrixPolynomial

    try:
        g = MatrixPolynomial.from_dict(_read_json(args.input))
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, NpextError):
            raise
        raise InputFailure(f"bad matrix polynomial JSON: {exc}") from exc
    col = realize(g, n_samples=args.nodes, tol=args.realize_tol, tolerances=tol)
    rng = np.random.default_rng(args.seed)
    lam = 0.95 * np.sqrt(rng.random(args.fresh)) * np.exp(2j * np.pi * rng.random(args.fresh))
    fresh = float(opnorm(transfer_function(col, lam, tol) - g(lam)).max())
    node_err = float(opnorm(transfer_function(col, chebyshev_disc_nodes(args.nodes), tol)
                            - g(chebyshev_disc_nodes(args.nodes))).max())
    ok = col.unitarity_residual() <= tol.colligation_unitarity and fresh <= 10 * args.realize_tol
    if args.export:
        Path(args.export).write_text(_dump(col.to_dict()))
    return {"unitarity_residual": col.unitarity_residual(), "node_mismatch": node_err,
            "fresh_mismatch": fresh, "dims": {"H": col.dH, "E": col.dE, "K": col.dK},
            "passed": ok}, EXIT_OK if ok else EXIT_CHECK


def cmd_bergman(args, tol):
    from .bergman import (apply_extension, build_bergman_operator, make_problem, sublevel_estimate,
                          variety_values)

    prob = make_problem(args.domain, args.degree, args.domain_samples, args.variety_samples, args.seed,
                        symmetric=args.symmetric)
    op = build_bergman_operator(prob, tol)
    if args.input:
        f = _load_variety(args, tol)
        if f.dim != 1:
            raise InputFailure("the Bergman extension takes scalar (1x1) variety functions")
    else:
        f = (lambda lam: lam, lambda lam: lam)
    vals = variety_values(prob, f)
    coeffs = apply_extension(op, vals)
    residual = float(np.max(np.abs(op.evaluate(coeffs, prob.variety_coords) - vals)))
    angles = np.exp(2j * np.pi * np.arange(args.dictionary) / max(args.dictionary, 1))
    dictionary = [(lambda lam, a=a: a * lam, lambda lam: lam) for a in angles]
    grid = sample_domain(prob.domain, args.grid, args.seed + 1)
    region = sublevel_estimate(op, dictionary, grid, tol)
    if args.region_csv:
        Path(args.region_csv).write_text(region.to_csv())
    body = {"exponents": prob.exponents, "coefficients": coeffs,
            "objective": float(op.objective(coeffs)), "restriction_residual": residual,
            "region": region.to_dict()}
    ok = residual <= tol.restriction
    return body, EXIT_OK if ok else EXIT_CHECK


def cmd_counterexample(args, tol):
    from .counterexample import (case2_witness, case_one_report, find_inequality_violation,
                                 unimodular_gap, unimodular_grid_max)

    l0 = args.lambda0
    if not abs(l0) < 1:
        raise InputFailure("lambda0 must lie in the open unit disc")
    if args.case == "i":
        rep = case_one_report(l0, n=args.grid, seed=args.seed)
        body = rep.to_dict()
        body["narrative"] = ("order-0 terms: the LHS term is non-constant on {0} x D while the RHS term "
                             "is the constant lambda0, so no linear extension operator can match them")
        return body, EXIT_OK if rep.violation_found else EXIT_CHECK
    # lambda0 = 0 is the consistent case: the scan runs and finds nothing
    t = abs(l0)
    lhs_max, rhs, gap = unimodular_gap(t)
    grid_max, theta = unimodular_grid_max(t)
    w = find_inequality_violation(l0)
    cand = case2_witness(l0, args.grid)
    body = {"t": t,
            "unimodular_bound": {"lhs_max": lhs_max, "rhs": rhs, "gap": gap, "grid_max": grid_max,
                                 "grid_theta": theta},
            "inequality_witness": w.to_dict() if w else None,
            "candidate_witness": cand.to_dict(),
            "violation_found": bool(w is not None and abs(cand.value) > 1),
            "narrative": ("the forced image of [0, lam] leaves the unit disc on G2, so it is not a "
                          "Schur function and no linear isometric extension operator exists")}
    return body, EXIT_OK if body["violation_found"] else EXIT_CHECK


def cmd_sample(args, tol):
    s = sample_domain(args.domain, args.n, args.seed, SampleKind(args.kind))
    if args.csv:
        Path(args.csv).write_text(s.to_csv())
    return {"domain": s.domain.value, "kind": s.kind.value, "n": len(s), "seed": s.seed,
            "points": s.to_rows()}, EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="npext", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=_default_seed(),
                        help=f"random seed (default: ${SEED_ENV} or 0)")
    common.add_argument("--out", help="report path (default: stdout)")
    common.add_argument("--tol", type=_tol_arg, action="append", metavar="NAME=VALUE",
                        help="override a tolerance, e.g. --tol restriction=1e-9")
    sub = parser.add_subparsers(dest="command", required=True)
    domains = [d.value for d in DomainTag]

    p = sub.add_parser("extend", parents=[common], help="build and verify an extension")
    p.add_argument("--domain", choices=domains, default="g2")
    p.add_argument("--input", required=True, help="variety function JSON")
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--beta", type=_complex_arg, default=0j, help="variety parameter (only 0 supported)")
    p.add_argument("--realize-nodes", type=int, default=64)
    p.add_argument("--realize-tol", type=float, default=1e-10)
    p.add_argument("--export", help="write the extension (U1, W, taus) as JSON")
    p.set_defaults(func=cmd_extend)

    p = sub.add_parser("verify", parents=[common], help="re-verify an exported extension")
    p.add_argument("--extension", required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--samples", type=int, default=10_000)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("eval", parents=[common], help="evaluate an exported extension")
    p.add_argument("--extension", required=True)
    p.add_argument("--points", required=True, help="JSON list of [[re, im], [re, im]]")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("realize", parents=[common], help="unitary colligation of a matrix polynomial")
    p.add_argument("--input", required=True)
    p.add_argument("--nodes", type=int, default=64)
    p.add_argument("--fresh", type=int, default=1000)
    p.add_argument("--realize-tol", type=float, default=1e-10)
    p.add_argument("--export", help="write the colligation as JSON")
    p.set_defaults(func=cmd_realize)

    p = sub.add_parser("bergman", parents=[common], help="minimal-norm polynomial extension")
    p.add_argument("--domain", choices=domains, default="g2")
    p.add_argument("--degree", type=int, default=3)
    p.add_argument("--domain-samples", type=int, default=2000)
    p.add_argument("--variety-samples", type=int, default=16)
    p.add_argument("--symmetric", action="store_true")
    p.add_argument("--input", help="scalar variety function JSON (default [lam, lam])")
    p.add_argument("--dictionary", type=int, default=8, help="number of [a lam, lam] dictionary members")
    p.add_argument("--grid", type=int, default=2000)
    p.add_argument("--region-csv")
    p.set_defaults(func=cmd_bergman)

    p = sub.add_parser("counterexample", parents=[common], help="checks behind the linear-extension obstruction")
    p.add_argument("--case", choices=["i", "ii"], required=True)
    p.add_argument("--lambda0", type=_complex_arg, required=True, metavar="RE,IM")
    p.add_argument("--grid", type=int, default=1000)
    p.set_defaults(func=cmd_counterexample)

    p = sub.add_parser("sample", parents=[common], help="seeded domain samples")
    p.add_argument("--domain", choices=domains, default="g2")
    p.add_argument("--kind", choices=[k.value for k in SampleKind], default="interior")
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--csv", help="also write the points as CSV")
    p.set_defaults(func=cmd_sample)
    return parser


def run(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        tol = _tolerances(args)
        body, code = args.func(args, tol)
        text = _dump(_report(args, tol, body))
    except (InputFailure, InvalidInputError, ValueError, KeyError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
