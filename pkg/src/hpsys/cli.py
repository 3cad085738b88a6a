"""Command-line entry point: expand, solve, reconstruct, monodromy, zeros.

Exit codes: 0 success, 2 input error, 3 numeric failure, 4 refused guarantee
(disconnected k-subset surface under --strict).
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path as FsPath

import mpmath

from .continuation import ContinuationError, critical_values
from .gaussian import GaussianParseError, parse_gaussian
from .hp import (
    GermTuple,
    TruncationTooShort,
    assemble_system,
    default_backend,
    solve_hp,
    verify_homogeneous_conditions,
    verify_order_conditions,
)
from .linalg import EmptyNullspace
from .monodromy import ksubset_action, monodromy_generators, simple_branching_check
from .polynomial import AlgebraicCurve, CurveError, RationalExpression, load_curve_file
from .reconstruction import (
    NoUsableN,
    distinguished_pair,
    export_zeros,
    infer_limit_and_rate,
    minor_ratio_candidates,
    subset_sum_oracle,
    write_errors_csv,
    write_zeros_csv,
    write_zeros_svg,
)
from .series import GermSpec, SeriesError, germ_of_expression, series_pow

log = logging.getLogger("hpsys")

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC, EXIT_REFUSED = 0, 2, 3, 4


class InputError(ValueError):
    pass


class NumericFailure(ArithmeticError):
    pass


class RefusedGuarantee(RuntimeError):
    pass


# --------------------------------------------------------------------------
# config


def parse_n_range(text: str) -> list[int]:
    """"a:b" or "a:b:step" with b inclusive, or a comma list."""
    if ":" in text:
        parts = [int(p) for p in text.split(":")]
        if len(parts) == 2:
            parts.append(1)
        a, b, step = parts
        if step <= 0:
            raise InputError("n-range step must be positive")
        ns = list(range(a, b + 1, step))
    else:
        ns = [int(p) for p in text.split(",") if p.strip()]
    if not ns or min(ns) < 0:
        raise InputError(f"empty or negative n-range {text!r}")
    return ns


def parse_points(text: str) -> list:
    """Semicolon/whitespace separated Gaussian rationals, or a CSV file with re,im columns."""
    if os.path.exists(text):
        import csv

        pts = []
        with open(text, newline="") as fh:
            for row in csv.reader(fh):
                if not row or row[0].strip().lower() in ("re", "") or row[0].startswith("#"):
                    continue
                re = parse_gaussian(row[0].strip())
                im = parse_gaussian(row[1].strip()) if len(row) > 1 and row[1].strip() else parse_gaussian("0")
                pts.append(re + im * parse_gaussian("i"))
        return pts
    return [parse_gaussian(p) for p in text.replace(";", " ").split()]


def parse_subset(text: str) -> tuple[int, ...]:
    return tuple(sorted(int(x) for x in text.split(",") if x.strip()))


def parse_germ(text: str) -> GermSpec:
    """"pole:p:leading" (w ~ leading z^p) or "value:c" (w(inf) = c)."""
    parts = text.split(":")
    if parts[0] == "pole" and len(parts) == 3:
        return GermSpec(pole_order=int(parts[1]), leading=parts[2])
    if parts[0] == "value" and len(parts) == 2:
        return GermSpec(value=parts[1])
    raise InputError(f"bad germ spec {text!r}; use pole:p:c or value:c")


def load_curve(args) -> tuple[AlgebraicCurve, GermSpec | None]:
    src = args.curve
    if src is None:
        raise InputError("--curve is required")
    if os.path.exists(src):
        curve, spec = load_curve_file(src)
    else:
        curve, spec = AlgebraicCurve.from_string(src), None
    if getattr(args, "germ", None):
        spec = parse_germ(args.germ)
    return curve, spec


def config_hash(args) -> str:
    cfg = {k: v for k, v in sorted(vars(args).items()) if k not in ("out", "jobs", "func", "verbose")}
    if cfg.get("curve") and os.path.exists(cfg["curve"]):
        with open(cfg["curve"], "rb") as fh:
            cfg["curve_sha256"] = hashlib.sha256(fh.read()).hexdigest()
    blob = json.dumps(cfg, sort_keys=True, default=str).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def out_dir(args) -> FsPath:
    d = FsPath(args.out or ".")
    d.mkdir(parents=True, exist_ok=True)
    return d


def write_json(path: FsPath, payload: dict, chash: str) -> None:
    payload = {"config_hash": chash, **payload}
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")
    log.info("wrote %s", path)


def _prepend_comment(path: FsPath, line: str) -> None:
    text = path.read_text()
    path.write_text(line + "\n" + text)


# --------------------------------------------------------------------------
# germs


def build_germs(curve: AlgebraicCurve, spec: GermSpec, args, order: int) -> GermTuple:
    if spec is None:
        raise InputError("a germ specification is needed (\"branch\" in the curve file or --germ)")
    prec = None if spec.is_exact else args.prec_bits
    fs = args.f or []
    if args.power_tuple:
        if len(fs) != 1:
            raise InputError("--power-tuple takes exactly one --f")
        g = germ_of_expression(curve, spec, fs[0], order, prec)
        return GermTuple(tuple(series_pow(g, j) for j in range(1, curve.m + 1)))
    if len(fs) != curve.m:
        raise InputError(f"a general tuple needs m={curve.m} --f expressions, got {len(fs)}")
    return GermTuple.from_expressions(curve, spec, fs, order, prec)


def n_values(args) -> list[int]:
    if args.n_range:
        return parse_n_range(args.n_range)
    if args.n is not None:
        return [args.n]
    raise InputError("give --n or --n-range")


def _solve_one(germs: GermTuple, n: int, k: int, backend, prec_bits: int):
    sol = solve_hp(assemble_system(germs, n, k), backend, prec_bits)
    rep = verify_order_conditions(sol, germs)
    hom = verify_homogeneous_conditions(sol, germs)
    sol.max_residual = rep.max_residual
    return sol, rep, hom


def solve_many(germs: GermTuple, ns, k: int, backend, prec_bits: int, jobs: int):
    # one backend for the whole range, so every n uses the same vector selection rule
    if backend is None and ns:
        backend = default_backend(germs, max(ns))
    if jobs and jobs > 1 and len(ns) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            futs = [ex.submit(_solve_one, germs, n, k, backend, prec_bits) for n in ns]
            return [f.result() for f in futs]
    return [_solve_one(germs, n, k, backend, prec_bits) for n in ns]


def _residuals_ok(sol, rep, hom) -> bool:
    if sol.is_exact:
        return rep.all_zero and hom.all_zero
    tol = mpmath.mpf(2) ** (-(sol.prec_bits // 2))
    return rep.within(tol) and hom.within(tol)


# --------------------------------------------------------------------------
# commands


def cmd_expand(args) -> int:
    curve, spec = load_curve(args)
    chash = config_hash(args)
    order = args.order
    if order is None:
        ns = n_values(args)
        order = (curve.m + 1) * max(ns)
    germs = build_germs(curve, spec, args, order)
    payload = {"curve": curve.to_dict(), "branch": spec.to_dict(), "order": order,
               "f": args.f, "power_tuple": bool(args.power_tuple), **germs.to_dict()}
    write_json(out_dir(args) / "germs.json", payload, chash)
    return EXIT_OK


def cmd_solve(args) -> int:
    curve, spec = load_curve(args)
    chash = config_hash(args)
    ns = n_values(args)
    k = _check_k(args.k, curve.m)
    germs = build_germs(curve, spec, args, (curve.m + 1) * max(ns))
    d = out_dir(args)
    failed = []
    for sol, rep, hom in solve_many(germs, ns, k, args.backend, args.prec_bits, args.jobs):
        ok = _residuals_ok(sol, rep, hom)
        if not ok:
            failed.append(sol.n)
        payload = sol.to_dict()
        payload["residuals"] = {
            "order_conditions": {",".join(map(str, key)): str(v) for key, v in rep.residuals.items()},
            "homogeneous_conditions": {",".join(map(str, key)): str(v) for key, v in hom.residuals.items()},
            "scale": rep.scale,
            "ok": ok,
        }
        write_json(d / f"solution_k{k}_n{sol.n}.json", payload, chash)
        print(f"n={sol.n} k={k} backend={sol.backend} nullspace_dim={sol.nullspace_dim} "
              f"max_residual={_short(sol.max_residual)} {'ok' if ok else 'FAILED'}")
    if failed:
        raise NumericFailure(f"residuals above tolerance for n = {failed}")
    return EXIT_OK


def _short(x) -> str:
    try:
        return mpmath.nstr(mpmath.mpf(abs(complex(x))), 3)
    except TypeError:
        return str(x)


def _check_k(k, m) -> int:
    if k is None:
        raise InputError("--k is required")
    if not 1 <= k <= m:
        raise InputError(f"k must lie in [1, {m}]")
    return k


def cmd_reconstruct(args) -> int:
    curve, spec = load_curve(args)
    chash = config_hash(args)
    ns = n_values(args)
    k = _check_k(args.k, curve.m)
    if not args.points:
        raise InputError("--points is required")
    points = parse_points(args.points)
    action = ksubset_action(monodromy_generators(curve, args.prec_bits), k)
    connected = action.connected
    if not connected:
        msg = f"the k={k} subset surface has {len(action.orbits)} components"
        if args.strict:
            raise RefusedGuarantee(msg)
        log.warning("%s; reconstruction is not guaranteed", msg)
    germs = build_germs(curve, spec, args, (curve.m + 1) * max(ns))
    sols = [s for s, _, _ in solve_many(germs, ns, k, args.backend, args.prec_bits, args.jobs)]
    if args.pair:
        Js, Is = args.pair.split(":")
        J, I = parse_subset(Js), parse_subset(Is)
    else:
        J, I = distinguished_pair(k)
    d = out_dir(args)
    reports = []
    for idx, z in enumerate(points):
        with mpmath.workprec(args.prec_bits):
            zc = z.to_mpc()
        if args.power_tuple and (J, I) == distinguished_pair(k):
            table = subset_sum_oracle(curve, args.f[0], spec, k, zc, args.prec_bits)
        else:
            fs = args.f if not args.power_tuple else [RationalExpression.parse(args.f[0]).power(j)
                                                     for j in range(1, curve.m + 1)]
            table = minor_ratio_candidates(curve, fs, spec, J, I, k, zc, args.prec_bits)
        rep = infer_limit_and_rate(sols, table, J, I, connected=connected)
        write_errors_csv(rep, d / f"errors_z{idx}.csv")
        _prepend_comment(d / f"errors_z{idx}.csv", f"# config_hash={chash} z={z}")
        entry = rep.to_dict()
        entry["candidates"] = table.to_dict()
        reports.append(entry)
        print(f"z={z}: matched {list(rep.matched)} error={mpmath.nstr(rep.final_error, 3)} "
              f"rate={'-' if rep.rate is None else f'{rep.rate:.4f}'} ambiguous={rep.ambiguous}")
    header = {"k": k, "m": curve.m, "n": ns, "connected": connected,
              "orbit_sizes": action.orbit_sizes, "backend": sols[0].backend}
    write_json(d / "reconstruction.json", {"header": header, "points": reports}, chash)
    return EXIT_OK


def cmd_monodromy(args) -> int:
    curve, _ = load_curve(args)
    chash = config_hash(args)
    gens = monodromy_generators(curve, args.prec_bits)
    ks = [args.k] if args.k is not None else list(range(1, curve.m + 1))
    results = []
    for k in ks:
        action = ksubset_action(gens, _check_k(k, curve.m))
        results.append(action.to_dict())
        print(f"k={k}: orbit sizes {action.orbit_sizes} connected={action.connected}")
    ok, witness = simple_branching_check(gens.profile())
    payload = results[0] if len(results) == 1 else {"by_k": results, "simple_branching": ok}
    if witness is not None:
        payload["simple_branching_witness"] = str(witness)
    write_json(out_dir(args) / "monodromy.json", payload, chash)
    return EXIT_OK


def cmd_zeros(args) -> int:
    curve, spec = load_curve(args)
    chash = config_hash(args)
    ns = n_values(args)
    k = _check_k(args.k, curve.m)
    subset = parse_subset(args.subset) if args.subset else tuple(range(k))
    germs = build_germs(curve, spec, args, (curve.m + 1) * max(ns))
    cvs = [complex(c) for c in critical_values(curve, args.prec_bits).values]
    d = out_dir(args)
    for sol, _, _ in solve_many(germs, ns, k, args.backend, args.prec_bits, args.jobs):
        zeros = export_zeros(sol, subset)
        stem = f"zeros_k{k}_n{sol.n}"
        write_zeros_csv(zeros, d / f"{stem}.csv")
        _prepend_comment(d / f"{stem}.csv", f"# config_hash={chash} subset={list(subset)}")
        R = max([3.0] + [abs(c) * 1.2 for c in cvs])
        write_zeros_svg(zeros, d / f"{stem}.svg", cvs, (-R, -R, R, R))
        print(f"n={sol.n}: {sum(mult for _, mult in zeros)} zeros of P_{list(subset)}")
    return EXIT_OK


# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hpsys", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, germs=True, solve=True):
        sp.add_argument("--curve", required=True, help="curve JSON file or a polynomial in z, w")
        sp.add_argument("--prec-bits", type=int, default=256)
        sp.add_argument("--out", default=".")
        if germs:
            sp.add_argument("--germ", help="branch at infinity: pole:p:c or value:c (overrides the file)")
            sp.add_argument("--f", action="append", help="rational expression in z, w (repeat for a general tuple)")
            sp.add_argument("--power-tuple", action="store_true", help="use f, f^2, ..., f^m from a single --f")
        if solve:
            sp.add_argument("--k", type=int)
            sp.add_argument("--n", type=int)
            sp.add_argument("--n-range", help="a:b[:step] inclusive, or a comma list")
            sp.add_argument("--backend", choices=["exact", "numeric"])
            sp.add_argument("--jobs", type=int, default=1)

    sp = sub.add_parser("expand", help="germ series of f_1..f_m at infinity")
    common(sp, solve=False)
    sp.add_argument("--order", type=int)
    sp.add_argument("--n", type=int)
    sp.add_argument("--n-range")
    sp.set_defaults(func=cmd_expand)

    sp = sub.add_parser("solve", help="k-th polynomials with residual reports")
    common(sp)
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("reconstruct", help="ratio limits and rates at points")
    common(sp)
    sp.add_argument("--points", help="points like \"2; 2+i; -3\" or a CSV file (re,im)")
    sp.add_argument("--pair", help="J:I subsets, e.g. 0,2:0,1 (default: the distinguished pair)")
    sp.add_argument("--strict", action="store_true", help="refuse disconnected k-subset surfaces")
    sp.set_defaults(func=cmd_reconstruct)

    sp = sub.add_parser("monodromy", help="orbits of the k-subset monodromy action")
    common(sp, germs=False, solve=False)
    sp.add_argument("--k", type=int)
    sp.set_defaults(func=cmd_monodromy)

    sp = sub.add_parser("zeros", help="zeros of P_I as CSV and SVG")
    common(sp)
    sp.add_argument("--subset", help="comma list I (default 0..k-1)")
    sp.set_defaults(func=cmd_zeros)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    if args.prec_bits < 64:
        print("error: --prec-bits must be at least 64", file=sys.stderr)
        return EXIT_INPUT
    try:
        return args.func(args)
    except RefusedGuarantee as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return EXIT_REFUSED
    except GaussianParseError as exc:
        print(f"error: {exc} (offset {exc.offset})", file=sys.stderr)
        return EXIT_INPUT
    except (InputError, CurveError, TruncationTooShort, FileNotFoundError, json.JSONDecodeError,
            KeyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (NumericFailure, ContinuationError, EmptyNullspace, SeriesError, NoUsableN,
            ArithmeticError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
