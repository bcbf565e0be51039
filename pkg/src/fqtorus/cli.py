"""Command-line front end.

Exit codes: 0 success / all checks passed, 1 computation error, 2 a
verification check failed.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import cutproject as cp
from . import formats
from .rootfind import is_real_rooted, real_roots
from .spectrum import kappa_hat_points, spectrum_scan
from .suites import SUITES
from .torus_core import CompactificationMap, check_rational_independence
from .torus_curve import homotopy_density, trace_components, transversality
from .trigpoly import ExpPoly1D, LaurentPoly, pullback

log = logging.getLogger("fqtorus")

QUANTITY = {
    "roots": "real zeros of the exponential polynomial, with multiplicities",
    "certify": "real-zero density on [-R, R] against the complex-zero density y_d - y_1",
    "trace": "components of the real zero set on T^2 with winding vectors",
    "density": "empirical real-zero density against |S_1/S| |det E^T M| summed over components",
    "spectrum": "windowed Bohr means at M^T k, i.e. kappa(zeta_-k)",
    "cutproject": "strip cut-and-project set with its window Fourier coefficients",
    "verify-example": "full reproduction of a worked example",
}


class UsageError(ValueError):
    pass


def _exp_poly(args) -> tuple[ExpPoly1D, LaurentPoly | None, CompactificationMap | None]:
    if not args.poly:
        raise UsageError("--poly is required")
    poly = formats.load_polynomial(args.poly)
    cmap = _map(args, required=isinstance(poly, LaurentPoly))
    if isinstance(poly, LaurentPoly):
        return pullback(poly, cmap), poly, cmap
    return poly, None, cmap


def _map(args, required: bool = True) -> CompactificationMap | None:
    if getattr(args, "map", None):
        return formats.load_map(args.map)
    if getattr(args, "tan_theta", None) is not None:
        return CompactificationMap.from_tan(formats.parse_real(args.tan_theta))
    if required:
        raise UsageError("a map is required: --map FILE or --tan-theta VALUE")
    return None


def _laurent(args) -> tuple[LaurentPoly, CompactificationMap]:
    poly = formats.load_polynomial(args.poly) if args.poly else None
    if not isinstance(poly, LaurentPoly):
        raise UsageError("--poly must be a LaurentPoly JSON document for this command")
    return poly, _map(args)


def _header(args, command: str) -> dict:
    cfg = {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "out")}
    for key in ("poly", "map", "config"):
        if cfg.get(key):
            cfg[key + "_content"] = formats.read_json(cfg[key])
    return {"command": command, "quantity": QUANTITY[command],
            "config_hash": formats.config_hash(cfg), "config": cfg}


def cmd_roots(args, out: Path) -> int:
    p, _, _ = _exp_poly(args)
    a, b = (-args.R, args.R) if args.a is None else (args.a, args.b)
    pts = real_roots(p, a, b, grid_step=args.grid_step, threads=args.threads)
    formats.write_points(out / "roots.csv", pts, _header(args, "roots"))
    print(f"{len(pts)} roots ({pts.total_mass} with multiplicity) on [{a}, {b}]")
    return 0


def cmd_certify(args, out: Path) -> int:
    p, _, _ = _exp_poly(args)
    v = is_real_rooted(p, args.R, args.tol, threads=args.threads)
    doc = {**_header(args, "certify"), **v.to_json()}
    formats.write_json(out / "certify.json", doc)
    print(f"{doc['verdict']}: rho_r = {v.rho_real:.6g}, rho_c = {v.rho_complex:.6g}, R = {v.R}")
    return 0


def _trace(args):
    P, cmap = _laurent(args)
    comps = trace_components(P, cmap, seed_grid=args.seed_grid, step=args.step)
    hom, total = homotopy_density(comps, cmap)
    return P, cmap, comps, hom, total


def cmd_trace(args, out: Path) -> int:
    P, cmap, comps, hom, total = _trace(args)
    header = _header(args, "trace")
    for i, (c, h) in enumerate(zip(comps, hom)):
        side = {**h.to_json(), "transversality_margin": transversality(c, cmap),
                "lift_displacement": c.lift_displacement.tolist(), "step": c.step,
                "config_hash": header["config_hash"]}
        formats.write_component(out / f"component_{i}.csv", c.samples, side)
    formats.write_json(out / "homotopy.json", {**header, "components": [h.to_json() for h in hom],
                                               "total_density": total})
    print(f"{len(comps)} component(s), windings {[c.winding for c in comps]}, density {total:.8g}")
    return 0


def cmd_density(args, out: Path) -> int:
    P, cmap, comps, hom, total = _trace(args)
    pts = real_roots(pullback(P, cmap), -args.R, args.R, threads=args.threads)
    rel = abs(pts.density - total) / total
    doc = {**_header(args, "density"), "empirical": pts.density, "homotopy": total,
           "relative_gap": rel, "R": args.R, "components": [h.to_json() for h in hom]}
    formats.write_json(out / "density.json", doc)
    print(f"empirical {pts.density:.6g} vs homotopy {total:.6g} (relative gap {rel:.2e})")
    return 0


def cmd_spectrum(args, out: Path) -> int:
    if args.points:
        pts = formats.read_points(args.points)
        cmap = _map(args)
    else:
        p, _, cmap = _exp_poly(args)
        pts = real_roots(p, -args.R, args.R, threads=args.threads)
    scan = spectrum_scan(pts, cmap, args.kmax, args.tol if args.tol else 0.05)
    header = _header(args, "spectrum")
    mask = [{"k": list(k), "null": v} for k, v in sorted(scan.null_mask.items())]
    formats.write_spectrum(out / "spectrum.csv", scan.table,
                           {**header, "support_mask": mask, "note": scan.note,
                            "frequencies": scan.frequencies.tolist()})
    print(f"{sum(not v for v in scan.null_mask.values())} non-null of {len(mask)} entries")
    return 0


def cmd_cutproject(args, out: Path) -> int:
    if args.config:
        doc = formats.read_json(args.config)
        cfg = cp.CutProjectConfig(formats.parse_real(doc["tan_theta"]), float(doc["ell"]),
                                  float(doc["R"]))
    else:
        cfg = cp.CutProjectConfig(formats.parse_real(args.tan_theta or "golden"), args.ell, args.R)
    pts = cp.generate(cfg)
    header = _header(args, "cutproject")
    ind = check_rational_independence(cfg.cmap)
    formats.write_points(out / "cutproject.csv", pts,
                         {**header, "irrationality_screen": ind.to_json()})
    rows = []
    cmap = cfg.cmap
    for a in range(-args.kmax, args.kmax + 1):
        for b in range(-args.kmax, args.kmax + 1):
            e = kappa_hat_points(pts, cmap, (a, b))
            rows.append({"k": [a, b], "y": e.y, "closed_form": cp.kappa_coeff_closed_form(cfg, (a, b)),
                         "bohr_re": e.value.real, "bohr_im": e.value.imag, "err": e.error_estimate})
    formats.write_json(out / "coefficients.json", {**header, "coefficients": rows})
    print(f"{len(pts)} points, density {pts.density:.6g}")
    return 0


def cmd_verify(args, out: Path) -> int:
    n = args.example
    kw = {}
    if args.tan_theta is not None:
        kw["tan_theta"] = formats.parse_real(args.tan_theta)
    if args.R is not None:
        kw["R"] = args.R
    if n == 2 and args.delta is not None:
        kw["delta"] = args.delta
    if n in (1, 2):
        kw["threads"] = args.threads
    checks = SUITES[n](**kw)
    ok = all(c.passed for c in checks)
    doc = {**_header(args, "verify-example"), "example": n, "passed": ok,
           "checks": [c.to_json() for c in checks]}
    formats.write_json(out / f"example{n}_report.json", doc)
    for c in checks:
        tol = "" if c.tol is None else f" (tol {c.tol:g})"
        print(f"[{'PASS' if c.passed else 'FAIL'}] {c.name}: {_fmt(c.measured)}{tol}")
    return 0 if ok else 2


def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.6g}"
    return json.dumps(v, default=str)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--poly", help="LaurentPoly or ExpPoly1D JSON")
    common.add_argument("--map", help="CompactificationMap JSON")
    common.add_argument("--tan-theta", help="slope of M = [cos t, sin t]; accepts sqrt2, golden, 1/sqrt2")
    common.add_argument("--R", type=float, default=None, help="window radius")
    common.add_argument("--kmax", type=int, default=4)
    common.add_argument("--tol", type=float, default=None)
    common.add_argument("--out", default="out", help="output directory")
    common.add_argument("--threads", type=int, default=1)
    common.add_argument("-v", "--verbose", action="store_true")

    ap = argparse.ArgumentParser(prog="fqtorus", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("roots", parents=[common])
    p.add_argument("--a", type=float)
    p.add_argument("--b", type=float)
    p.add_argument("--grid-step", type=float)
    p.set_defaults(func=cmd_roots, R_default=50.0)

    p = sub.add_parser("certify", parents=[common])
    p.set_defaults(func=cmd_certify, R_default=500.0)

    for name, fn in (("trace", cmd_trace), ("density", cmd_density)):
        p = sub.add_parser(name, parents=[common])
        p.add_argument("--seed-grid", type=int, default=64)
        p.add_argument("--step", type=float, default=1e-3)
        p.set_defaults(func=fn, R_default=500.0)

    p = sub.add_parser("spectrum", parents=[common])
    p.add_argument("--points", help="WeightedPointSet CSV instead of computing roots")
    p.set_defaults(func=cmd_spectrum, R_default=500.0)

    p = sub.add_parser("cutproject", parents=[common])
    p.add_argument("--config", help="CutProjectConfig JSON")
    p.add_argument("--ell", type=float, default=1.0)
    p.set_defaults(func=cmd_cutproject, R_default=200.0)

    p = sub.add_parser("verify-example", parents=[common])
    p.add_argument("example", type=int, choices=sorted(SUITES))
    p.add_argument("--delta", type=float)
    p.set_defaults(func=cmd_verify, R_default=None)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.R is None:
        args.R = args.R_default
    if args.tol is not None and args.tol <= 0:
        ap.error("--tol must be positive")
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    try:
        return args.func(args, out)
    except Exception as exc:  # every module error becomes exit 1 with a JSON record
        err = {"error": type(exc).__name__, "message": str(exc), "command": args.command}
        formats.write_json(out / "error.json", err)
        print(json.dumps(err), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
