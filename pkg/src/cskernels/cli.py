"""Command-line front-end: ``python -m cskernels <command> ...``.

Exit codes: 0 success, 2 domain or configuration error, 3 a verification
suite ran but at least one check failed.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import halfline_ops as ho
from . import params as pm
from . import suites, tensor_solver
from .kernels import AdmissibilityError, KernelDomainError, KernelSpec, envelope, fit_envelope, heat_kernel, heat_kernel_dy
from .report import SCHEMA_VERSION, ProbeReport

EXIT_OK, EXIT_DOMAIN, EXIT_SUITE = 0, 2, 3


class ConfigError(ValueError):
    pass


DOMAIN_ERRORS = (
    ConfigError,
    pm.NegativeDiscriminant,
    pm.OutsideGenerationWindow,
    pm.InvalidMeasure,
    pm.Unbounded,
    AdmissibilityError,
    KernelDomainError,
    suites.UnknownSuite,
    ValueError,
)


def _fmt(x) -> str:
    return "%.17g" % float(x)


def load_config(path: str | None) -> dict:
    if not path:
        return {}
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    return data


def merged_config(args, keys) -> dict:
    """Config file values overridden by every flag that was given explicitly."""
    cfg = load_config(getattr(args, "config", None))
    for k in keys:
        v = getattr(args, k, None)
        if v is not None:
            cfg[k] = v
    for item in getattr(args, "set", None) or []:
        key, sep, raw = item.partition("=")
        if not sep:
            raise ConfigError(f"--set expects key=value, got {item!r}")
        try:
            cfg[key] = json.loads(raw)
        except json.JSONDecodeError:
            cfg[key] = raw
    return cfg


def _emit(text: str, output: str | None) -> None:
    if output:
        Path(output).write_text(text, encoding="utf-8", newline="\n")
    else:
        sys.stdout.write(text)


def report_json(rep: ProbeReport, stamp: bool = True) -> str:
    data = rep.to_dict()
    if stamp:
        data["timestamp"] = datetime.now(timezone.utc).isoformat(timespec="seconds")
    return json.dumps(data, indent=2, sort_keys=True) + "\n"


def spec_from(cfg: dict) -> KernelSpec:
    spec = suites._spec_from(cfg)
    spec.check()
    return spec


# ---------------------------------------------------------------------------


def cmd_classify(args) -> int:
    cfg = merged_config(args, ["b", "c", "m", "p"])
    op = pm.OperatorParams(float(cfg.get("b", 0.0)), float(cfg.get("c", 0.0)))
    out: dict = {"b": op.b, "c": op.c}
    if args.rellich:
        sp = pm.SpaceParams(float(cfg.get("m", 0.0)), float(cfg.get("p", 2.0)))
        r = pm.rellich_constants(op, sp)
        out.update(p=sp.p, gamma_p=r.gamma_p, parabola_vertex=r.parabola_vertex, degenerate_axis=r.degenerate_axis,
                   in_parabola=r.in_parabola, best_constant=r.best_constant)
    else:
        D, s1, s2 = pm.indicial_roots(op)
        out.update(D=D, s1=s1, s2=s2, window=list(pm.generation_interval(op)))
        if "m" in cfg or "p" in cfg:
            sp = pm.SpaceParams(float(cfg.get("m", 0.0)), float(cfg.get("p", 2.0)))
            out.update(m=sp.m, p=sp.p, q=sp.q, in_window=pm.in_generation_window(op, sp))
            if out["in_window"]:
                cls = pm.classify_realization(op, sp)
                out.update(maximal=cls.maximal, minimal=cls.minimal, unique=cls.unique, alternate_exists=cls.alternate_exists)
    _emit(json.dumps(out, indent=2, sort_keys=True) + "\n", args.output)
    return EXIT_OK


def _axis(cfg: dict, name: str, default) -> np.ndarray:
    v = cfg.get(name, default)
    if isinstance(v, (int, float)):
        return np.array([float(v)])
    if isinstance(v, str):
        v = [float(s) for s in v.split(",") if s.strip()]
    return np.asarray(v, dtype=float)


def kernel_table(spec: KernelSpec, t, y, rho, kappa: float = 4.5) -> str:
    """CSV rows over the (t, y, ρ) product in t-major order."""
    T, Y, R = (a.ravel() for a in np.meshgrid(t, y, rho, indexing="ij"))
    p = heat_kernel(spec, T, Y, R)
    dp = heat_kernel_dy(spec, T, Y, R)
    C = fit_envelope(spec, kappa).C
    env = envelope(spec, kappa, C=C)(T, Y, R)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["t", "y", "rho", "p", "dp_dy", "envelope"])
    for row in zip(T, Y, R, p, dp, env):
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def cmd_kernel_eval(args) -> int:
    cfg = merged_config(args, ["kernel", "b", "c", "alternate", "t", "y", "rho", "kappa"])
    spec = spec_from(cfg)
    t = _axis(cfg, "t", [0.1, 1.0, 10.0])
    y = _axis(cfg, "y", [0.5, 1.0, 2.0])
    rho = _axis(cfg, "rho", [0.5, 1.0, 2.0])
    if np.any(t <= 0) or np.any(y <= 0) or np.any(rho <= 0):
        raise ConfigError("t, y and rho must be positive")
    _emit(kernel_table(spec, t, y, rho, float(cfg.get("kappa", 4.5))), args.output)
    return EXIT_OK


def _default_source(cfg: dict, c: float) -> tensor_solver.HalfSpaceField:
    N = int(cfg.get("N", 1))
    nx = int(cfg.get("nx", 32))
    box = float(cfg.get("box", 16.0))
    y = tensor_solver.probe_y_grid(int(cfg.get("n_geo", 96)), int(cfg.get("n_uni", 384)))
    return tensor_solver.HalfSpaceField.separable(
        (box,) * N, (nx,) * N, y, lambda *xs: np.exp(-sum(x * x for x in xs)), tensor_solver._bump(1.0, 3.0), c
    )


def cmd_solve(args) -> int:
    cfg = merged_config(args, ["kernel", "b", "c", "alternate", "N", "nx", "lam", "t"])
    spec = spec_from(cfg)
    f = _default_source(cfg, spec.op.c)
    if args.kind == "elliptic":
        lam = float(cfg.get("lam", 1.0))
        u = tensor_solver.elliptic_solve(spec, lam, f)
        summary = {"kind": "elliptic", "lam": lam, "residual": tensor_solver.elliptic_residual(spec, lam, f, u)}
    else:
        t = float(cfg.get("t", 0.5))
        u = tensor_solver.parabolic_step(spec, t, f)
        summary = {"kind": "parabolic", "t": t}
        if spec.is_conservative:
            mass = lambda fld: float(np.sum(fld.values * fld.y ** spec.op.c * np.gradient(fld.y)))
            summary["mass_drift"] = abs(mass(u) / mass(f) - 1.0)
    summary.update(spec=spec.describe(), N=f.N, nx=list(f.nx), ny=int(f.y.size), norm_2=u.norm(2.0))
    if args.solution:
        path = Path(args.solution)
        if path.suffix == ".csv":
            path.write_text(u.to_csv(), encoding="utf-8", newline="\n")
        else:
            path.write_bytes(u.to_bytes())
        summary["solution"] = str(path)
    _emit(json.dumps(summary, indent=2, sort_keys=True) + "\n", args.output)
    return EXIT_OK


SUITE_KEYS = ["seed", "kernel", "b", "c", "m", "p", "N", "tol"]


def cmd_verify(args) -> int:
    if args.list:
        for s in suites.SUITES.values():
            sys.stdout.write(f"{s.name:20s} {s.summary}\n")
        return EXIT_OK
    if not args.suite:
        raise ConfigError("verify needs a suite name (or --list)")
    cfg = merged_config(args, SUITE_KEYS)
    if args.suite == "rellich" and "N" not in cfg:
        cfg["N"] = [0, 1]
    rep = suites.run_suite(args.suite, cfg)
    _emit(report_json(rep, stamp=not args.no_timestamp), args.output)
    if args.output:
        sys.stderr.write(f"{args.suite}: {'pass' if rep.passed else 'FAIL'} ({len(rep.failures())} failing of {len(rep.records)})\n")
    return EXIT_OK if rep.passed else EXIT_SUITE


def _probe(args, cfg) -> ProbeReport:
    name = args.name
    if name == "hardy":
        return ho.hardy_probe(float(cfg.get("c", 0.0)), pm.SpaceParams(float(cfg.get("m", 0.0)), float(cfg.get("p", 2.0))),
                              str(cfg.get("which", "H1")))
    if name == "sab":
        spec = ho.SabSpec(float(cfg["alpha"]), float(cfg["beta"]), int(cfg.get("M", 1)), float(cfg.get("m", 0.0)),
                          float(cfg.get("kappa", 4.0)))
        return ho.sab_threshold_probe(spec, float(cfg.get("p", 2.0)))
    if name == "muckenhoupt":
        return ho.muckenhoupt_probe(float(cfg["k"]), int(cfg.get("M", 1)), float(cfg.get("m", 0.0)),
                                    float(cfg.get("p", 2.0)), float(cfg.get("r_min", 1e-4)))
    if name == "boundary":
        return ho.boundary_limit_probe(spec_from(cfg), float(cfg.get("lam", 1.0)))
    if name == "rellich":
        op = pm.OperatorParams(float(cfg.get("b", 1.0)), float(cfg.get("c", 0.0)))
        return tensor_solver.rellich_probe(op, float(cfg.get("p", 2.0)), int(cfg.get("N", 0)), seed=int(cfg.get("seed", 0)))
    sp = pm.SpaceParams(float(cfg.get("m", 0.0)), float(cfg.get("p", 2.0)))
    if name == "closedness":
        ccfg = tensor_solver.ClosednessConfig(N=int(cfg.get("N", 1)), seed=int(cfg.get("seed", 0)))
        return tensor_solver.closedness_probe(spec_from(cfg), sp, ccfg)
    if name == "rademacher":
        return tensor_solver.rademacher_probe(spec_from(cfg), sp, mode=str(cfg.get("mode", "semigroup")),
                                              seed=int(cfg.get("seed", 0)))
    raise ConfigError(f"unknown probe {name!r}")


PROBES = ["hardy", "sab", "muckenhoupt", "boundary", "rellich", "closedness", "rademacher"]


def cmd_probe(args) -> int:
    cfg = merged_config(args, ["seed", "kernel", "b", "c", "m", "p", "N", "which", "alpha", "beta", "M", "kappa", "k",
                               "r_min", "lam", "mode"])
    try:
        rep = _probe(args, cfg)
    except KeyError as exc:
        raise ConfigError(f"probe {args.name} needs parameter {exc}") from None
    rep.config = {**cfg, **rep.config}
    _emit(report_json(rep, stamp=not args.no_timestamp), args.output)
    return EXIT_OK if rep.passed else EXIT_SUITE


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="cskernels", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, kernel=True):
        p.add_argument("--config", help="JSON file; explicit flags override its entries")
        p.add_argument("--set", action="append", metavar="KEY=VALUE", help="extra config entry (JSON value)")
        p.add_argument("-o", "--output", help="write to this file instead of stdout")
        p.add_argument("--b", type=float)
        p.add_argument("--c", type=float)
        if kernel:
            p.add_argument("--kernel", choices=["neumann", "dirichlet", "operator"])
            p.add_argument("--alternate", action="store_const", const=True)

    p = sub.add_parser("classify", help="indicial roots, generation window, realization and Rellich data")
    common(p, kernel=False)
    p.add_argument("--m", type=float)
    p.add_argument("--p", type=float)
    p.add_argument("--rellich", action="store_true")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("kernel-eval", help="CSV table of heat kernel values")
    common(p)
    p.add_argument("--t", help="comma-separated times")
    p.add_argument("--y", help="comma-separated y values")
    p.add_argument("--rho", help="comma-separated rho values")
    p.add_argument("--kappa", type=float)
    p.set_defaults(func=cmd_kernel_eval)

    p = sub.add_parser("solve", help="half-space elliptic or parabolic solve on a default source")
    common(p)
    p.add_argument("kind", choices=["elliptic", "parabolic"])
    p.add_argument("--N", type=int)
    p.add_argument("--nx", type=int)
    p.add_argument("--lam", type=float)
    p.add_argument("--t", type=float)
    p.add_argument("--solution", help="write the solution (.csv, otherwise binary)")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("verify", help="run a verification suite")
    common(p)
    p.add_argument("suite", nargs="?")
    p.add_argument("--list", action="store_true")
    p.add_argument("--m", type=float)
    p.add_argument("--p", type=float)
    p.add_argument("--N", type=int)
    p.add_argument("--tol", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--no-timestamp", action="store_true")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("probe", help="run one probe at a single parameter point")
    common(p)
    p.add_argument("name", choices=PROBES)
    for flag, typ in [("m", float), ("p", float), ("N", int), ("seed", int), ("which", str), ("alpha", float),
                      ("beta", float), ("M", int), ("kappa", float), ("k", float), ("r_min", float), ("lam", float),
                      ("mode", str)]:
        p.add_argument(f"--{flag}", type=typ)
    p.add_argument("--no-timestamp", action="store_true")
    p.set_defaults(func=cmd_probe)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except DOMAIN_ERRORS as exc:
        sys.stderr.write(f"error: {type(exc).__name__}: {exc}\n")
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
