"""Command-line entry point: `chebyshev-a3 <command> [flags]`.

Exit codes: 0 success, 1 verification or numerical failure, 2 usage error.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass

import numpy as np

from . import critical, dynamics, surfaces, torus
from .errors import DomainError, InternalError, NumericalError
from .poly import build_map, compose, evaluate

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


# --- configuration ----------------------------------------------------------

@dataclass(frozen=True)
class RunConfig:
    seed: int = 0
    eps_circle: float = torus.EPS_CIRCLE
    eps_converge: float = dynamics.EPS_CONVERGE
    n_max: int = dynamics.N_MAX
    escape_radius: float = dynamics.ESCAPE_RADIUS
    out: str | None = None

    def __post_init__(self):
        if not (0 <= self.seed < 2 ** 64):
            raise UsageError("seed must be a 64-bit unsigned integer")
        if self.eps_circle <= 0 or self.eps_converge <= 0:
            raise UsageError("tolerances must be positive")
        if self.n_max <= 0 or self.escape_radius <= 0:
            raise UsageError("budgets must be positive")


def read_config(path: str) -> dict:
    """Parse `key = value` lines; '#' starts a comment, [sections] are ignored."""
    conv = {"seed": int, "n_max": int, "eps_circle": float, "eps_converge": float,
            "escape_radius": float, "out": str}
    out = {}
    try:
        with open(path) as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise UsageError(f"cannot read config: {exc}") from exc
    for n, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line or line.startswith("["):
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{n}: expected key = value")
        key, val = (x.strip() for x in line.split("=", 1))
        val = val.strip("\"'")
        if key not in conv:
            raise UsageError(f"{path}:{n}: unknown key {key!r}")
        try:
            out[key] = conv[key](val)
        except ValueError as exc:
            raise UsageError(f"{path}:{n}: bad value for {key}") from exc
    return out


def make_config(args) -> RunConfig:
    base = read_config(args.config) if args.config else {}
    flags = {
        "seed": args.seed,
        "eps_circle": args.tol,
        "eps_converge": args.eps_converge,
        "n_max": args.n_max,
        "escape_radius": args.escape_radius,
        "out": args.out,
    }
    base.update({k: v for k, v in flags.items() if v is not None})
    return RunConfig(**base)


# --- output -----------------------------------------------------------------

def fmt(x) -> str:
    return "%.17g" % x


def to_json(obj, indent: int = 0) -> str:
    """JSON with every float printed to 17 significant digits."""
    pad = " " * indent
    if isinstance(obj, bool) or obj is None:
        return {True: "true", False: "false", None: "null"}[obj]
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            return '"%s"' % x
        return fmt(x)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return to_json([obj.real, obj.imag], indent)
    if isinstance(obj, np.ndarray):
        return to_json(obj.tolist(), indent)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        inner = ",\n".join(
            f'{pad} {to_json(str(k))}: {to_json(v, indent + 1)}' for k, v in obj.items()
        )
        return "{\n" + inner + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in obj):
            return "[" + ", ".join(to_json(v) for v in obj) + "]"
        inner = ",\n".join(pad + " " + to_json(v, indent + 1) for v in obj)
        return "[\n" + inner + "\n" + pad + "]"
    raise TypeError(f"cannot serialize {type(obj)}")


def emit(cfg: RunConfig, name: str, text: str) -> None:
    if cfg.out:
        os.makedirs(cfg.out, exist_ok=True)
        with open(os.path.join(cfg.out, name), "w", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _degree(args, minimum: int = 1, default: int | None = None) -> int:
    d = default if args.degree is None else args.degree
    if d is None or d < minimum:
        raise UsageError(f"degree must be >= {minimum}")
    return d


def _parse_complex_list(text: str, n: int) -> np.ndarray:
    try:
        vals = [float(v) for v in text.split(",")]
    except ValueError as exc:
        raise UsageError(f"cannot parse numbers in {text!r}") from exc
    if len(vals) == n:
        return np.array(vals, dtype=complex)
    if len(vals) == 2 * n:
        return np.array(vals[0::2]) + 1j * np.array(vals[1::2])
    raise UsageError(f"expected {n} reals or {n} re,im pairs")


# --- verification suites ----------------------------------------------------

class Suite:
    def __init__(self, name: str):
        self.name = name
        self.checks = []

    def check(self, label, value, threshold, case=None, smaller=True):
        ok = bool(value < threshold) if smaller else bool(value > threshold)
        row = {"check": label, "value": float(value), "threshold": float(threshold), "pass": ok}
        if not ok and case is not None:
            row["failing_case"] = case
        self.checks.append(row)

    @property
    def passed(self) -> bool:
        return all(c["pass"] for c in self.checks)

    def report(self) -> dict:
        return {"suite": self.name, "pass": self.passed, "checks": self.checks}


def _rel_err(a, b):
    return np.abs(a - b).max(axis=-1) / np.maximum(np.abs(b).max(axis=-1), 1.0)


def suite_semiconjugacy(cfg: RunConfig, n: int = 1000) -> Suite:
    s = Suite("semiconjugacy")
    rng = np.random.default_rng(cfg.seed)
    for d in range(2, 7):
        t = rng.uniform(0.5, 2.0, (n, 3)) * np.exp(1j * rng.uniform(0, 2 * np.pi, (n, 3)))
        err = _rel_err(evaluate(build_map(d), torus.phi1(t)), torus.phi1(t ** d))
        k = int(np.argmax(err))
        s.check(f"d={d} max relative residual", err[k], 1e-9, {"t": t[k]})
    for p in (2, 3):
        for q in (2, 3):
            ok = compose(build_map(p), build_map(q)) == build_map(p * q)
            s.check(f"compose({p},{q}) == build({p * q}) mismatches", 0 if ok else 1, 0.5)
    return s


def suite_symmetry(cfg: RunConfig, n: int = 1000) -> Suite:
    s = Suite("symmetry")
    rng = np.random.default_rng(cfg.seed)
    for d in range(2, 7):
        m = build_map(d)
        bad = int(m.g3 != m.g1.swap13()) + int(m.g2 != m.g2.swap13())
        s.check(f"d={d} z1<->z3 symmetry mismatches", bad, 0.5)
    pts = rng.uniform(-3 * np.pi, 3 * np.pi, (n, 3))
    base = torus.phi1_angles(torus.s_to_angles(pts))
    for k in range(4):
        img = torus.phi1_angles(torus.s_to_angles(torus.reflect(k, pts)))
        s.check(f"phi1 invariance under J{k}", np.abs(img - base).max(), 1e-10)
    folded = torus.fold_batch(pts)
    s.check(
        "phi1 invariance under folding",
        np.abs(torus.phi1_angles(torus.s_to_angles(folded)) - base).max(),
        1e-9,
    )
    return s


def suite_jacobian_d3(cfg: RunConfig, n: int = 1000) -> Suite:
    s = Suite("jacobian-d3")
    rng = np.random.default_rng(cfg.seed)
    w = rng.dirichlet(np.ones(4), size=8 * n)
    w = w[w.min(axis=1) >= 0.05][:n]
    sp = w @ torus.ALCOVE_VERTICES
    a = torus.s_to_angles(sp)
    z = torus.phi1_angles(a)
    ref = dynamics.gram_det_fd(a)
    err = np.abs(dynamics.d3(z[:, 0], z[:, 1]) - ref) / np.abs(ref)
    k = int(np.argmax(err))
    s.check("max relative error of d3 vs Jacobian Gram determinant", err[k], 1e-6, {"angles": a[k]})
    return s


def suite_rays(cfg: RunConfig, n: int = 1000) -> Suite:
    s = Suite("rays")
    rng = np.random.default_rng(cfg.seed)
    al, be, ga = (rng.uniform(0, 2 * np.pi, n) for _ in range(3))
    r = rng.uniform(1.0, 1.5, n)
    for d in (2, 3):
        lhs = evaluate(build_map(d), surfaces.external_ray_point(al, be, ga, r))
        rhs = surfaces.external_ray_point(d * al, d * be, d * ga, r ** d)
        s.check(f"functoriality d={d}", _rel_err(lhs, rhs).max(), 1e-9)
    P = [torus.to_pq(surfaces.r3_ray_point(al, be, x)) for x in (1.5, 2.0, 3.0)]
    col = np.linalg.norm(np.cross(P[1] - P[0], P[2] - P[0]), axis=-1)
    s.check("R3 ray collinearity", col.max(), 1e-10)
    land = torus.to_pq(surfaces.external_ray_point(al, be, al, 1.0))
    dist, _, _ = surfaces.surface_distance(land, "astroidalhedron")
    s.check("landing distance to astroidalhedron", dist.max(), 1e-8)
    u = rng.uniform(0, 2 * np.pi, n)
    s.check("developable tangency residual", surfaces.tangency_residual(u).max(), 1e-10)
    worst = 0.0
    for c in rng.uniform(-np.pi / 4, np.pi / 4, 4):
        A = surfaces.natural_face_samples(rng, c, n // 4)
        pq = torus.to_pq(torus.phi1_angles(A))
        worst = max(worst, np.abs(surfaces.plane_residual(surfaces.inscribed_face(c), pq)).max())
    s.check("inscribed face plane residual", worst, 1e-10)
    worst_d, worst_c = 0.0, 0.0
    for alpha in np.linspace(0.05, np.pi - 0.05, 32):
        betas = np.linspace(-alpha + 0.1, -alpha + np.pi - 0.1, 8)
        tg = np.array([surfaces.ruling_E(alpha, b)[1] for b in betas])
        dist, _, _ = surfaces.surface_distance(tg, "astroidalhedron")
        dirn = surfaces.ruling_direction(alpha)
        worst_c = max(worst_c, np.linalg.norm(np.cross(tg - tg[0], dirn), axis=-1).max())
        worst_d = max(worst_d, dist.max())
    s.check("ruling map targets: distance to astroidalhedron", worst_d, 1e-6)
    s.check("ruling map targets: offset from ruling line", worst_c, 1e-9)
    return s


def suite_critical(cfg: RunConfig, n: int = 1000, trials: int = 100_000) -> Suite:
    s = Suite("critical")
    rng = np.random.default_rng(cfg.seed)
    s.check("det_dphi1(2,3,5) vs finite differences",
            abs(critical.det_dphi1([2, 3, 5]) - critical.fd_det_dphi1([2, 3, 5])[0]) / 5.8, 1e-6)
    t = np.exp(rng.uniform(-0.7, 0.7, (n, 3)) + 1j * rng.uniform(0, 2 * np.pi, (n, 3)))
    for d in (2, 3):
        q = critical.det_d_composite(t, d) / critical.det_dphi1(t)
        fd = critical.fd_det_dp(build_map(d), torus.phi1(t))
        s.check(f"det quotient vs finite-difference det DP, d={d}",
                np.max(np.abs(q - fd) / np.abs(fd)), 1e-6)
    m2 = build_map(2)
    for br in list(critical.CriticalBranch)[:5]:
        _, pre, _ = critical.sample_branch(rng, br, n)
        J = critical.fd_jacobian(lambda w: evaluate(m2, w), torus.phi1(pre))
        s.check(f"{br.value}: normalized det DP at preimages", critical.normalized_det(J).max(), 1e-6)
    rep = critical.stray_solution_search(trials=trials, seed=cfg.seed)
    s.check("stray real critical values (min max-residual)", rep.best_max_residual, 1e-8,
            rep.best_point, smaller=False)
    for which in ("top", "lower"):
        cls = critical.whisker_absorption(which, [1.2, 2.0, 4.0], budget=cfg.n_max)
        bad = sum(str(c) != "FatouFixed(P2)" for c in cls)
        s.check(f"{which} whisker orbits not absorbed by P2", bad, 0.5)
    return s


def bridge_points(n_phi: int = 256, n_gamma: int = 64, gamma_max: float = 5.0):
    ph, g = np.meshgrid(
        np.linspace(0, 2 * np.pi, n_phi, endpoint=False),
        np.linspace(-gamma_max, gamma_max, n_gamma),
        indexing="ij",
    )
    z = critical.ps_to_dynamics(critical.q0_beta(ph, g), g)
    return ph.ravel(), g.ravel(), torus.to_pq(z.reshape(-1, 3))


def suite_bridge(cfg: RunConfig) -> Suite:
    s = Suite("bridge")
    _, _, pq = bridge_points()
    dist, _, _ = surfaces.surface_distance(pq)
    k = int(np.argmax(dist))
    s.check("Q0 image distance to tangent developable", dist[k], 1e-6, {"pq": pq[k]})
    worst = 0.0
    for which in ("top", "lower"):
        for th in np.linspace(0, 2 * np.pi, 32, endpoint=False):
            p = surfaces.bowl_projective(which, th, 1e6)
            worst = max(worst, dynamics.mobius_distance(p))
    s.check("bowl rims at r=1e6: distance to strip boundary", worst, 1e-4)
    return s


SUITES = {
    "semiconjugacy": suite_semiconjugacy,
    "symmetry": suite_symmetry,
    "jacobian-d3": suite_jacobian_d3,
    "rays": suite_rays,
    "critical": suite_critical,
    "bridge": suite_bridge,
}


# --- commands ---------------------------------------------------------------

def cmd_gen(args, cfg):
    d = _degree(args)
    emit(cfg, f"map_d{d}.json", build_map(d).to_json() + "\n")
    return EXIT_OK


def cmd_verify(args, cfg):
    if args.suite != "all" and args.suite not in SUITES:
        raise UsageError(f"unknown suite {args.suite!r}")
    names = list(SUITES) if args.suite == "all" else [args.suite]
    reports = [SUITES[n](cfg).report() for n in names]
    ok = all(r["pass"] for r in reports)
    emit(cfg, f"verify_{args.suite}.json", to_json({"pass": ok, "suites": reports}) + "\n")
    return EXIT_OK if ok else EXIT_FAIL


def _classify_row(m, row, cfg):
    tag, nums = row[0].strip(), row[1:]
    vals = [float(x) for x in nums]
    if tag == "t":
        if len(vals) != 6:
            raise ValueError("t rows need three re,im pairs")
        t = torus.TorusPoint(*(complex(vals[2 * i], vals[2 * i + 1]) for i in range(3)))
        exact = dynamics.classify_exact(t, cfg.eps_circle)
        z = torus.phi1(t)
    elif tag == "z":
        if len(vals) == 6:
            z = np.array([complex(vals[2 * i], vals[2 * i + 1]) for i in range(3)])
        elif len(vals) == 5:
            z = np.array([complex(vals[0], vals[1]), complex(vals[2]), complex(vals[3], vals[4])])
        elif len(vals) == 3:
            z = torus.from_pq(np.array(vals))
        else:
            raise ValueError("z rows need 6 (pairs), 5 (real z2) or 3 (p1,p2,q) numbers")
        exact = None
    else:
        raise ValueError(f"unknown row tag {tag!r}")
    num = dynamics.classify_numeric(
        m, z, budget=cfg.n_max, eps_converge=cfg.eps_converge, eps_circle=cfg.eps_circle
    )
    return exact, num


def cmd_classify(args, cfg):
    d = _degree(args, 2, default=2)
    m = build_map(d)
    try:
        src = open(args.input) if args.input != "-" else sys.stdin
        with src:
            rows = [ln for ln in src.read().splitlines() if ln.strip() and not ln.startswith("#")]
    except OSError as exc:
        raise UsageError(str(exc)) from exc
    out = ["row,mode,exact,numeric,agree"]
    bad = 0
    for i, ln in enumerate(rows):
        parts = ln.split(",")
        try:
            exact, num = _classify_row(m, parts, cfg)
        except (ValueError, DomainError) as exc:
            bad += 1
            out.append(f"{i},error,,,{str(exc).replace(',', ';')}")
            continue
        agree = "" if exact is None else str(
            exact == num or num.kind is dynamics.OrbitKind.UNRESOLVED
        ).lower()
        out.append(f"{i},{parts[0].strip()},{exact if exact else ''},{num},{agree}")
    emit(cfg, "classify.csv", "\n".join(out) + "\n")
    return EXIT_USAGE if bad else EXIT_OK


def _point(args):
    if args.z is not None:
        return _parse_complex_list(args.z, 3)
    if args.t is not None:
        return torus.phi1(torus.TorusPoint(*_parse_complex_list(args.t, 3)))
    raise UsageError("give --z or --t")


def cmd_orbit(args, cfg):
    d = _degree(args)
    steps = args.steps if args.steps is not None else 20
    if steps < 0:
        raise UsageError("steps must be >= 0")
    trace = dynamics.iterate(build_map(d), _point(args), steps)
    obj = {"degree": d, "points": [[complex(c) for c in row] for row in trace.points]}
    emit(cfg, "orbit.json", to_json(obj) + "\n")
    return EXIT_OK


def cmd_green(args, cfg):
    d = _degree(args, 2, default=2)
    g = dynamics.green(build_map(d), _point(args), n_max=cfg.n_max, escape_radius=cfg.escape_radius)
    emit(cfg, "green.json", to_json({"degree": d, "value": g.value, "iterations": g.n_used,
                                     "error_bound": g.error_bound}) + "\n")
    return EXIT_OK


def cmd_periodic(args, cfg):
    d = _degree(args, 2)
    n = args.period
    if n is None or n < 1:
        raise UsageError("period must be >= 1")
    pts = dynamics.periodic_points(d, n)
    if args.format == "json":
        stats = dynamics.equidistribution_stats(pts, 1) if n > 1 else None
        obj = {"degree": d, "period": n, "count": len(pts),
               "max_residual": float(pts.residuals.max()),
               "equidistribution": stats.to_dict() if stats else None}
        emit(cfg, f"periodic_d{d}_n{n}.json", to_json(obj) + "\n")
    else:
        emit(cfg, f"periodic_d{d}_n{n}.csv", pts.to_csv())
    return EXIT_OK


def cmd_measure(args, cfg):
    est = dynamics.measure_integral(args.samples, seed=cfg.seed, method=args.method)
    emit(cfg, "measure.json", to_json({
        "value": est.value, "stderr": est.stderr, "samples": est.n_samples,
        "inside_fraction": est.inside_fraction, "method": est.method, "seed": cfg.seed,
    }) + "\n")
    return EXIT_OK


_KINDS = {k.value.lower(): k for k in surfaces.SurfaceKind}
_KINDS.update({"tangent-developable": surfaces.SurfaceKind.TANGENT_DEVELOPABLE,
               "top-bowl": surfaces.SurfaceKind.TOP_BOWL,
               "lower-bowl": surfaces.SurfaceKind.LOWER_BOWL,
               "top-whiskers": surfaces.SurfaceKind.TOP_WHISKERS,
               "lower-whiskers": surfaces.SurfaceKind.LOWER_WHISKERS})


def cmd_mesh(args, cfg):
    kind = _KINDS.get(args.kind.lower())
    if kind is None:
        raise UsageError(f"unknown surface kind {args.kind!r}")
    if args.nu < 2 or args.nv < 2:
        raise UsageError("nu and nv must be >= 2")
    vr = tuple(float(x) for x in args.v_range.split(",")) if args.v_range else None
    msh = surfaces.mesh(surfaces.SurfacePatch(kind, v_range=vr), args.nu, args.nv)
    name = kind.value.lower()
    if args.format == "ply":
        if not cfg.out:
            raise UsageError("PLY output needs --out")
        os.makedirs(cfg.out, exist_ok=True)
        surfaces.export_ply(msh, os.path.join(cfg.out, name + ".ply"))
    else:
        emit(cfg, name + ".obj", surfaces.mesh_to_obj(msh))
    return EXIT_OK


def cmd_rays(args, cfg):
    kind = surfaces.RayKind.INTERNAL if args.internal else surfaces.RayKind.EXTERNAL
    gamma = args.alpha if args.gamma is None else args.gamma
    ray = surfaces.Ray(kind, args.alpha, args.beta, gamma)
    if kind is surfaces.RayKind.EXTERNAL:
        params = np.geomspace(1.0, args.r_max, args.samples)
    else:
        params = np.linspace(0, 2 * np.pi, args.samples, endpoint=False)
    obj = ray.to_json_obj(params)
    if kind is surfaces.RayKind.EXTERNAL:
        lim = surfaces.external_ray_limit(args.alpha, args.beta, gamma)
        obj["limit"] = [complex(c) for c in lim.coords]
    emit(cfg, "ray.json", to_json(obj) + "\n")
    return EXIT_OK


def cmd_critical(args, cfg):
    if args.search:
        rep = critical.stray_solution_search(trials=args.trials, seed=cfg.seed)
        emit(cfg, "critical_search.json", to_json(rep.__dict__) + "\n")
        return EXIT_OK if rep.below_threshold == 0 else EXIT_FAIL
    rng = np.random.default_rng(cfg.seed)
    rows = []
    for br in list(critical.CriticalBranch)[:5]:
        params, _, val = critical.sample_branch(rng, br, args.samples)
        rows.append((br, params, torus.to_pq(val)))
    emit(cfg, "critical_branches.csv", critical.branch_csv(rows))
    return EXIT_OK


def cmd_bridge(args, cfg):
    ph, g, pq = bridge_points(args.n_phi, args.n_gamma)
    dist, _, _ = surfaces.surface_distance(pq)
    if args.format == "json":
        emit(cfg, "bridge.json", to_json({"points": len(pq), "max_distance": dist.max()}) + "\n")
    else:
        lines = ["phi,gamma,p1,p2,q,distance"]
        lines += [",".join(fmt(x) for x in (a, b, *p, d)) for a, b, p, d in zip(ph, g, pq, dist)]
        emit(cfg, "bridge.csv", "\n".join(lines) + "\n")
    return EXIT_OK if dist.max() < 1e-6 else EXIT_FAIL


# --- parser -----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-d", "--degree", type=int)
    common.add_argument("-n", "--period", type=int)
    common.add_argument("--seed", type=int)
    common.add_argument("--tol", type=float, help="unit-circle tolerance")
    common.add_argument("--eps-converge", type=float)
    common.add_argument("--n-max", type=int)
    common.add_argument("--escape-radius", type=float)
    common.add_argument("--out", help="output directory (default: stdout)")
    common.add_argument("--format", choices=["json", "csv", "obj", "ply"])
    common.add_argument("--config", help="key = value config file; flags win")

    p = argparse.ArgumentParser(prog="chebyshev-a3", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("gen", parents=[common], help="print the map as JSON")
    v = sub.add_parser("verify", parents=[common], help="run a property suite")
    v.add_argument("suite")
    c = sub.add_parser("classify", parents=[common], help="classify points from a CSV")
    c.add_argument("input", nargs="?", default="-")
    for name in ("orbit", "green"):
        o = sub.add_parser(name, parents=[common])
        o.add_argument("--z", help="z1,z2,z3 as reals or re,im pairs")
        o.add_argument("--t", help="t1,t2,t3 as reals or re,im pairs")
        if name == "orbit":
            o.add_argument("--steps", type=int)
    sub.add_parser("periodic", parents=[common], help="periodic points in the alcove")
    ms = sub.add_parser("measure", parents=[common], help="total mass of the density")
    ms.add_argument("--samples", type=int, default=100_000)
    ms.add_argument("--method", choices=["slice", "box"], default="slice")
    me = sub.add_parser("mesh", parents=[common], help="triangulate a surface")
    me.add_argument("--kind", required=True)
    me.add_argument("--nu", type=int, default=64)
    me.add_argument("--nv", type=int, default=16)
    me.add_argument("--v-range", help="lo,hi for the second parameter")
    r = sub.add_parser("rays", parents=[common], help="sample an external or internal ray")
    r.add_argument("--alpha", type=float, required=True)
    r.add_argument("--beta", type=float, required=True)
    r.add_argument("--gamma", type=float)
    r.add_argument("--internal", action="store_true")
    r.add_argument("--samples", type=int, default=16)
    r.add_argument("--r-max", type=float, default=10.0)
    cr = sub.add_parser("critical", parents=[common], help="critical-value branch samples")
    cr.add_argument("--samples", type=int, default=100)
    cr.add_argument("--search", action="store_true", help="run the stray-solution search")
    cr.add_argument("--trials", type=int, default=100_000)
    b = sub.add_parser("bridge", parents=[common], help="binary-quartic surface vs developable")
    b.add_argument("--n-phi", type=int, default=256)
    b.add_argument("--n-gamma", type=int, default=64)
    return p


COMMANDS = {
    "gen": cmd_gen, "verify": cmd_verify, "classify": cmd_classify, "orbit": cmd_orbit,
    "green": cmd_green, "periodic": cmd_periodic, "measure": cmd_measure, "mesh": cmd_mesh,
    "rays": cmd_rays, "critical": cmd_critical, "bridge": cmd_bridge,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = make_config(args)
        return COMMANDS[args.command](args, cfg)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DomainError, NumericalError, InternalError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except BrokenPipeError:
        sys.stderr.close()
        return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
