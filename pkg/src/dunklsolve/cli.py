"""Command-line entry point.

Usage::

    dunklsolve {validate,solve,measure,convergence,identities} --config RUN.json
               [--out DIR] [--seed N] [--method {reduction,direct,both}]
               [--levels N] [--h H]

The config is one JSON object::

    {
      "root_system": {"name": "B2", "k": [1, 1]},          # or "I2" + "params": {"m": 5},
                                                          # or "custom" + "roots": [[...], ...]
      "domain": {"type": "box", "lower": [2, 0.5], "upper": [3, 1]},
      "grid": {"h": 0.0625},                              # or {"nodes": 16} along axis 1
      "boundary": {"expression": "x1^2*x2"},
      "solve": {"method": "both"},
      "measure": {"point": [2.5, 0.75]},
      "convergence": {"levels": 3, "reference": "boundary"},
      "identities": {"points": 100},
      "tolerances": {"residual": 1e-10, "delta": null},
      "seed": 0,
      "out": "results"
    }

Exit codes: 0 success, 1 configuration error, 2 admissibility (or identity
check) failure, 3 solver failure.  Only the summary path goes to stdout.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import dirichlet as dd
from .convergence import empirical_orders, ladder, restrict
from .dunkl_core import ScalarField, conjugation_residual, fd_gradient, fd_laplacian
from .elliptic_solver import SolverError
from .expr import ExprError, parse
from .geometry import (
    AdmissibilityError,
    Ball,
    Box,
    EmptyInteriorError,
    Mask,
    check_admissible,
)
from .root_system import RootSystem, builtin

EXIT_OK, EXIT_CONFIG, EXIT_ADMISSIBILITY, EXIT_SOLVER = 0, 1, 2, 3


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    root_system: RootSystem
    domain: object
    h: float
    boundary: str | None
    sections: dict
    residual_tol: float = 1e-10
    delta: float | None = None
    seed: int = 0
    out: Path = Path("dunklsolve_out")
    raw: dict = field(default_factory=dict)

    @property
    def dimension(self) -> int:
        return self.root_system.dimension

    def section(self, name) -> dict:
        return dict(self.sections.get(name) or {})


def _vec(obj, key, where):
    if key not in obj:
        raise ConfigError(f"{where}: missing '{key}'")
    try:
        v = np.asarray(obj[key], dtype=float).reshape(-1)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{where}.{key}: expected a list of numbers") from exc
    return v


def _root_system(spec) -> RootSystem:
    if not isinstance(spec, dict) or "name" not in spec:
        raise ConfigError("root_system: expected an object with a 'name'")
    k = spec.get("k", spec.get("multiplicities", 1.0))
    try:
        if spec["name"] == "custom":
            return RootSystem(spec["roots"], k, name="custom")
        return builtin(spec["name"], k=k, **(spec.get("params") or {}))
    except (KeyError, ValueError, TypeError) as exc:
        raise ConfigError(f"root_system: {exc}") from exc


def _domain(spec, d):
    if not isinstance(spec, dict):
        raise ConfigError("domain: expected an object")
    kind = spec.get("type", "box")
    try:
        if kind == "box":
            dom = Box(_vec(spec, "lower", "domain"), _vec(spec, "upper", "domain"))
        elif kind == "ball":
            dom = Ball(_vec(spec, "center", "domain"), float(spec["radius"]))
        elif kind == "mask":
            ind = parse(spec["indicator"], d)
            dom = Mask(lambda x: ind(x) > 0, _vec(spec, "lower", "domain"), _vec(spec, "upper", "domain"))
        else:
            raise ConfigError(f"domain: unknown type {kind!r}")
    except ExprError as exc:
        raise ConfigError(f"domain.indicator: {exc}") from exc
    except (KeyError, ValueError, TypeError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"domain: {exc}") from exc
    if dom.dimension != d:
        raise ConfigError(f"domain has dimension {dom.dimension}, root system {d}")
    return dom


def load_config(path, overrides: dict | None = None) -> RunConfig:
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    return build_config(raw, overrides)


def build_config(raw: dict, overrides: dict | None = None) -> RunConfig:
    overrides = {k: v for k, v in (overrides or {}).items() if v is not None}
    rs = _root_system(raw.get("root_system"))
    d = rs.dimension
    domain = _domain(raw.get("domain"), d)
    grid = raw.get("grid") or {}
    if "h" in overrides:
        h = float(overrides["h"])
    elif "h" in grid:
        h = float(grid["h"])
    elif "nodes" in grid:
        lo, hi = domain.bounds
        h = float(hi[0] - lo[0]) / int(grid["nodes"])
    else:
        raise ConfigError("grid: give 'h' or 'nodes'")
    if not h > 0:
        raise ConfigError("grid: h must be positive")
    boundary = (raw.get("boundary") or {}).get("expression")
    if boundary is not None:
        try:
            parse(boundary, d)
        except ExprError as exc:
            raise ConfigError(f"boundary.expression: {exc}") from exc
    tol = raw.get("tolerances") or {}
    sections = {k: raw.get(k) for k in ("solve", "measure", "convergence", "identities")}
    if "method" in overrides:
        sections["solve"] = {**(sections["solve"] or {}), "method": overrides["method"]}
        sections["convergence"] = {**(sections["convergence"] or {}), "method": overrides["method"]}
    if "levels" in overrides:
        sections["convergence"] = {**(sections["convergence"] or {}), "levels": int(overrides["levels"])}
    return RunConfig(
        root_system=rs,
        domain=domain,
        h=h,
        boundary=boundary,
        sections=sections,
        residual_tol=float(tol.get("residual", 1e-10)),
        delta=None if tol.get("delta") is None else float(tol["delta"]),
        seed=int(overrides.get("seed", raw.get("seed", 0))),
        out=Path(overrides.get("out", raw.get("out", "dunklsolve_out"))),
        raw=raw,
    )


# -- output helpers -----------------------------------------------------------------------


def _write_csv(path: Path, header, rows):
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])


def _coord_header(d, last):
    return [f"x{i + 1}" for i in range(d)] + list(last)


def _write_summary(out: Path, summary: dict) -> Path:
    out.mkdir(parents=True, exist_ok=True)
    path = out / "summary.json"
    path.write_text(json.dumps(_jsonable(summary), indent=2, allow_nan=True), encoding="utf-8")
    return path


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


def _need_boundary(cfg):
    if cfg.boundary is None:
        raise ConfigError("boundary.expression is required for this command")
    return cfg.boundary


def _log(msg):
    print(msg, file=sys.stderr)


# -- commands -----------------------------------------------------------------------------


def cmd_validate(cfg: RunConfig):
    report = check_admissible(cfg.domain, cfg.root_system, delta=cfg.delta, h=cfg.h)
    _log(report.summary())
    summary = {"command": "validate", "h": cfg.h, "admissibility": report.as_dict()}
    return (EXIT_OK if report.passed else EXIT_ADMISSIBILITY), summary


def _run_method(cfg, method, h):
    solver = dd.solve_reduction if method == "reduction" else dd.solve_direct
    return solver(cfg.domain, cfg.root_system, cfg.boundary, h, delta=cfg.delta, rtol=cfg.residual_tol)


def _methods(name):
    if name not in ("reduction", "direct", "both"):
        raise ConfigError(f"unknown method {name!r}")
    return ["reduction", "direct"] if name == "both" else [name]


def cmd_solve(cfg: RunConfig):
    _need_boundary(cfg)
    opts = cfg.section("solve")
    methods = _methods(opts.get("method", "reduction"))
    cfg.out.mkdir(parents=True, exist_ok=True)
    exact = ScalarField.from_expression(cfg.boundary, cfg.dimension)
    summary = {"command": "solve", "h": cfg.h, "boundary": cfg.boundary, "methods": {}}
    sols = {}
    for m in methods:
        sol = _run_method(cfg, m, cfg.h)
        sols[m] = sol
        pts, vals = sol.field.points_and_values()
        path = cfg.out / f"solution_{m}.csv"
        _write_csv(path, _coord_header(cfg.dimension, ["value"]), np.column_stack([pts, vals]))
        summary["methods"][m] = {
            "csv": str(path),
            "n_interior": sol.grid.interior.size,
            "n_ring": sol.grid.ring.size,
            "relative_residual": sol.residual,
            "max_abs_diff_vs_boundary_expression": float(
                np.max(np.abs(sol.interior - exact(sol.grid.interior_points)))
            ),
        }
        _log(f"{m}: {sol.grid.interior.size} interior nodes, residual {sol.residual:.2e}")
    if len(sols) == 2:
        diff = float(np.max(np.abs(sols["reduction"].interior - sols["direct"].interior)))
        summary["cross_solver_max_diff"] = diff
        _log(f"max |reduction - direct| = {diff:.3e}")
    return EXIT_OK, summary


def cmd_measure(cfg: RunConfig):
    opts = cfg.section("measure")
    if "point" not in opts:
        raise ConfigError("measure.point is required")
    x = np.asarray(opts["point"], dtype=float)
    try:
        hm = dd.harmonic_measure(cfg.domain, cfg.root_system, x, cfg.h, delta=cfg.delta, rtol=cfg.residual_tol)
    except ValueError as exc:
        if isinstance(exc, AdmissibilityError):
            raise
        raise ConfigError(str(exc)) from exc
    cfg.out.mkdir(parents=True, exist_ok=True)
    d = cfg.dimension
    bpath = cfg.out / "measure_boundary.csv"
    _write_csv(bpath, _coord_header(d, ["weight"]), np.column_stack([hm.grid.ring_points, hm.boundary_weights]))
    dens = {}
    for j, root in enumerate(hm.roots):
        p = cfg.out / f"measure_density_root{int(root)}.csv"
        _write_csv(
            p,
            _coord_header(d, ["density", "mass"]),
            np.column_stack([hm.images[:, j, :], hm.densities[:, j], hm.masses[:, j]]),
        )
        dens[int(root)] = str(p)
    summary = {"command": "measure", **hm.as_dict(), "boundary_csv": str(bpath), "density_csv": dens}
    summary["decomposition_residual"] = hm.decomposition_residual(cfg.root_system)
    if cfg.boundary is not None:
        f = dd.boundary_data(cfg.boundary, cfg.domain)
        paired = hm.pair(f)
        solved = dd.solve_reduction(cfg.domain, cfg.root_system, f, cfg.h, delta=cfg.delta).at(hm.point)
        summary["pairing"] = {
            "measure_value": paired,
            "solve_value": solved,
            "relative_difference": abs(paired - solved) / max(abs(solved), 1e-300),
        }
    _log(f"total mass {hm.total_mass:.15g} (boundary {hm.boundary_mass:.6g})")
    return EXIT_OK, summary


def cmd_convergence(cfg: RunConfig):
    _need_boundary(cfg)
    opts = cfg.section("convergence")
    levels = int(opts.get("levels", 3))
    if levels < 2:
        raise ConfigError("convergence.levels must be >= 2")
    methods = _methods(opts.get("method", "reduction"))
    reference = opts.get("reference", "boundary")
    hs = ladder(cfg.h, levels)
    cfg.out.mkdir(parents=True, exist_ok=True)
    if reference == "self":
        exact = None
    else:
        text = cfg.boundary if reference == "boundary" else reference
        try:
            exact = ScalarField.from_expression(text, cfg.dimension)
        except ExprError as exc:
            raise ConfigError(f"convergence.reference: {exc}") from exc
    summary = {"command": "convergence", "h": hs, "reference": reference, "methods": {}}
    per_method = {}
    for m in methods:
        sols = [_run_method(cfg, m, h) for h in hs]
        per_method[m] = sols
        if exact is not None:
            errors = [float(np.max(np.abs(s.interior - exact(s.grid.interior_points)))) for s in sols]
            eh = hs
        else:
            pts = sols[0].grid.interior_points
            vals = [restrict(s.interior, s.grid, pts) for s in sols]
            errors = [float(np.max(np.abs(vals[i] - vals[i + 1]))) for i in range(levels - 1)]
            eh = hs[:-1]
        orders = [float("nan")] + empirical_orders(errors, eh).tolist()
        path = cfg.out / f"convergence_{m}.csv"
        _write_csv(
            path,
            ["level", "h", "n_interior", "error", "order"],
            [(i, eh[i], sols[i].grid.interior.size, errors[i], orders[i]) for i in range(len(errors))],
        )
        summary["methods"][m] = {"csv": str(path), "errors": errors, "orders": orders[1:]}
        _log(f"{m}: errors {['%.3e' % e for e in errors]} orders {['%.3f' % o for o in orders[1:]]}")
    if len(per_method) == 2:
        diffs = [
            float(np.max(np.abs(a.interior - b.interior)))
            for a, b in zip(per_method["reduction"], per_method["direct"])
        ]
        summary["cross_solver"] = {"diffs": diffs, "orders": empirical_orders(diffs, hs).tolist()}
    return EXIT_OK, summary


def _random_points(rs, rng, n, min_distance, radius):
    out = np.empty((0, rs.dimension))
    for _ in range(1000):
        cand = rng.uniform(-radius, radius, size=(4 * n, rs.dimension))
        keep = cand[rs.hyperplane_distance(cand) >= min_distance]
        out = np.vstack([out, keep])
        if len(out) >= n:
            return out[:n]
    raise ConfigError("could not sample enough points away from the hyperplanes")


def cmd_identities(cfg: RunConfig):
    rs = cfg.root_system
    opts = cfg.section("identities")
    rng = np.random.default_rng(cfg.seed)
    n = int(opts.get("points", 100))
    radius = float(opts.get("radius", 2.0))
    step = float(opts.get("step", 1e-3))
    tol_lemma = float(opts.get("lemma_tolerance", 1e-10))
    tol_id = float(opts.get("tolerance", 1e-6))
    phi_text = opts.get("phi", " + ".join(f"x{i + 1}^2" for i in range(rs.dimension)) + " + x1")
    try:
        phi = ScalarField.from_expression(phi_text, rs.dimension)
    except ExprError as exc:
        raise ConfigError(f"identities.phi: {exc}") from exc

    near = _random_points(rs, rng, n, float(opts.get("lemma_min_distance", 0.1)), radius)
    far = _random_points(rs, rng, n, float(opts.get("min_distance", 0.5)), radius)
    checks = {
        "dunkl_lemma": (float(np.max(np.abs(rs.dunkl_lemma_residual(near)))), tol_lemma),
        "grad_sqrt_weight": (
            float(np.max(np.abs(fd_gradient(rs.sqrt_weight, far, step, order=4) - rs.sqrt_weight_gradient(far)))),
            tol_id,
        ),
        "laplacian_sqrt_weight": (
            float(np.max(np.abs(fd_laplacian(rs.sqrt_weight, far, step, order=4) - rs.sqrt_weight_laplacian(far)))),
            tol_id,
        ),
        "conjugation": (
            float(np.max(np.abs(conjugation_residual(rs, phi, far[: max(1, n // 2)], step)))),
            tol_id,
        ),
    }
    validation = rs.validate()
    ok = True
    for name, (val, tol) in checks.items():
        good = val <= tol
        ok &= good
        _log(f"{'PASS' if good else 'FAIL'} {name}: {val:.3e} (tol {tol:.1e})")
    _log(f"root system closed: {validation.closed}, orbit-invariant k: {validation.orbit_invariant}")
    summary = {
        "command": "identities",
        "seed": cfg.seed,
        "checks": {k: {"max_abs": v, "tolerance": t, "passed": v <= t} for k, (v, t) in checks.items()},
        "root_system_closed": validation.closed,
        "orbit_invariant": validation.orbit_invariant,
        "passed": bool(ok),
    }
    return (EXIT_OK if ok else EXIT_ADMISSIBILITY), summary


COMMANDS = {
    "validate": cmd_validate,
    "solve": cmd_solve,
    "measure": cmd_measure,
    "convergence": cmd_convergence,
    "identities": cmd_identities,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="dunklsolve", description="Dirichlet problems for the Dunkl Laplacian")
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("--config", required=True, help="JSON run configuration")
    p.add_argument("--out", help="output directory (overrides config 'out')")
    p.add_argument("--seed", type=int)
    p.add_argument("--method", choices=["reduction", "direct", "both"])
    p.add_argument("--levels", type=int)
    p.add_argument("--h", type=float, help="grid spacing (overrides config grid)")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    overrides = {"out": args.out, "seed": args.seed, "method": args.method, "levels": args.levels, "h": args.h}
    summary = {"command": args.command}
    out = Path(args.out) if args.out else Path("dunklsolve_out")
    try:
        cfg = load_config(args.config, overrides)
        out = cfg.out
        code, summary = COMMANDS[args.command](cfg)
    except (ConfigError, ExprError, EmptyInteriorError) as exc:
        _log(f"configuration error: {exc}")
        code, summary["error"] = EXIT_CONFIG, str(exc)
    except AdmissibilityError as exc:
        _log(str(exc))
        code, summary["error"] = EXIT_ADMISSIBILITY, str(exc)
        if exc.report is not None:
            summary["admissibility"] = exc.report.as_dict()
    except SolverError as exc:
        _log(f"solver failure: {exc}")
        code, summary["error"] = EXIT_SOLVER, str(exc)
    except ValueError as exc:
        _log(f"configuration error: {exc}")
        code, summary["error"] = EXIT_CONFIG, str(exc)
    summary["exit_code"] = code
    print(_write_summary(out, summary))
    return code


if __name__ == "__main__":
    sys.exit(main())
