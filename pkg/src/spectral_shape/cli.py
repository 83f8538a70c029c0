"""Configuration-driven command line frontend.

Config files are line-oriented ``key = value`` pairs under ``[section]``
headers (``#`` comments).  Every run writes ``resolved-config.txt`` (the
fully defaulted configuration, reparseable to reproduce the run bit for
bit), ``eigenvalues.csv`` / ``sweep.csv`` / ``report.txt`` depending on the
mode, ``boundary.svg`` for the discretized domain, and optional PPM
eigenfunction heatmaps.

Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""

import argparse
import json
import sys
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional

import numpy as np

from . import bem, geometry, optimize, oracles
from .beyn import BeynConfig, Contour, beyn_solve
from .errors import ConfigError, ParseError, SpectralShapeError, ValidationError

_MODES = ("neumann-eigs", "ite-eigs", "optimize-neumann", "optimize-ite",
          "sweep", "ite-compare", "oracle")


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class RunConfig:
    mode: str
    geometry_type: str = "equipotential"        # equipotential | circles
    centers: tuple = ()
    alpha: float = 1.0
    level: float = 1.0
    circles: tuple = ()
    n: int = 512
    contour: Contour = field(default_factory=lambda: Contour(2.5, 2.0, 0.25, 32))
    solver: BeynConfig = field(default_factory=BeynConfig)
    precondition: str = "auto"                  # auto | on | off
    refraction: Optional[float] = None
    k: int = 1
    x0_alpha: float = 2.0
    x0_c: float = 1.7
    simplex_scale: float = 0.05
    max_evals: int = 200
    search_n: int = 128
    refine_n: int = 0          # 0 disables the mid-fidelity refinement
    sweep_alpha: float = 2.0
    sweep_c_min: float = 1.0
    sweep_c_max: float = 2.0
    sweep_points: int = 50
    output_dir: str = "out"
    heatmaps: tuple = ()
    grid: int = 200
    oracle_radius: float = 1.0
    oracle_k_max: int = 10


def _parse_sections(text):
    sections = {}
    current = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            current = line[1:-1].strip().lower()
            sections.setdefault(current, {})
            continue
        if "=" not in line:
            raise ParseError(f"line {lineno}: expected 'key = value', got "
                             f"{raw.strip()!r}")
        if current is None:
            raise ParseError(f"line {lineno}: key outside any [section]")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            raise ParseError(f"line {lineno}: empty key")
        sections[current][key.lower()] = (value, lineno)
    return sections


def _take(sections, section, key, conv, default=None, required=False):
    entry = sections.get(section, {}).pop(key, None)
    if entry is None:
        if required:
            raise ValidationError(f"missing required key '{key}' in "
                                  f"[{section}]")
        return default
    value, lineno = entry
    try:
        return conv(value)
    except (ValueError, TypeError) as exc:
        raise ParseError(f"line {lineno}: bad value for {section}.{key}: "
                         f"{exc}") from exc


def _qfloat(text):
    """Parse a float quantized to the 10-significant-digit canonical form.

    Configs echo back through resolved-config.txt with %.10g formatting;
    quantizing on input makes that file an exact fixed point, so re-running
    it reproduces the original run bit for bit.
    """
    return float(f"{float(text):.10g}")


def _pairs(text):
    out = []
    for chunk in text.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        parts = [_qfloat(p) for p in chunk.split(",")]
        if len(parts) != 2:
            raise ValueError(f"expected 'x,y' pairs, got {chunk!r}")
        out.append(tuple(parts))
    return tuple(out)


def _triples(text):
    out = []
    for chunk in text.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        parts = [_qfloat(p) for p in chunk.split(",")]
        if len(parts) != 3:
            raise ValueError(f"expected 'cx,cy,r' triples, got {chunk!r}")
        out.append(tuple(parts))
    return tuple(out)


def _int_list(text):
    return tuple(int(p) for p in text.split(",") if p.strip())


def parse_config(path):
    """Parse and validate a run configuration file."""
    path = Path(path)
    if not path.exists():
        raise ParseError(f"config file {path} does not exist")
    sections = _parse_sections(path.read_text())

    mode = _take(sections, "run", "mode", str, required=True).lower()
    if mode not in _MODES:
        raise ValidationError(f"mode must be one of {_MODES}, got {mode!r}")

    geometry_type = _take(sections, "geometry", "type", str,
                          default="equipotential").lower()
    if geometry_type not in ("equipotential", "circles"):
        raise ValidationError("geometry type must be 'equipotential' or "
                              "'circles'")
    centers = _take(sections, "geometry", "centers", _pairs, default=())
    alpha = _take(sections, "geometry", "alpha", _qfloat, default=1.0)
    level = _take(sections, "geometry", "level", _qfloat, default=1.0)
    circles = _take(sections, "geometry", "circles", _triples, default=())

    n = _take(sections, "discretization", "n", int, default=512)
    if n % 2 != 0:
        raise ValidationError("n must be even")
    if n < 8:
        raise ValidationError("n must be at least 8")

    contour = Contour(
        center=complex(_take(sections, "contour", "center_re", _qfloat,
                             default=2.5),
                       _take(sections, "contour", "center_im", _qfloat,
                             default=0.0)),
        radius_x=_take(sections, "contour", "radius_re", _qfloat, default=2.0),
        radius_y=_take(sections, "contour", "radius_im", _qfloat, default=0.25),
        nodes=_take(sections, "contour", "nodes", int, default=32))

    solver = BeynConfig(
        probe_columns=_take(sections, "solver", "probe_columns", int,
                            default=16),
        rank_tol=_take(sections, "solver", "rank_tol", _qfloat, default=1e-8),
        residual_tol=_take(sections, "solver", "residual_tol", _qfloat,
                           default=1e-6),
        rng_seed=_take(sections, "solver", "seed", int, default=1))
    precondition = _take(sections, "solver", "precondition", str,
                         default="auto").lower()
    if precondition not in ("auto", "on", "off"):
        raise ValidationError("solver precondition must be auto, on, or off")

    refraction = _take(sections, "refraction", "value", _qfloat, default=None)

    cfg = RunConfig(
        mode=mode, geometry_type=geometry_type, centers=centers, alpha=alpha,
        level=level, circles=circles, n=n, contour=contour, solver=solver,
        precondition=precondition, refraction=refraction,
        k=_take(sections, "optimizer", "k", int, default=1),
        x0_alpha=_take(sections, "optimizer", "x0_alpha", _qfloat, default=2.0),
        x0_c=_take(sections, "optimizer", "x0_c", _qfloat, default=1.7),
        simplex_scale=_take(sections, "optimizer", "simplex_scale", _qfloat,
                            default=0.05),
        max_evals=_take(sections, "optimizer", "max_evals", int, default=200),
        search_n=_take(sections, "optimizer", "search_n", int, default=128),
        refine_n=_take(sections, "optimizer", "refine_n", int, default=0),
        sweep_alpha=_take(sections, "sweep", "alpha", _qfloat, default=2.0),
        sweep_c_min=_take(sections, "sweep", "c_min", _qfloat, default=1.0),
        sweep_c_max=_take(sections, "sweep", "c_max", _qfloat, default=2.0),
        sweep_points=_take(sections, "sweep", "points", int, default=50),
        output_dir=_take(sections, "output", "directory", str, default="out"),
        heatmaps=_take(sections, "output", "heatmaps", _int_list, default=()),
        grid=_take(sections, "output", "grid", int, default=200),
        oracle_radius=_take(sections, "oracle", "radius", _qfloat, default=1.0),
        oracle_k_max=_take(sections, "oracle", "k_max", int, default=10))

    leftovers = [(s, k) for s, entries in sections.items()
                 for k in entries]
    if leftovers:
        sec, key = leftovers[0]
        raise ValidationError(f"unknown key '{key}' in [{sec}]")
    _validate(cfg)
    return cfg


def _validate(cfg):
    needs_geometry = cfg.mode in ("neumann-eigs", "ite-eigs", "optimize-neumann",
                                  "optimize-ite", "sweep", "ite-compare")
    if needs_geometry:
        if cfg.geometry_type == "equipotential" and not cfg.centers:
            raise ValidationError("equipotential geometry needs centers")
        if cfg.geometry_type == "circles" and not cfg.circles:
            raise ValidationError("circle geometry needs circles")
    if cfg.mode in ("optimize-neumann", "optimize-ite", "sweep") \
            and cfg.geometry_type != "equipotential":
        raise ValidationError(f"mode {cfg.mode} requires equipotential "
                              "geometry")
    if cfg.mode in ("ite-eigs", "optimize-ite", "ite-compare") \
            and cfg.refraction is None:
        raise ValidationError(f"mode {cfg.mode} requires [refraction] value")
    if cfg.k < 1:
        raise ValidationError("k must be >= 1")
    if cfg.grid < 8:
        raise ValidationError("heatmap grid must be at least 8")
    if not cfg.contour.excludes_origin() and cfg.mode != "oracle":
        raise ValidationError("contour must exclude kappa = 0")


def dump_config(cfg):
    """Canonical text form of a fully resolved config (reparseable)."""
    fmt = lambda x: f"{x:.10g}"
    lines = ["[run]", f"mode = {cfg.mode}", "", "[geometry]",
             f"type = {cfg.geometry_type}"]
    if cfg.centers:
        lines.append("centers = " + "; ".join(
            f"{fmt(x)},{fmt(y)}" for x, y in cfg.centers))
    lines.append(f"alpha = {fmt(cfg.alpha)}")
    lines.append(f"level = {fmt(cfg.level)}")
    if cfg.circles:
        lines.append("circles = " + "; ".join(
            f"{fmt(cx)},{fmt(cy)},{fmt(r)}" for cx, cy, r in cfg.circles))
    lines += ["", "[discretization]", f"n = {cfg.n}", "", "[contour]",
              f"center_re = {fmt(cfg.contour.center.real)}",
              f"center_im = {fmt(cfg.contour.center.imag)}",
              f"radius_re = {fmt(cfg.contour.radius_x)}",
              f"radius_im = {fmt(cfg.contour.radius_y)}",
              f"nodes = {cfg.contour.nodes}", "", "[solver]",
              f"probe_columns = {cfg.solver.probe_columns}",
              f"rank_tol = {fmt(cfg.solver.rank_tol)}",
              f"residual_tol = {fmt(cfg.solver.residual_tol)}",
              f"seed = {cfg.solver.rng_seed}",
              f"precondition = {cfg.precondition}"]
    if cfg.refraction is not None:
        lines += ["", "[refraction]", f"value = {fmt(cfg.refraction)}"]
    lines += ["", "[optimizer]", f"k = {cfg.k}",
              f"x0_alpha = {fmt(cfg.x0_alpha)}", f"x0_c = {fmt(cfg.x0_c)}",
              f"simplex_scale = {fmt(cfg.simplex_scale)}",
              f"max_evals = {cfg.max_evals}", f"search_n = {cfg.search_n}",
              f"refine_n = {cfg.refine_n}",
              "", "[sweep]", f"alpha = {fmt(cfg.sweep_alpha)}",
              f"c_min = {fmt(cfg.sweep_c_min)}",
              f"c_max = {fmt(cfg.sweep_c_max)}",
              f"points = {cfg.sweep_points}", "", "[output]",
              f"directory = {cfg.output_dir}"]
    if cfg.heatmaps:
        lines.append("heatmaps = " + ",".join(str(h) for h in cfg.heatmaps))
    lines += [f"grid = {cfg.grid}", "", "[oracle]",
              f"radius = {fmt(cfg.oracle_radius)}",
              f"k_max = {cfg.oracle_k_max}"]
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# artifact writers
# ---------------------------------------------------------------------------
def emit_boundary_svg(mesh, path):
    """Closed quadratic-Bezier path per mesh component, unit-scaled viewBox."""
    curves = mesh.curves if isinstance(mesh, geometry.BoundaryMesh) else [mesh]
    all_nodes = np.concatenate([c.nodes for c in curves])
    lo = all_nodes.min(axis=0)
    hi = all_nodes.max(axis=0)
    span = float(max(hi - lo)) or 1.0
    scale = 0.9 / span
    shift = 0.05 + scale * (0.5 * (span - (hi - lo)) - lo)

    def map_pt(p):
        q = shift + scale * p
        return q[0], 1.0 - q[1]

    paths = []
    for curve in curves:
        idx = curve.elements
        x0, y0 = map_pt(curve.nodes[idx[0, 0]])
        cmds = [f"M {x0:.6f} {y0:.6f}"]
        for e in range(curve.n_elements):
            p0, p1, p2 = curve.nodes[idx[e]]
            ctrl = 2.0 * p1 - 0.5 * (p0 + p2)   # Bezier control of the parabola
            cx, cy = map_pt(ctrl)
            ex, ey = map_pt(p2)
            cmds.append(f"Q {cx:.6f} {cy:.6f} {ex:.6f} {ey:.6f}")
        cmds.append("Z")
        paths.append(f'  <path d="{" ".join(cmds)}" fill="none" '
                     'stroke="black" stroke-width="0.004"/>')
    body = ('<?xml version="1.0" encoding="UTF-8"?>\n'
            '<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
            'viewBox="0 0 1 1">\n' + "\n".join(paths) + "\n</svg>\n")
    Path(path).write_text(body)


def emit_heatmap(values, path):
    """Binary PPM (P6) of a 2D |u| grid; NaN cells render white.

    Gray levels are linear in |u| normalized by the per-image maximum,
    which is recorded in the header comment.
    """
    values = np.asarray(values, dtype=float)
    if values.ndim != 2 or values.size == 0:
        raise ValueError("heatmap needs a non-empty 2D grid")
    mask = np.isnan(values)
    vmax = float(np.nanmax(np.abs(values))) if not mask.all() else 0.0
    if vmax > 0:
        gray = np.round(255.0 * np.abs(values) / vmax)
    else:
        gray = np.zeros_like(values)
    gray = np.where(mask, 255.0, gray).astype(np.uint8)
    h, w = gray.shape
    header = (f"P6\n# linear grayscale of |u|, normalized by max |u| "
              f"= {vmax:.10g}\n{w} {h}\n255\n")
    rgb = np.repeat(gray[:, :, None], 3, axis=2)
    with open(path, "wb") as fh:
        fh.write(header.encode("ascii"))
        fh.write(rgb.tobytes())


def _points_in_curves(points, curves, samples=2048):
    """Interior test against densely sampled components."""
    inside = np.zeros(len(points), dtype=bool)
    for curve in curves:
        inside |= geometry.points_inside_polygon(points,
                                                 curve.dense_points(samples))
    return inside


def _eigenvalue_rows(result, area):
    rows = []
    for cluster in result.clusters:
        kappa = cluster.value
        lam = kappa ** 2
        residual = float(np.max(result.residuals[list(cluster.members)]))
        rows.append((kappa.real, kappa.imag, lam.real, lam.imag,
                     abs(lam) * area, cluster.multiplicity, residual))
    rows.sort(key=lambda r: (np.hypot(r[0], r[1]), r[1]))
    return rows


def _write_csv(path, header, rows):
    fmt = lambda x: f"{x:.10g}" if isinstance(x, float) else str(x)
    lines = [",".join(header)]
    lines += [",".join(fmt(v) for v in row) for row in rows]
    Path(path).write_text("\n".join(lines) + "\n")


# ---------------------------------------------------------------------------
# run modes
# ---------------------------------------------------------------------------
def _build_mesh(cfg, n=None):
    n = n if n is not None else cfg.n
    if cfg.geometry_type == "circles":
        return geometry.mesh_from_circles(
            [((cx, cy), r) for cx, cy, r in cfg.circles], n)
    spec = geometry.EquipotentialSpec(np.array(cfg.centers), cfg.alpha,
                                      cfg.level)
    return geometry.mesh_from_spec(spec, n)


def _solver_for(cfg, transmission):
    pre = {"auto": transmission, "on": True, "off": False}[cfg.precondition]
    return replace(cfg.solver, precondition=pre)


def _write_heatmaps(cfg, outdir, mesh, result, transmission=False):
    if not cfg.heatmaps or result.is_empty:
        return
    nodes = np.concatenate([c.nodes for c in mesh.curves])
    lo, hi = nodes.min(axis=0), nodes.max(axis=0)
    pad = 0.02 * float(max(hi - lo))
    xs = np.linspace(lo[0] - pad, hi[0] + pad, cfg.grid)
    ys = np.linspace(lo[1] - pad, hi[1] + pad, cfg.grid)
    gx, gy = np.meshgrid(xs, ys)
    pts = np.column_stack([gx.ravel(), gy.ravel()])
    inside = _points_in_curves(pts, mesh.curves)
    # keep a safety margin from the boundary for the potential evaluation
    bdry = np.concatenate([c.dense_points(1024) for c in mesh.curves])
    dmin = np.min(np.linalg.norm(pts[:, None, :] - bdry[None, :, :], axis=2),
                  axis=1)
    ok = inside & (dmin > 3e-3)
    for k in cfg.heatmaps:
        if k < 1 or k > len(result.clusters):
            continue
        cluster = result.clusters[k - 1]
        kappa = result.eigenvalues[cluster.members[0]]
        density = result.eigenvectors[:, cluster.members[0]]
        if transmission:
            # first block holds the density of w = SL at kappa*sqrt(n)
            density = density[:mesh.total_nodes]
            kappa = kappa * np.sqrt(cfg.refraction)
        grid = np.full(len(pts), np.nan)
        grid[ok] = np.abs(bem.evaluate_interior(mesh, kappa, density,
                                                pts[ok]))
        emit_heatmap(grid.reshape(cfg.grid, cfg.grid)[::-1, :],
                     outdir / f"eigenfunction_{k}.ppm")


def run(cfg, output_dir=None):
    """Execute one configured run; writes artifacts, returns exit code 0."""
    outdir = Path(output_dir or cfg.output_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    if output_dir is not None:
        cfg = replace(cfg, output_dir=str(output_dir))
    (outdir / "resolved-config.txt").write_text(dump_config(cfg))

    if cfg.mode in ("neumann-eigs", "ite-eigs"):
        mesh = _build_mesh(cfg)
        transmission = cfg.mode == "ite-eigs"
        if transmission:
            operator = bem.transmission_operator(
                mesh, bem.TransmissionConfig(cfg.refraction))
        else:
            operator = bem.neumann_operator(mesh)
        result = beyn_solve(operator, cfg.contour,
                            _solver_for(cfg, transmission))
        _write_csv(outdir / "eigenvalues.csv",
                   ["re_kappa", "im_kappa", "re_lambda", "im_lambda",
                    "lambda_times_area", "multiplicity", "residual"],
                   _eigenvalue_rows(result, mesh.total_area))
        emit_boundary_svg(mesh, outdir / "boundary.svg")
        _write_heatmaps(cfg, outdir, mesh, result, transmission=transmission)
        return 0

    if cfg.mode in ("optimize-neumann", "optimize-ite"):
        mode = (optimize.MAXIMIZE_NEUMANN if cfg.mode == "optimize-neumann"
                else optimize.MINIMIZE_ABS_ITE)
        spec = optimize.ObjectiveSpec(
            centers=cfg.centers, k=cfg.k, mode=mode,
            refraction=cfg.refraction, mesh_n=cfg.n, window=cfg.contour,
            solver=_solver_for(cfg, mode == optimize.MINIMIZE_ABS_ITE))
        opts = optimize.NelderMeadOptions(
            simplex_scale=cfg.simplex_scale, max_evals=cfg.max_evals,
            maximize=(mode == optimize.MAXIMIZE_NEUMANN))
        report = optimize.optimize_shape(
            spec, (cfg.x0_alpha, cfg.x0_c), opts, search_n=cfg.search_n,
            refine_n=cfg.refine_n or None)
        lines = [f"mode: {cfg.mode}",
                 f"final alpha = {report.best_params[0]:.10g}",
                 f"final c     = {report.best_params[1]:.10g}",
                 f"objective   = {report.best_value:.10g}  "
                 f"(search fidelity n={report.search_n}: "
                 f"{report.search_value:.10g})",
                 "cluster     = " + ", ".join(f"{v:.10g}"
                                              for v in report.cluster),
                 f"termination = {report.termination}", "", "trace:"]
        lines += report.trace_lines()
        (outdir / "report.txt").write_text("\n".join(lines) + "\n")
        best = geometry.EquipotentialSpec(np.array(cfg.centers),
                                          *report.best_params)
        emit_boundary_svg(geometry.mesh_from_spec(best, cfg.n),
                          outdir / "boundary.svg")
        return 0

    if cfg.mode == "sweep":
        spec = optimize.ObjectiveSpec(
            centers=cfg.centers, k=cfg.k, mode=optimize.MAXIMIZE_NEUMANN,
            mesh_n=cfg.n, window=cfg.contour,
            solver=_solver_for(cfg, False))
        report = optimize.sweep_fixed_alpha(
            spec, cfg.sweep_alpha, (cfg.sweep_c_min, cfg.sweep_c_max),
            points=cfg.sweep_points, search_n=cfg.search_n)
        _write_csv(outdir / "sweep.csv", ["c", "objective"],
                   [(float(c), float(v)) for c, v in report.table])
        lines = [f"alpha fixed = {report.alpha:.10g}",
                 f"optimal c   = {report.best_c:.10g}",
                 f"objective   = {report.best_value:.10g}",
                 "cluster     = " + ", ".join(f"{v:.10g}"
                                              for v in report.cluster)]
        (outdir / "report.txt").write_text("\n".join(lines) + "\n")
        best = geometry.EquipotentialSpec(np.array(cfg.centers),
                                          cfg.sweep_alpha, report.best_c)
        emit_boundary_svg(geometry.mesh_from_spec(best, cfg.n),
                          outdir / "boundary.svg")
        return 0

    if cfg.mode == "ite-compare":
        mesh = _build_mesh(cfg)
        rows = optimize.ite_circle_comparison(
            [mesh], cfg.refraction, cfg.contour,
            solver=_solver_for(cfg, True))
        _write_csv(outdir / "ite_compare.csv",
                   ["domain", "lambda_real_times_area",
                    "lambda_abs_times_area"],
                   [(i, float(a), float(b)) for i, a, b in rows])
        emit_boundary_svg(mesh, outdir / "boundary.svg")
        return 0

    if cfg.mode == "oracle":
        eigs = oracles.disk_neumann_eigenvalues(cfg.oracle_radius,
                                                cfg.oracle_k_max)
        _write_csv(outdir / "oracle_neumann.csv",
                   ["kappa", "multiplicity", "lambda_times_area"],
                   [(float(k), int(m),
                     float(k * k * np.pi * cfg.oracle_radius ** 2))
                    for k, m in eigs])
        if cfg.refraction is not None:
            res = oracles.disk_ite_eigenvalues(cfg.oracle_radius,
                                               cfg.refraction, cfg.contour)
            area = np.pi * cfg.oracle_radius ** 2
            _write_csv(outdir / "oracle_ite.csv",
                       ["re_kappa", "im_kappa", "order",
                        "lambda_abs_times_area"],
                       [(float(v.real), float(v.imag), int(o),
                         float(abs(v) ** 2 * area))
                        for v, o in zip(res.eigenvalues, res.orders)])
        return 0

    raise ValidationError(f"unhandled mode {cfg.mode!r}")


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="spectral-shape",
        description="Boundary-integral eigenvalue computations and shape "
                    "optimization for planar domains.")
    parser.add_argument("config", help="path to a run configuration file")
    parser.add_argument("--output-dir", default=None,
                        help="override the configured output directory")
    parser.add_argument("--threads", type=int, default=None,
                        help="cap BLAS thread count (needs threadpoolctl)")
    args = parser.parse_args(argv)

    if args.threads is not None:
        try:
            import threadpoolctl
            threadpoolctl.threadpool_limits(args.threads)
        except ImportError:
            print("warning: --threads ignored (threadpoolctl not installed)",
                  file=sys.stderr)

    def fail(exc, code):
        record = {"error": type(exc).__name__, "message": str(exc)}
        print(json.dumps(record), file=sys.stderr)
        try:
            outdir = Path(args.output_dir or "out")
            outdir.mkdir(parents=True, exist_ok=True)
            (outdir / "error.json").write_text(json.dumps(record) + "\n")
        except OSError:
            pass
        return code

    try:
        cfg = parse_config(args.config)
    except ConfigError as exc:
        return fail(exc, 2)
    try:
        return run(cfg, output_dir=args.output_dir)
    except ConfigError as exc:
        return fail(exc, 2)
    except (SpectralShapeError, np.linalg.LinAlgError, OSError) as exc:
        return fail(exc, 3)


if __name__ == "__main__":
    sys.exit(main())
