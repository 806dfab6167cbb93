"""Command-line interface: classify, invariants, mesh, trace, report-all.

Every command builds a JSON report.  The exit status is 0 exactly when the
report has no errors; hypothesis failures of closed forms (a surface that is
not in curvature-line coordinates, say) are recorded as warnings.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import catalog, edge, focal, geometry, parallel
from .edge import DegenerateSeed, NotCuspidalEdge, TraceError
from .expr import ExprError, SurfaceExpr, parse_surface
from .geometry import GeometryError, local_geometry
from .jets import DEFAULT_ORDER, ZERO_TOL
from .report import MeshObject, PolylineObject, Report, write_obj
from .singularities import FIRST_ORDER_TAGS, SECOND_ORDER_TAGS, NotSingular, Tag

DEFAULT_WINDOW = (-0.5, 0.5, -0.5, 0.5)
DEFAULT_RES = 64
#: focal vertices farther than this many base-mesh radii from the origin are clipped
FOCAL_CLIP_FACTOR = 10.0


@dataclass
class AnalysisJob:
    surface: str
    point: tuple[float, float] = (0.0, 0.0)
    t: Optional[float] = None
    branch: Optional[int] = None
    order: int = DEFAULT_ORDER
    tol: float = ZERO_TOL
    window: tuple[float, float, float, float] = DEFAULT_WINDOW
    res: int = DEFAULT_RES
    out: Optional[str] = None
    name: Optional[str] = None

    def config(self) -> dict:
        d = asdict(self)
        d.pop("out")
        d.pop("name")
        return d


def _surface_text(spec: str) -> str:
    if spec in catalog.SURFACES:
        return catalog.SURFACES[spec]
    if spec.startswith("@"):
        return Path(spec[1:]).read_text(encoding="utf-8").strip()
    return spec


def _pair(text) -> tuple[float, float]:
    if isinstance(text, str):
        parts = [p for p in text.replace(" ", "").split(",") if p]
    else:
        parts = list(text)
    if len(parts) != 2:
        raise ValueError(f"expected 'u,v', got {text!r}")
    return float(parts[0]), float(parts[1])


def _window(text) -> tuple[float, float, float, float]:
    if isinstance(text, str):
        parts = [float(p) for p in text.replace(" ", "").split(",") if p]
    else:
        parts = [float(p) for p in text]
    if len(parts) == 2:
        parts = [parts[0], parts[1], parts[0], parts[1]]
    if len(parts) != 4 or parts[0] >= parts[1] or parts[2] >= parts[3]:
        raise ValueError(f"window must be 'umin,umax[,vmin,vmax]' with min < max, got {text!r}")
    return tuple(parts)


def tolerance_profile(job: AnalysisJob) -> dict:
    return {
        "zero_tol": job.tol,
        "parallel_singular_tol": parallel.SING_TOL,
        "focal_singular_tol": focal.FOCAL_SING_TOL,
        "parabolic_tol": focal.PARABOLIC_TOL,
        "direction_tol": geometry.DIRECTION_TOL,
        "trace_tol": edge.TRACE_TOL,
        "on_curve_tol": edge.ON_CURVE_TOL,
        "jet_order": job.order,
    }


def build_job(args: argparse.Namespace) -> AnalysisJob:
    """Merge CLI flags over job-file fields over defaults."""
    data: dict = {}
    if getattr(args, "job", None):
        data = json.loads(Path(args.job).read_text(encoding="utf-8"))
        unknown = set(data) - {f.name for f in fields(AnalysisJob)}
        if unknown:
            raise ValueError(f"unknown job fields {sorted(unknown)}")
    for key in ("surface", "point", "t", "branch", "order", "tol", "window", "res", "out"):
        val = getattr(args, key, None)
        if val is not None:
            data[key] = val
    if "surface" not in data:
        raise ValueError("no surface given (use --surface or a job file)")
    job = AnalysisJob(surface=_surface_text(str(data["surface"])))
    job.name = data.get("name") or (data["surface"] if data["surface"] in catalog.SURFACES else None)
    if "point" in data:
        job.point = _pair(data["point"])
    if data.get("t") is not None:
        job.t = float(data["t"])
    if data.get("branch") is not None:
        job.branch = int(data["branch"])
        if job.branch not in (1, 2):
            raise ValueError("--branch must be 1 or 2")
    if data.get("order") is not None:
        job.order = int(data["order"])
        if job.order < 4:
            raise ValueError("--order must be at least 4")
    if data.get("tol") is not None:
        job.tol = float(data["tol"])
    if data.get("window") is not None:
        job.window = _window(data["window"])
    if data.get("res") is not None:
        job.res = int(data["res"])
    job.out = data.get("out")
    return job


# -- report sections -------------------------------------------------------------------

def _unit(d) -> list:
    v = np.array([d[0].value, d[1].value])
    return (v / np.linalg.norm(v)).tolist()


def principal_section(surface: SurfaceExpr, job: AnalysisJob) -> dict:
    g = local_geometry(surface, job.point, job.order)
    fd, pd = g.fd, g.principal
    k1, k2 = g.principal_values()
    return {
        "point": list(job.point),
        "f": fd.f.value.tolist(),
        "normal": fd.nu.value.tolist(),
        "kappa1": k1,
        "kappa2": k2,
        "umbilic": pd is None,
        "dir1": _unit(pd.dir1) if pd is not None else None,
        "dir2": _unit(pd.dir2) if pd is not None else None,
        "first_form": [fd.E.value, fd.F.value, fd.G.value],
        "second_form": [fd.L.value, fd.M.value, fd.N.value],
        "gaussian": fd.gaussian.value,
        "mean": fd.mean.value,
        "curvature_line": geometry.is_curvature_line(fd, job.tol),
    }



def parallel_section(surface, job: AnalysisJob, rep: Report, invariants: bool) -> dict:
    ps = parallel.make_parallel(surface, job.t)
    out: dict = {"t": job.t}
    cls = parallel.classify_parallel(ps, job.point, job.tol, job.order)
    out["classification"] = {"tag": str(cls.tag), "witness": cls.witness}
    if cls.tag == Tag.REGULAR:
        try:
            pc = parallel.parallel_curvatures(ps, job.point, job.order)
            out["curvatures"] = {"K": pc.K.value, "H": pc.H.value,
                                 "max_discrepancy": pc.max_discrepancy()}
        except parallel.SingularParallelPoint as exc:
            rep.warn("parallel.curvatures", str(exc))
        return out
    if cls.tag not in FIRST_ORDER_TAGS | SECOND_ORDER_TAGS:
        rep.warn("parallel", f"no invariants for a {cls.tag} point")
        return out
    out["germ_order"] = str(parallel.germ_order_of_identifier(ps, job.point, job.tol, job.order))
    out["boundedness"] = parallel.boundedness_report(ps, job.point, tol=job.tol).to_dict()
    if not invariants:
        return out
    inv: dict = {}
    closed = parallel.limiting_normal_curvature_parallel(ps, job.point, cross_check=False, tol=job.tol)
    inv["kappa_nu_closed_form"] = closed
    try:
        gen = parallel.generic_kappa_nu_parallel(ps, job.point, job.order)
        inv["kappa_nu"] = gen["kappa_nu"]
        inv["kappa_nu_method"] = gen["method"]
        inv["kappa_nu_delta"] = abs(gen["kappa_nu"] - closed)
        if "error_estimate" in gen:
            inv["kappa_nu_error_estimate"] = gen["error_estimate"]
    except NotCuspidalEdge as exc:
        rep.warn("parallel.kappa_nu", f"generic value unavailable: {exc}")
    if cls.tag == Tag.CUSPIDAL_EDGE:
        front = parallel.parallel_front(ps, cls.witness["branch"], job.order)
        r = edge.invariants_at(front, job.point, tol=job.tol)
        inv["kappa_s"] = r.kappa_s
        inv["sign_data"] = r.sign_data
    out["invariants"] = inv
    return out


def focal_section(surface, job: AnalysisJob, rep: Report, invariants: bool) -> dict:
    fs = focal.make_focal(surface, job.branch)
    out: dict = {"branch": job.branch}
    cls = focal.classify_focal(fs, job.point, job.tol, job.order)
    out["classification"] = {"tag": str(cls.tag), "witness": cls.witness}
    out["frontal_residual"] = focal.frontal_residual(fs, job.point, job.order)
    g = local_geometry(surface, job.point, job.order)
    curvature_line = geometry.is_curvature_line(g.fd, job.tol)
    if not curvature_line:
        rep.warn("focal.closed_forms", "curvature-line gate: F or M is nonzero, closed forms skipped")

    if cls.tag == Tag.REGULAR:
        if curvature_line and invariants:
            try:
                out["gaussian_curvature"] = focal.focal_gaussian_curvature(fs, job.point, order=job.order).to_dict()
            except focal.SingularFocalPoint as exc:
                rep.warn("focal.gaussian_curvature", str(exc))
        return out
    if cls.tag != Tag.CUSPIDAL_EDGE:
        rep.warn("focal", f"criteria give {cls.witness.get('criteria_tag')}; no theorem-backed tag assigned")
        return out
    if not invariants:
        return out
    r = focal.generic_focal_invariants(fs, job.point, job.order)
    inv = {"kappa_nu": r.kappa_nu, "kappa_s": r.kappa_s, "method": "generic", "sign_data": r.sign_data}
    if curvature_line:
        for key, fn in (("kappa_nu", focal.kn_focal_closed_form), ("kappa_s", focal.ks_focal_closed_form)):
            try:
                val = fn(fs, job.point)
                inv[f"{key}_closed_form"] = val
                inv[f"{key}_delta"] = abs(val - inv[key])
            except focal.HypothesisError as exc:
                rep.warn(f"focal.{key}_closed_form", f"{type(exc).__name__}: {exc}")
    out["invariants"] = inv
    return out


def _guarded(rep: Report, where: str, fn, *args):
    try:
        return fn(*args)
    except (GeometryError, NotSingular, TraceError, NotCuspidalEdge, ArithmeticError, AssertionError) as exc:
        rep.error(where, exc)
        return None


def run_job(job: AnalysisJob, command: str = "invariants") -> Report:
    """Parse, lift and analyse one job; ``command`` is 'classify' or 'invariants'."""
    rep = Report(command, {"surface": job.surface, "point": list(job.point), "t": job.t,
                           "branch": job.branch, "name": job.name},
                 job.config(), tolerance_profile(job))
    try:
        surface = parse_surface(job.surface)
    except ExprError as exc:
        rep.error("parse", exc)
        return rep
    flag = focal.lips_reading_flag(surface)
    if flag is not None:
        rep.warn("surface", f"lips example detected ({flag['detected']} reading); "
                            f"printed {flag['printed']}, normal-consistent {flag['normal_consistent']}")
        rep.sections["lips_reading"] = flag
    if job.t is None and job.branch is None and command != "principal":
        rep.warn("job", "neither t nor branch given; only principal data reported")
    principal = _guarded(rep, "principal", principal_section, surface, job)
    if principal is None:
        return rep
    rep.sections["principal"] = principal
    if principal["umbilic"]:
        rep.warn("principal", f"umbilic point at {tuple(job.point)}: principal directions undefined")
    invariants = command == "invariants"
    if job.t is not None:
        if job.t == 0:
            rep.error("parallel", ValueError("t must be nonzero"))
        else:
            sec = _guarded(rep, "parallel", parallel_section, surface, job, rep, invariants)
            if sec is not None:
                rep.sections["parallel"] = sec
    if job.branch is not None:
        sec = _guarded(rep, "focal", focal_section, surface, job, rep, invariants)
        if sec is not None:
            rep.sections["focal"] = sec
    return rep


# -- tracing ----------------------------------------------------------------------------

def _front_for(surface, job: AnalysisJob):
    """The front selected by the job (focal when a branch is given, else parallel)."""
    if job.branch is not None:
        return focal.focal_front(focal.make_focal(surface, job.branch), job.order)
    ps = parallel.make_parallel(surface, job.t)
    branch, info = parallel.active_branch(ps, job.point)
    if not branch:
        raise NotSingular(f"f^t has no rank-one singular point at {job.point}: {info}")
    return parallel.parallel_front(ps, branch, job.order)


def trace_curves(front, point, steps: int, h: float) -> list:
    fn = lambda q: front.identifier(q, front.trace_order)
    try:
        return [edge.trace_zero_curve(fn, point, steps=steps, h=h, both_ways=True)]
    except DegenerateSeed:
        seeds = edge.trace_from_critical(lambda q: front.identifier(q, front.order), point, steps=1, eps=h)
        out = []
        for br in seeds:
            start = br.samples[-1]
            c = edge.trace_zero_curve(fn, start, steps=steps, h=h, direction=br.tangents[-1])
            out.append(c)
        return out


def run_trace(job: AnalysisJob, steps: int = 20, h: float = 1e-2) -> Report:
    rep = run_job(job, "classify")
    rep.command = "trace"
    if not rep.ok:
        return rep
    surface = parse_surface(job.surface)
    try:
        front = _front_for(surface, job)
        curves = trace_curves(front, job.point, steps, h)
    except (GeometryError, NotSingular, TraceError) as exc:
        rep.error("trace", exc)
        return rep
    out = []
    for c in curves:
        reps = edge.invariants_along_curve(front, c, job.tol)
        images = [front.at(q, front.trace_order).map.value.tolist() for q in c.samples]
        out.append({
            **c.to_dict(),
            "images": images,
            "kappa_nu": [None if r is None else r.kappa_nu for r in reps],
            "kappa_s": [None if r is None else r.kappa_s for r in reps],
        })
    rep.sections["trace"] = {"front": front.name, "curves": out}
    return rep


# -- meshes ------------------------------------------------------------------------------

def _sample_row(args):
    surface_text, us, v, t, branch = args
    surface = parse_surface(surface_text)
    row_f, row_t, row_c, lam_rows = [], [], [], []
    for u in us:
        try:
            g = local_geometry(surface, (u, v), 2)
        except GeometryError:
            row_f.append(np.asarray(surface.evaluate((u, v)), dtype=float))
            row_t.append(None)
            row_c.append(None)
            lam_rows.append((np.nan, np.nan))
            continue
        f = g.fd.f.value
        nu = g.fd.nu.value
        row_f.append(f)
        row_t.append(f + t * nu if t is not None else None)
        lam_rows.append(tuple(g.pd.kappa(b).value - 1.0 / t if t else np.nan for b in (1, 2)))
        if branch is not None:
            k = g.pd.kappa(branch).value
            row_c.append(None if abs(k) < focal.PARABOLIC_TOL else f + nu / k)
        else:
            row_c.append(None)
    return row_f, row_t, row_c, lam_rows


def _contours(values: np.ndarray, us: np.ndarray, vs: np.ndarray) -> list[np.ndarray]:
    from skimage.measure import find_contours

    if not np.isfinite(values).any():
        return []
    out = []
    for c in find_contours(np.nan_to_num(values, nan=np.nanmax(np.abs(values)) + 1.0), 0.0):
        i, j = c[:, 0], c[:, 1]
        v = np.interp(i, np.arange(len(vs)), vs)
        u = np.interp(j, np.arange(len(us)), us)
        out.append(np.column_stack([u, v]))
    return out


def run_mesh(job: AnalysisJob, path: str, workers: int = 0) -> Report:
    rep = run_job(job, "classify")
    rep.command = "mesh"
    if job.res < 2:
        rep.error("mesh", ValueError(f"grid resolution must be at least 2, got {job.res}"))
        return rep
    if not rep.ok:
        return rep
    u0, u1, v0, v1 = job.window
    us = np.linspace(u0, u1, job.res)
    vs = np.linspace(v0, v1, job.res)
    tasks = [(job.surface, us, v, job.t, job.branch) for v in vs]
    workers = workers or min(4, os.cpu_count() or 1)
    if workers > 1 and job.res * job.res > 1024:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_sample_row, tasks))
    else:
        rows = [_sample_row(a) for a in tasks]

    grid_f = [r[0] for r in rows]
    meshes = [MeshObject("surface", grid_f)]
    polys = []
    surface = parse_surface(job.surface)
    if job.t is not None:
        meshes.append(MeshObject(f"parallel_t{job.t:g}", [r[1] for r in rows]))
        lam = np.array([[x for x in r[3]] for r in rows])  # (v, u, branch)
        for b in (0, 1):
            for c in _contours(lam[:, :, b], us, vs):
                img = []
                for q in c:
                    try:
                        g = local_geometry(surface, tuple(q), 2)
                        img.append(g.fd.f.value + job.t * g.fd.nu.value)
                    except GeometryError:
                        continue
                polys.append(np.array(img))
    if job.branch is not None:
        radius = max(float(np.linalg.norm(x)) for row in grid_f for x in row)
        bound = FOCAL_CLIP_FACTOR * (radius + 1.0)
        grid_c = [[None if x is None or np.linalg.norm(x) > bound else x for x in r[2]] for r in rows]
        clipped = sum(x is None for row in grid_c for x in row)
        if clipped:
            rep.warn("mesh.focal", f"{clipped} focal vertices clipped (parabolic or beyond {bound:.3g})")
        meshes.append(MeshObject(f"focal_{job.branch}", grid_c))
        fc = rep.sections.get("focal", {}).get("classification", {}).get("tag")
        if fc == str(Tag.CUSPIDAL_EDGE):
            try:
                front = focal.focal_front(focal.make_focal(surface, job.branch), job.order)
                h = (u1 - u0) / job.res
                for c in trace_curves(front, job.point, steps=job.res // 4, h=h):
                    polys.append(np.array([front.at(q, front.trace_order).map.value for q in c.samples]))
            except (GeometryError, TraceError) as exc:
                rep.warn("mesh.focal_edge", str(exc))
    counts = write_obj(path, meshes, [PolylineObject("singular_set", polys)] if polys else [],
                       header=f"frontgeom mesh\nsurface {job.surface}\nwindow {job.window} res {job.res}")
    rep.sections["mesh"] = {"path": str(path), "objects": counts}
    return rep


# -- the paper examples ---------------------------------------------------------------------

EXAMPLE_JOBS = {
    "beaks": dict(surface=catalog.BEAKS, t=1.0, branch=1),
    "lips": dict(surface=catalog.LIPS, t=1.0, branch=1),
}


def run_report_all(out_dir: str, res: int = 64, mesh: bool = True) -> dict[str, Report]:
    Path(out_dir).mkdir(parents=True, exist_ok=True)
    reports = {}
    for name, spec in EXAMPLE_JOBS.items():
        job = AnalysisJob(name=name, res=res, **spec)
        t0 = time.perf_counter()
        rep = run_job(job, "invariants")
        rep.sections["elapsed_seconds"] = time.perf_counter() - t0
        Path(out_dir, f"{name}.json").write_text(rep.to_json(), encoding="utf-8")
        if mesh:
            mrep = run_mesh(job, str(Path(out_dir, f"{name}.obj")))
            rep.errors.extend(mrep.errors)
            rep.warnings.extend(w for w in mrep.warnings if w not in rep.warnings)
        reports[name] = rep
    return reports


# -- argparse ---------------------------------------------------------------------------------

def _add_job_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--job", help="JSON job file (flags override its fields)")
    p.add_argument("--surface", help="'(x, y, z)' in u, v; a catalog name; or @file")
    p.add_argument("--point", help="parameter point u,v (default 0,0)")
    p.add_argument("--t", type=float, help="parallel distance")
    p.add_argument("--branch", type=int, choices=(1, 2), help="focal branch")
    p.add_argument("--order", type=int, help=f"jet order (default {DEFAULT_ORDER})")
    p.add_argument("--tol", type=float, help=f"zero tolerance (default {ZERO_TOL:g})")
    p.add_argument("--out", help="output path")


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="frontgeom", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_ in (("classify", "classify parallel/focal singularities at a point"),
                        ("invariants", "classification plus kappa_nu, kappa_s and closed forms")):
        _add_job_args(sub.add_parser(name, help=help_))
    p = sub.add_parser("mesh", help="OBJ meshes of f, f^t and C_i with singular curves")
    _add_job_args(p)
    p.add_argument("--window", help="umin,umax,vmin,vmax (default -0.5,0.5,-0.5,0.5)")
    p.add_argument("--res", type=int, help=f"grid points per side (default {DEFAULT_RES})")
    p.add_argument("--workers", type=int, default=0, help="sampling processes (0: auto)")
    p = sub.add_parser("trace", help="trace the singular curve through the point")
    _add_job_args(p)
    p.add_argument("--steps", type=int, default=20)
    p.add_argument("--step", type=float, default=1e-2)
    p = sub.add_parser("report-all", help="reproduce both worked examples")
    p.add_argument("--out", default="reports", help="output directory")
    p.add_argument("--res", type=int, default=DEFAULT_RES)
    p.add_argument("--no-mesh", action="store_true")
    return parser


def _emit(rep: Report, out: Optional[str]) -> None:
    text = rep.to_json()
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = make_parser().parse_args(argv)
    if args.command == "report-all":
        reports = run_report_all(args.out, args.res, not args.no_mesh)
        for name, rep in reports.items():
            d = rep.to_dict()
            ks = d.get("focal", {}).get("invariants", {}).get("kappa_s")
            par = d.get("parallel", {}).get("classification", {}).get("tag")
            foc = d.get("focal", {}).get("classification", {}).get("tag")
            status = "ok" if rep.ok else f"{len(rep.errors)} error(s)"
            print(f"{name}: parallel {par}, focal {foc}, kappa_s^C = {ks!r} [{status}]")
        return 0 if all(r.ok for r in reports.values()) else 1
    try:
        job = build_job(args)
    except (ValueError, OSError) as exc:
        print(f"frontgeom: {exc}", file=sys.stderr)
        return 2
    if args.command in ("classify", "invariants"):
        rep = run_job(job, args.command)
        _emit(rep, job.out)
    elif args.command == "mesh":
        rep = run_mesh(job, job.out or "mesh.obj", args.workers)
        _emit(rep, None)
    else:
        rep = run_trace(job, args.steps, args.step)
        _emit(rep, job.out)
    return 0 if rep.ok else 1


if __name__ == "__main__":
    sys.exit(main())
