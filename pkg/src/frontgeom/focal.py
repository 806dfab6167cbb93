"""Focal surfaces C_i = f + nu / k_i and their cuspidal edges.

A focal surface is a front with unit normal ``e_i = v_i f / |v_i f|`` where
``v_i`` is the i-th principal direction.  It is singular exactly on the
ridge set ``v_i k_i = 0``, which is used as the identifier, with ``v_i`` as
the null vector field.

The closed-form curvatures below are stated in curvature-line coordinates
with the active curvature equal to ``L/E``.  When the requested branch runs
along dv instead, the computation is done on the swapped surface
(u, v) -> f(v, u); every closed form here is unchanged by that swap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .edge import (
    FrontData,
    FrontJets,
    NotCuspidalEdge,
    StepFailure,
    invariants_at,
    trace_zero_curve,
)
from .geometry import (
    GeometryError,
    SwappedSurface,
    fundamental_forms,
    local_geometry,
    require_curvature_line,
)
from .jets import DEFAULT_ORDER, ZERO_TOL, Jet, JetVec3, det3, directional, zero_tol
from .singularities import SingularityClass, Tag, classify_rank_one, identifier_scale

#: |k_branch| below this refuses to evaluate C_branch
PARABOLIC_TOL = 1e-6
#: the identifier counts as zero below this (relative to its own scale)
FOCAL_SING_TOL = 1e-7


class ParabolicPoint(GeometryError):
    """The branch curvature vanishes; the focal point is at infinity."""


class SingularFocalPoint(GeometryError):
    """A regular-point formula was asked for at a singular point of C_i."""


class HypothesisError(GeometryError):
    """A closed form was requested outside the hypotheses it is derived under."""


class KappaTwoNonzero(HypothesisError):
    """The closed form needs the other principal curvature to vanish at p."""


class NotFocalEdge(HypothesisError):
    """The closed form needs C_i to be a cuspidal edge at p."""


class InconsistentResult(AssertionError):
    pass


def _check_branch(branch: int) -> int:
    if branch not in (1, 2):
        raise ValueError(f"focal branch must be 1 or 2, got {branch!r}")
    return branch


def _branch_curvature(g, branch: int) -> Jet:
    value = g.principal_values()[branch - 1]
    if abs(value) < PARABOLIC_TOL:
        raise ParabolicPoint(f"k{branch} = {value:.3e} at {g.point}")
    return g.pd.kappa(branch)


@dataclass(frozen=True)
class FocalSurface:
    base: object
    branch: int

    def jets(self, point, order: int = DEFAULT_ORDER - 2) -> JetVec3:
        g = local_geometry(self.base, point, order + 2)
        return g.fd.f + g.fd.nu / _branch_curvature(g, self.branch)

    def unit_normal(self, point, order: int = DEFAULT_ORDER - 1) -> JetVec3:
        g = local_geometry(self.base, point, order + 1)
        return g.fd.f.along(g.pd.direction(self.branch)).normalized()


def make_focal(surface, branch: int) -> FocalSurface:
    return FocalSurface(surface, _check_branch(branch))


def ridge_identifier(fs: FocalSurface, p, order: int = DEFAULT_ORDER) -> Jet:
    """Jet of ``v_i k_i`` at ``p`` (order ``order - 3``)."""
    g = local_geometry(fs.base, p, order)
    k = _branch_curvature(g, fs.branch)
    return directional(k, g.pd.direction(fs.branch))


def focal_identifier(fs: FocalSurface, p, order: int = DEFAULT_ORDER) -> Jet:
    """Signed area density of C_i in curvature-line coordinates, else ``v_i k_i``."""
    g = local_geometry(fs.base, p, order)
    try:
        require_curvature_line(g.fd)
    except GeometryError:
        return ridge_identifier(fs, p, order)
    C = fs.jets(p, order - 2)
    e = fs.unit_normal(p, order - 1)
    return det3(C.du(), C.dv(), e)


def focal_front(fs: FocalSurface, order: int = DEFAULT_ORDER) -> FrontData:
    def ev(p, k):
        g = local_geometry(fs.base, p, k)
        fd = g.fd
        kap = _branch_curvature(g, fs.branch)
        d = g.pd.direction(fs.branch)
        return FrontJets(
            map=fd.f + fd.nu / kap,
            normal=fd.f.along(d).normalized(),
            identifier=directional(kap, d),
            null_field=d,
        )

    return FrontData(f"focal branch {fs.branch}", ev, trace_order=4, order=order)


def frontal_residual(fs: FocalSurface, p, order: int = DEFAULT_ORDER) -> float:
    """sup of |<C_u, e>|, |<C_v, e>| over the jet coefficients."""
    C = fs.jets(p, order - 2)
    e = fs.unit_normal(p, order - 1)
    return max(C.du().dot(e).max_abs(), C.dv().dot(e).max_abs())


def classify_focal(fs: FocalSurface, p, tol: float = ZERO_TOL,
                   order: int = DEFAULT_ORDER) -> SingularityClass:
    """Regular, CuspidalEdge or DegenerateOther for C_i at p.

    Types beyond the cuspidal edge are not assigned; the criteria outcome is
    kept in the witness under ``criteria_tag``.
    """
    g = local_geometry(fs.base, p, order)
    lam = ridge_identifier(fs, p, order)
    scale = identifier_scale(lam)
    if abs(lam.value) > zero_tol(scale, FOCAL_SING_TOL):
        return SingularityClass(Tag.REGULAR, {"identifier": lam.value, "branch": fs.branch})
    lam0 = lam - lam.value
    cls = classify_rank_one(lam0, g.pd.direction(fs.branch), tol)
    cls.witness["branch"] = fs.branch
    cls.witness["criteria_tag"] = str(cls.tag)
    if cls.tag != Tag.CUSPIDAL_EDGE:
        cls.tag = Tag.DEGENERATE_OTHER
    return cls


# -- curvature-line closed forms --------------------------------------------------

@dataclass
class CurvatureLineData:
    """k1 = L/E (active), k2 = N/G, in a chart where the branch runs along du."""

    surface: object
    point: tuple[float, float]
    swapped: bool
    E: Jet
    G: Jet
    k1: Jet
    k2: Jet


def curvature_line_data(fs: FocalSurface, p, order: int = DEFAULT_ORDER,
                        tol: float = ZERO_TOL) -> CurvatureLineData:
    p = (float(p[0]), float(p[1]))
    g = local_geometry(fs.base, p, order)
    require_curvature_line(g.fd, tol)
    d = g.pd.direction(fs.branch)
    expected = g.pd.kappa(fs.branch).value
    surface, q, swapped = fs.base, p, False
    if abs(d[1].value) > abs(d[0].value):
        # the swap reverses orientation, so every curvature changes sign
        surface, q, swapped = SwappedSurface(fs.base), (p[1], p[0]), True
        g = local_geometry(surface, q, order)
        expected = -expected
    fd = g.fd
    k1, k2 = fd.L / fd.E, fd.N / fd.G
    if abs(k1.value - expected) > zero_tol(abs(k1.value), 1e-8):
        raise GeometryError("branch curvature does not match L/E in the chosen chart")
    if abs(k1.value) < PARABOLIC_TOL:
        raise ParabolicPoint(f"k{fs.branch} = {k1.value:.3e} at {p}")
    return CurvatureLineData(surface, q, swapped, fd.E, fd.G, k1, k2)


@dataclass
class FocalCurvature:
    closed_form: float
    direct: float
    constant_curvature: Optional[float] = None
    base_gaussian: Optional[float] = None

    def to_dict(self) -> dict:
        return {
            "closed_form": self.closed_form,
            "direct": self.direct,
            "constant_curvature_form": self.constant_curvature,
            "base_gaussian": self.base_gaussian,
        }


def focal_gaussian_curvature(fs: FocalSurface, p, rtol: float = 1e-6,
                             order: int = DEFAULT_ORDER) -> FocalCurvature:
    """K of C_i at a regular focal point, from the base curvatures and directly.

    Raises :class:`InconsistentResult` when the two disagree beyond ``rtol``
    (and likewise for the constant-curvature form when K of f is constant).
    """
    cl = curvature_line_data(fs, p, order)
    k1, k2 = cl.k1, cl.k2
    k1u, k2u = k1.du().value, k2.du().value
    if abs(k1u) <= zero_tol(k1.max_abs(), FOCAL_SING_TOL):
        raise SingularFocalPoint(f"(k1)_u = {k1u:.3e}: C is singular at {tuple(p)}")
    a, b = k1.value, k2.value
    closed = -a ** 4 * k2u / (k1u * (a - b) ** 2)

    C = fs.jets(p, order - 2)
    direct = fundamental_forms(C).gaussian.value
    if not math.isclose(closed, direct, rel_tol=rtol, abs_tol=rtol * 1e-6):
        raise InconsistentResult(f"K^C closed form {closed} vs direct {direct}")
    out = FocalCurvature(closed, direct)

    K = local_geometry(fs.base, p, order).fd.gaussian
    out.base_gaussian = K.value
    if (K - K.value).max_abs() <= zero_tol(abs(K.value), 1e-8):
        c = K.value
        kc2 = c * a ** 4 / (c - a * a) ** 2
        if not math.isclose(kc2, closed, rel_tol=rtol, abs_tol=rtol * 1e-6):
            raise InconsistentResult(f"K^C constant-curvature form {kc2} vs {closed}")
        out.constant_curvature = kc2
    return out


@dataclass
class RidgeBoundedness:
    bounded: bool
    samples: int
    max_other_derivative: float
    curve: object = field(repr=False, default=None)


def kc_bounded_along_ridge(fs: FocalSurface, seed, steps: int = 20, h: float = 1e-3,
                           tol: float = 1e-8) -> RidgeBoundedness:
    """Check ``(k1)_u = 0  =>  (k2)_u = 0`` along the ridge through ``seed``.

    This is the condition for K of C_i to stay bounded when approaching the
    singular set of C_i.
    """
    cl = curvature_line_data(fs, seed)
    surface, swapped = cl.surface, cl.swapped

    def k1u(q):
        g = local_geometry(surface, q, 5)
        return (g.fd.L / g.fd.E).du()

    def k2u(q):
        g = local_geometry(surface, q, 4)
        return (g.fd.N / g.fd.G).du().value

    curve = trace_zero_curve(k1u, cl.point, steps=steps, h=h, both_ways=True)
    vals = np.array([k2u(q) for q in curve.samples])
    worst = float(np.max(np.abs(vals)))
    if swapped:
        curve.samples = curve.samples[:, ::-1].copy()
        curve.tangents = curve.tangents[:, ::-1].copy()
    return RidgeBoundedness(worst <= tol, len(vals), worst, curve)


def _edge_hypotheses(cl: CurvatureLineData, p, require_edge: bool = True) -> None:
    if abs(cl.k2.value) > zero_tol(abs(cl.k1.value), 1e-8):
        raise KappaTwoNonzero(f"k2 = {cl.k2.value:.3e} at {tuple(p)}; the closed form needs k2(p) = 0")
    if not require_edge:
        return
    k1u = cl.k1.du()
    scale = max(1.0, cl.k1.max_abs())
    if abs(k1u.value) > zero_tol(scale, FOCAL_SING_TOL):
        raise NotFocalEdge(f"(k1)_u = {k1u.value:.3e}: C is regular at {tuple(p)}")
    if abs(k1u.du().value) <= zero_tol(scale, ZERO_TOL):
        raise NotFocalEdge(f"(k1)_uu vanishes at {tuple(p)}: C is not a cuspidal edge")


def kn_focal_closed_form(fs: FocalSurface, p) -> float:
    """Limiting normal curvature of C_i at a cuspidal edge with k2(p) = 0."""
    cl = curvature_line_data(fs, p)
    _edge_hypotheses(cl, p)
    k1 = cl.k1.value
    k2u = cl.k2.du().value
    k1v = cl.k1.dv().value
    E, G = cl.E.value, cl.G.value
    return -k1 ** 3 * k2u * G / (math.sqrt(E) * (k1 ** 4 * G + k1v ** 2))


def ks_focal_closed_form(fs: FocalSurface, p) -> float:
    """Singular curvature of C_i at a cuspidal edge with k2(p) = 0."""
    cl = curvature_line_data(fs, p)
    _edge_hypotheses(cl, p)
    k1j = cl.k1
    k1 = k1j.value
    H = k1j.hessian
    k1uu, k1v = H[0, 0], k1j.dv().value
    k2v = cl.k2.dv().value
    G = cl.G.value
    gamma222 = cl.G.dv().value / (2.0 * G)
    delta = math.sqrt(k1 ** 4 * G + k1v ** 2)
    det_hess = float(np.linalg.det(H))
    bracket = k1 * det_hess - k1v * k1uu * (gamma222 * k1 + 2.0 * k1v - k2v)
    return math.copysign(1.0, k1uu) * k1 ** 3 * math.sqrt(G) / (k1uu * delta ** 3) * bracket


def ks_reduced_form(fs: FocalSurface, p) -> dict:
    """The singular curvature when additionally (k1)_u = (k1)_v = 0 at p."""
    cl = curvature_line_data(fs, p)
    _edge_hypotheses(cl, p)
    H = cl.k1.hessian
    k1uu = H[0, 0]
    det_hess = float(np.linalg.det(H))
    value = math.copysign(1.0, k1uu) * det_hess / (k1uu * cl.k1.value ** 2 * cl.G.value)
    return {"kappa_s": value, "det_hess_k1": det_hess, "k1_uu": float(k1uu)}


def generic_focal_invariants(fs: FocalSurface, p, order: int = DEFAULT_ORDER):
    """kappa_nu and kappa_s of C_i at p from their definitions."""
    return invariants_at(focal_front(fs, order), p)


def diff_c_residual(fs: FocalSurface, p, order: int = DEFAULT_ORDER) -> float:
    """sup |(C_i)_u + (k1)_u / k1^2 nu| in the branch-along-du chart."""
    cl = curvature_line_data(fs, p, order)
    g = local_geometry(cl.surface, cl.point, order)
    k1 = cl.k1
    C = g.fd.f + g.fd.nu / k1
    return (C.du() + g.fd.nu * (k1.du() / (k1 * k1))).max_abs()


# -- the lips example reading --------------------------------------------------------

_LIPS_PRINTED = lambda u, v: 0.5 * u + u * v * v + u ** 4
_LIPS_FORCED = lambda u, v: 0.5 * u * u + u * v * v + u ** 4
_PROBES = [(0.1, -0.2), (-0.3, 0.25), (0.4, 0.05), (-0.15, -0.35)]


def lips_reading_flag(surface) -> Optional[dict]:
    """Detect the lips example graph in either of its two readings.

    The printed height ``u/2 + u v^2 + u^4`` disagrees with the unit normal
    displayed alongside it; ``u^2/2 + u v^2 + u^4`` is the reading that
    normal forces.  Returns a description of which one was given, or None.
    """
    evaluate = getattr(surface, "evaluate", None)
    if evaluate is None:
        return None
    try:
        pts = [np.asarray(evaluate((u, v)), dtype=float) for u, v in _PROBES]
    except Exception:
        return None
    for name, h in (("printed", _LIPS_PRINTED), ("normal-consistent", _LIPS_FORCED)):
        if all(np.allclose(x, (u, v, h(u, v)), rtol=0, atol=1e-12) for x, (u, v) in zip(pts, _PROBES)):
            return {
                "detected": name,
                "printed": "(u, v, u/2 + u*v^2 + u^4)",
                "normal_consistent": "(u, v, u^2/2 + u*v^2 + u^4)",
                "used": "(u, v, u^2/2 + u*v^2 + u^4)" if name == "normal-consistent" else "as given",
            }
    return None
