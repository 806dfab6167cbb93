"""Parallel surfaces f^t = f + t nu and their singularities.

f^t is singular exactly where one principal curvature equals 1/t.  The
identifier used is ``k - 1/t`` for that (active) branch and the null vector
field is the active principal direction, so the criteria apply in any
coordinate system, not only in curvature-line coordinates.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .edge import (
    DegenerateSeed,
    FrontData,
    FrontJets,
    NotCuspidalEdge,
    extrapolated_limit,
    invariants_at,
    trace_from_critical,
    trace_zero_curve,
)
from .geometry import fundamental_forms, local_geometry
from .germ import GermOrder, RationalOrder, order as germ_order, rational_order
from .jets import DEFAULT_ORDER, ZERO_TOL, Jet, JetVec3, zero_tol
from .singularities import (
    FIRST_ORDER_TAGS,
    SECOND_ORDER_TAGS,
    NotSingular,
    SingularityClass,
    Tag,
    classify_rank_one,
)

SING_TOL = 1e-7


class SingularParallelPoint(ArithmeticError):
    """f^t is singular where a regular-point formula was requested."""


class InconsistentResult(AssertionError):
    """Two independent routes to the same quantity disagree."""


@dataclass(frozen=True)
class ParallelSurface:
    base: object
    t: float

    def jets(self, point, order: int = DEFAULT_ORDER - 1) -> JetVec3:
        g = local_geometry(self.base, point, order + 1)
        return g.fd.f + g.fd.nu * self.t


def make_parallel(surface, t: float) -> ParallelSurface:
    if t == 0:
        raise ValueError("parallel distance t must be nonzero")
    return ParallelSurface(surface, float(t))


def _sing_tol(t: float, kappa: float) -> float:
    return SING_TOL * (1.0 + abs(t) * abs(kappa))


def active_branch(ps: ParallelSurface, p) -> tuple[Optional[int], dict]:
    """The branch with k(p) = 1/t, or None; plus the two Rodrigues factors 1 - t k."""
    kappas = local_geometry(ps.base, p, 2).principal_values()
    factors = {b: 1.0 - ps.t * kappas[b - 1] for b in (1, 2)}
    hits = [b for b in (1, 2) if abs(factors[b]) < _sing_tol(ps.t, kappas[b - 1])]
    info = {"rodrigues_factors": [factors[1], factors[2]]}
    if len(hits) == 2:
        return 0, info
    if not hits:
        return None, info
    return hits[0], info


def identifier_lambda(ps: ParallelSurface, p, branch: Optional[int] = None,
                      order: int = DEFAULT_ORDER) -> Jet:
    """Jet at ``p`` of ``k_active - 1/t``."""
    if branch is None:
        branch, info = active_branch(ps, p)
        if branch is None:
            raise NotSingular(f"f^t is regular at {tuple(p)}: 1 - t k = {info['rodrigues_factors']}")
        if branch == 0:
            raise NotSingular("both principal curvatures equal 1/t (umbilic)")
    g = local_geometry(ps.base, p, order)
    return g.pd.kappa(branch) - 1.0 / ps.t


def parallel_front(ps: ParallelSurface, branch: int, order: int = DEFAULT_ORDER) -> FrontData:
    """f^t as a front with identifier ``k_branch - 1/t`` and the base normal."""

    def ev(p, k):
        g = local_geometry(ps.base, p, k)
        fd, pd = g.fd, g.pd
        return FrontJets(
            map=fd.f + fd.nu * ps.t,
            normal=fd.nu,
            identifier=pd.kappa(branch) - 1.0 / ps.t,
            null_field=pd.direction(branch),
        )

    return FrontData(f"parallel t={ps.t} branch {branch}", ev, trace_order=3, order=order)


def classify_parallel(ps: ParallelSurface, p, tol: float = ZERO_TOL,
                      order: int = DEFAULT_ORDER) -> SingularityClass:
    branch, info = active_branch(ps, p)
    if branch is None:
        return SingularityClass(Tag.REGULAR, info)
    if branch == 0:
        return SingularityClass(Tag.RANK_ZERO, info)
    g = local_geometry(ps.base, p, order)
    lam = g.pd.kappa(branch) - 1.0 / ps.t
    cls = classify_rank_one(lam, g.pd.direction(branch), tol)
    cls.witness.update(info)
    cls.witness["branch"] = branch
    return cls


def germ_order_of_identifier(ps: ParallelSurface, p, tol: float = ZERO_TOL,
                             order: int = DEFAULT_ORDER) -> GermOrder:
    """ord_p of the identifier, cross-checked against the classification."""
    cls = classify_parallel(ps, p, tol, order)
    if cls.tag in (Tag.REGULAR, Tag.RANK_ZERO):
        raise NotSingular(f"no rank-one singular point at {tuple(p)}")
    lam = identifier_lambda(ps, p, cls.witness["branch"], order)
    lam = lam - lam.value  # exact zero at p; the constant term is roundoff
    o = germ_order(lam, tol)
    expected = 1 if cls.tag in FIRST_ORDER_TAGS else 2 if cls.tag in SECOND_ORDER_TAGS else None
    if expected is not None and (not o.exact or o.value != expected):
        raise InconsistentResult(f"{cls.tag} at {tuple(p)} but ord identifier = {o}")
    return o


@dataclass
class ParallelCurvatures:
    K: Jet
    H: Jet
    K_direct: Jet
    H_direct: Jet

    def max_discrepancy(self) -> float:
        return max((self.K - self.K_direct).max_abs(), (self.H - self.H_direct).max_abs())


def parallel_curvatures(ps: ParallelSurface, p, order: int = DEFAULT_ORDER) -> ParallelCurvatures:
    """K^t and H^t from the base curvatures, and directly from the f^t jets.

    Both are taken with respect to the base normal nu.
    """
    g = local_geometry(ps.base, p, order)
    K, H = g.fd.gaussian, g.fd.mean
    t = ps.t
    denom = 1.0 - 2.0 * t * H + t * t * K
    if abs(denom.value) <= zero_tol(1.0, SING_TOL):
        raise SingularParallelPoint(f"f^t is singular at {tuple(p)}; use boundedness_report")
    Kt = K / denom
    Ht = (H - t * K) / denom
    ft = ps.jets(p, order - 1)
    fu, fv = ft.du(), ft.dv()
    nu = g.fd.nu
    E, F, G = fu.dot(fu), fu.dot(fv), fv.dot(fv)
    L, M, N = fu.du().dot(nu), fu.dv().dot(nu), fv.dv().dot(nu)
    det1 = E * G - F * F
    K_direct = (L * N - M * M) / det1
    H_direct = (E * N - 2.0 * F * M + G * L) / (2.0 * det1)
    return ParallelCurvatures(Kt, Ht, K_direct, H_direct)


@dataclass
class BoundednessReport:
    tag: Tag
    rationally_bounded: bool
    bounded_near: bool
    ord_kappa2: GermOrder
    kappa2_at_p: float
    samples_checked: int
    rational_order_Kt: Optional[RationalOrder] = None

    def to_dict(self) -> dict:
        return {
            "tag": str(self.tag),
            "rationally_bounded": self.rationally_bounded,
            "bounded_near": self.bounded_near,
            "ord_kappa2": str(self.ord_kappa2),
            "kappa2_at_p": self.kappa2_at_p,
            "samples_checked": self.samples_checked,
            "rational_order_Kt": None if self.rational_order_Kt is None else str(self.rational_order_Kt),
        }


def boundedness_report(ps: ParallelSurface, p, steps: int = 10, h: float = 1e-3,
                       tol: float = ZERO_TOL) -> BoundednessReport:
    """Whether K^t is rationally bounded at p and bounded near p.

    "kappa2" is the non-active principal curvature.  For first-order types the
    tests are kappa2(p) = 0 and kappa2 = 0 along the traced singular curve.
    For lips/beaks rational boundedness is ord_p kappa2 = 2; boundedness asks
    kappa2 to vanish on every branch of the singular set through p, and at a
    lips point, where that set is p alone, that kappa2 vanish to order >= 2.
    """
    cls = classify_parallel(ps, p, tol)
    tag = cls.tag
    degenerate = tag == Tag.DEGENERATE_OTHER
    if tag not in FIRST_ORDER_TAGS | SECOND_ORDER_TAGS and not degenerate:
        raise NotSingular(f"boundedness needs a rank-one singular point, got {tag}")
    branch = cls.witness["branch"]
    other = 2 if branch == 1 else 1
    g = local_geometry(ps.base, p)
    k2 = g.pd.kappa(other)
    o2 = germ_order(k2, tol)
    lim = zero_tol(k2.max_abs(), tol)
    if degenerate:
        # K^t = k1 k2 / ((1 - t k1)(1 - t k2)) with a nonzero numerator at p
        if abs(k2.value) > lim:
            return BoundednessReport(tag, False, False, o2, k2.value, 1)
        raise NotSingular(f"degenerate singular point with k{other}(p) = 0: boundedness undecided")

    def k2_at(q):
        return local_geometry(ps.base, q, 2).pd.kappa(other).value

    def ident(q):
        return local_geometry(ps.base, q, 4).pd.kappa(branch) - 1.0 / ps.t

    # pointwise checks along traced curves use the trace tolerance scale
    sample_lim = max(lim, 1e-8)
    if tag in FIRST_ORDER_TAGS:
        curve = trace_zero_curve(ident, p, steps=steps, h=h, both_ways=True)
        vals = [k2_at(q) for q in curve.samples]
        return BoundednessReport(tag, abs(k2.value) <= lim,
                                 all(abs(x) <= sample_lim for x in vals), o2, k2.value, len(vals))
    rational = o2.exact and o2.value == 2
    # K^t = k1(p)^2 k1 k2 / (lam (k2 - k1(p))) with lam = k1 - k1(p)
    ka = g.pd.kappa(branch)
    lam = ka - ka.value
    ro = rational_order(ka * k2 * ka.value ** 2, lam * (k2 - ka.value), tol)
    if ro.rationally_bounded != rational:
        raise InconsistentResult(f"ord k2 = {o2} but rational order of K^t = {ro}")
    if tag == Tag.CUSPIDAL_LIPS:
        bounded = (not o2.exact) or o2.value >= 2
        return BoundednessReport(tag, rational, bounded, o2, k2.value, 1, ro)
    branches = trace_from_critical(ident, p, steps=steps, eps=h)
    vals = [k2_at(q) for br in branches for q in br.samples]
    bounded = abs(k2.value) <= lim and all(abs(x) <= sample_lim for x in vals)
    return BoundednessReport(tag, rational, bounded, o2, k2.value, len(vals) + 1, ro)


def limiting_normal_curvature_parallel(ps: ParallelSurface, p, cross_check: bool = True,
                                       rtol: float = 1e-5, tol: float = ZERO_TOL) -> float:
    """k_a k_o / (k_a - k_o) at a rank-one singular point of f^t.

    At a cuspidal edge the value is recomputed from the definition along the
    singular curve and an :class:`InconsistentResult` is raised on mismatch.
    """
    branch, info = active_branch(ps, p)
    if branch is None:
        raise NotSingular(f"f^t is regular at {tuple(p)}")
    if branch == 0:
        raise NotSingular("rank zero point")
    pd = local_geometry(ps.base, p, 2).pd
    ka, ko = pd.kappa(branch).value, pd.kappa(2 if branch == 1 else 1).value
    value = ka * ko / (ka - ko)
    if cross_check:
        cls = classify_parallel(ps, p, tol)
        if cls.tag == Tag.CUSPIDAL_EDGE:
            gen = invariants_at(parallel_front(ps, branch), p).kappa_nu
            if not np.isclose(gen, value, rtol=rtol, atol=rtol * 1e-3):
                raise InconsistentResult(f"kappa_nu: closed form {value} vs generic {gen}")
    return value


def generic_kappa_nu_parallel(ps: ParallelSurface, p, order: int = DEFAULT_ORDER) -> dict:
    """kappa_nu of f^t at p from the definition.

    Cuspidal edges are evaluated in place; at a critical point of the
    identifier the value is extrapolated along the branches of the singular
    set.
    """
    branch, _ = active_branch(ps, p)
    if not branch:
        raise NotSingular(f"no rank-one singular point at {tuple(p)}")
    front = parallel_front(ps, branch, order)
    try:
        return {"kappa_nu": invariants_at(front, p).kappa_nu, "method": "direct"}
    except (NotCuspidalEdge, DegenerateSeed):
        lim = extrapolated_limit(front, p)
    return {"kappa_nu": lim["kappa_nu"], "error_estimate": lim["error_estimate"],
            "branch_spread": lim["branch_spread"], "method": "extrapolated"}
