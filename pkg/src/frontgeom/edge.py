"""Singular curves of fronts and the invariants of cuspidal edges along them.

The invariants are computed from their definitions.  Along a singular curve
gamma with image ``g = map o gamma`` and front normal ``nu``::

    kappa_nu = <g'', nu> / |g'|^2
    kappa_s  = sgn(eta lam * det(gamma', eta)) det(g', g'', nu) / |g'|^3

with ``lam = det(map_u, map_v, nu)`` the signed area density.  The curve is
parametrized as an integral curve of the Hamiltonian field
``xi = (-lamt_v, lamt_u)`` of the identifier ``lamt``; that field is tangent
to the zero set everywhere, so ``g' = xi(map)`` and ``g'' = xi(xi(map))``
hold exactly and both come out of jet arithmetic at a single point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .jets import DEFAULT_ORDER, ZERO_TOL, Jet, JetVec3, det3, directional, zero_tol

TRACE_TOL = 1e-10
TRACE_STEP = 1e-3
MAX_CORRECTOR_ITERS = 8
DEGENERATE_SEED_OFFSET = 1e-4
#: an identifier value above this (relative to its gradient) is off the singular set
ON_CURVE_TOL = 1e-7
#: sample offsets tried when extrapolating invariants to a non-edge point
LIMIT_OFFSETS = (1e-4, 3e-4, 1e-3, 3e-3)


class TraceError(ArithmeticError):
    pass


class DegenerateSeed(TraceError):
    """The field has a critical point at the seed; there is no unique tangent."""


class StepFailure(TraceError):
    pass


class NotCuspidalEdge(ArithmeticError):
    pass


@dataclass(frozen=True)
class FrontJets:
    map: JetVec3
    normal: JetVec3
    identifier: Jet
    null_field: tuple[Jet, Jet]

    @property
    def area_density(self) -> Jet:
        return det3(self.map.du(), self.map.dv(), self.normal)


@dataclass
class FrontData:
    """A front given pointwise through jets.

    ``evaluate(point, order)`` lifts the underlying regular surface to
    ``order`` at ``point`` and returns the derived :class:`FrontJets`.
    ``trace_order`` is the cheapest lift order still giving the identifier
    with its gradient.
    """

    name: str
    evaluate: Callable[[tuple[float, float], int], FrontJets]
    trace_order: int = 4
    order: int = DEFAULT_ORDER

    def identifier(self, point, order: Optional[int] = None) -> Jet:
        return self.evaluate(point, order or self.trace_order).identifier

    def at(self, point, order: Optional[int] = None) -> FrontJets:
        return self.evaluate((float(point[0]), float(point[1])), order or self.order)

    def with_normal_flipped(self) -> FrontData:
        def ev(p, k):
            fj = self.evaluate(p, k)
            return FrontJets(fj.map, -fj.normal, fj.identifier, fj.null_field)
        return FrontData(self.name + " (-normal)", ev, self.trace_order, self.order)

    def with_null_flipped(self) -> FrontData:
        def ev(p, k):
            fj = self.evaluate(p, k)
            return FrontJets(fj.map, fj.normal, fj.identifier, (-fj.null_field[0], -fj.null_field[1]))
        return FrontData(self.name + " (-eta)", ev, self.trace_order, self.order)


@dataclass
class ZeroCurve:
    samples: np.ndarray
    tangents: np.ndarray
    step: float
    residuals: np.ndarray
    seed_index: int = 0

    def __len__(self) -> int:
        return len(self.samples)

    def reversed(self) -> ZeroCurve:
        return ZeroCurve(self.samples[::-1].copy(), -self.tangents[::-1], self.step,
                         self.residuals[::-1].copy(), len(self) - 1 - self.seed_index)

    def to_dict(self) -> dict:
        return {
            "samples": self.samples.tolist(),
            "tangents": self.tangents.tolist(),
            "step": self.step,
            "seed_index": self.seed_index,
            "max_residual": float(np.max(np.abs(self.residuals))) if len(self) else 0.0,
        }


# -- continuation ---------------------------------------------------------------

def _value_grad(field_fn, q) -> tuple[float, np.ndarray]:
    j = field_fn((float(q[0]), float(q[1])))
    return j.value, j.gradient


def _correct(field_fn, q, tol: float, max_iter: int) -> tuple[np.ndarray, float, np.ndarray]:
    q = np.asarray(q, dtype=float)
    val, g = _value_grad(field_fn, q)
    for _ in range(max_iter):
        if abs(val) < tol:
            break
        gg = float(g @ g)
        if gg == 0.0:
            raise StepFailure(f"gradient vanished while correcting at {q}")
        q = q - val * g / gg
        val, g = _value_grad(field_fn, q)
    if abs(val) >= tol:
        raise StepFailure(f"corrector did not converge at {q}: |field| = {abs(val):.3e}")
    return q, val, g


def _unit_tangent(g: np.ndarray) -> np.ndarray:
    t = np.array([-g[1], g[0]])
    return t / np.linalg.norm(t)


def trace_zero_curve(field_fn, seed, steps: int = 20, h: float = TRACE_STEP,
                     tol: float = TRACE_TOL, both_ways: bool = False,
                     direction=None, max_iter: int = MAX_CORRECTOR_ITERS) -> ZeroCurve:
    """Follow ``field_fn = 0`` from ``seed`` by predictor-corrector continuation.

    ``field_fn(point)`` returns a :class:`Jet` of order >= 1.  The seed is
    first projected onto the zero set.  With ``both_ways`` the curve extends
    ``steps`` samples on each side of the seed; otherwise it runs ``steps``
    samples forward along ``direction`` (default: the rotated gradient).
    """
    q0 = np.asarray(seed, dtype=float)
    val, g = _value_grad(field_fn, q0)
    if np.linalg.norm(g) <= zero_tol(abs(val), ZERO_TOL):
        raise DegenerateSeed(f"gradient vanishes at seed {tuple(q0)}")
    q0, val0, g0 = _correct(field_fn, q0, tol, max_iter)
    t0 = _unit_tangent(g0)
    if direction is not None and float(np.dot(t0, direction)) < 0:
        t0 = -t0

    def march(t_start, n):
        pts, tans, res = [], [], []
        q, t = q0, t_start
        for _ in range(n):
            pred = q + h * t
            try:
                q_new, v, g_new = _correct(field_fn, pred, tol, max_iter)
            except StepFailure:
                # one retry at half step
                q_new, v, g_new = _correct(field_fn, q + 0.5 * h * t, tol, max_iter)
            if np.linalg.norm(g_new) == 0.0:
                raise StepFailure(f"gradient vanished at {q_new}")
            t_new = _unit_tangent(g_new)
            if np.dot(t_new, t) < 0:
                t_new = -t_new
            if np.dot(q_new - q, t) <= 0:
                raise StepFailure(f"continuation doubled back near {q}")
            q, t = q_new, t_new
            pts.append(q)
            tans.append(t)
            res.append(v)
        return pts, tans, res

    fwd = march(t0, steps)
    if both_ways:
        bwd = march(-t0, steps)
        samples = [*bwd[0][::-1], q0, *fwd[0]]
        tangents = [*(-np.array(x) for x in bwd[1][::-1]), t0, *fwd[1]]
        residuals = [*bwd[2][::-1], val0, *fwd[2]]
        seed_index = steps
    else:
        samples = [q0, *fwd[0]]
        tangents = [t0, *fwd[1]]
        residuals = [val0, *fwd[2]]
        seed_index = 0
    return ZeroCurve(np.array(samples), np.array(tangents), h, np.array(residuals), seed_index)


def critical_branch_directions(hessian: np.ndarray) -> list[np.ndarray]:
    """Unit directions w with w^T H w = 0 (the tangent cone at a Morse saddle)."""
    a, b, c = hessian[0, 0], hessian[0, 1], hessian[1, 1]
    disc = b * b - a * c
    if disc <= 0:
        return []
    out = []
    if abs(a) >= abs(c):
        # a x^2 + 2 b x + c = 0 with w = (x, 1)
        for x in ((-b + math.sqrt(disc)) / a, (-b - math.sqrt(disc)) / a):
            w = np.array([x, 1.0])
            out.append(w / np.linalg.norm(w))
    else:
        for y in ((-b + math.sqrt(disc)) / c, (-b - math.sqrt(disc)) / c):
            w = np.array([1.0, y])
            out.append(w / np.linalg.norm(w))
    return out


def trace_from_critical(field_fn, seed, steps: int = 3, eps: float = DEGENERATE_SEED_OFFSET,
                        tol: float = TRACE_TOL) -> list[ZeroCurve]:
    """Half-branches of the zero set leaving a non-degenerate saddle ``seed``.

    Each branch is seeded ``eps`` away along a tangent-cone direction and
    traced outward with step ``eps``.  A definite Hessian yields no branches
    (the zero set is the isolated point itself).
    """
    j = field_fn((float(seed[0]), float(seed[1])))
    branches = []
    for w in critical_branch_directions(j.hessian):
        for sgn in (1.0, -1.0):
            start = np.asarray(seed, dtype=float) + sgn * eps * w
            branches.append(trace_zero_curve(field_fn, start, steps=steps, h=eps, tol=tol,
                                             direction=sgn * w))
    return branches


# -- invariants -------------------------------------------------------------------

@dataclass
class EdgeInvariantReport:
    kappa_nu: float
    kappa_s: float
    point: tuple[float, float]
    sign_data: dict = field(default_factory=dict)
    curve: Optional[ZeroCurve] = None
    index: Optional[int] = None
    method: str = "generic"
    closed_form: dict = field(default_factory=dict)
    flags: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "point": list(self.point),
            "kappa_nu": self.kappa_nu,
            "kappa_s": self.kappa_s,
            "method": self.method,
            "sign_data": self.sign_data,
            "closed_form": self.closed_form,
            "flags": list(self.flags),
            "curve_index": self.index,
        }


def invariants_at(front: FrontData, point, tangent=None, tol: float = ZERO_TOL,
                  order: Optional[int] = None) -> EdgeInvariantReport:
    """Generic kappa_nu and kappa_s at a cuspidal-edge point of ``front``."""
    p = (float(point[0]), float(point[1]))
    fj = front.at(p, order)
    lamt = fj.identifier
    xi = (-lamt.dv(), lamt.du())
    xv = np.array([xi[0].value, xi[1].value])
    if np.linalg.norm(xv) <= zero_tol(abs(lamt.value), tol):
        raise DegenerateSeed(f"identifier is critical at {p}")
    if abs(lamt.value) > ON_CURVE_TOL * (1.0 + np.linalg.norm(xv)):
        raise NotCuspidalEdge(f"{p} is not a singular point (identifier = {lamt.value:.3e})")
    if tangent is not None and float(np.dot(xv, tangent)) < 0:
        xi = (-xi[0], -xi[1])
        xv = -xv
    eta = fj.null_field
    ev = np.array([eta[0].value, eta[1].value])
    eta_lamt = directional(lamt, eta).value
    if abs(eta_lamt) <= zero_tol(np.linalg.norm(xv) * np.linalg.norm(ev), tol):
        raise NotCuspidalEdge(f"eta(identifier) vanishes at {p}")
    lam = fj.area_density
    eta_lam = directional(lam, eta).value
    det_g_eta = float(xv[0] * ev[1] - xv[1] * ev[0])

    g1 = fj.map.along(xi)
    g2 = g1.along(xi)
    nu = fj.normal.value
    a, b = g1.value, g2.value
    speed = float(np.linalg.norm(a))
    triple = float(np.linalg.det(np.array([a, b, nu])))
    sign = math.copysign(1.0, eta_lam * det_g_eta)
    return EdgeInvariantReport(
        kappa_nu=float(b @ nu) / speed ** 2,
        kappa_s=sign * triple / speed ** 3,
        point=p,
        sign_data={
            "eta_lambda": eta_lam,
            "eta_identifier": eta_lamt,
            "det_gamma_eta": det_g_eta,
            "sign": sign,
            "xi": xv.tolist(),
            "eta": ev.tolist(),
            "det_dmap_ddmap_normal": triple,
            "speed": speed,
        },
    )


def generic_invariants(front: FrontData, curve: ZeroCurve, at: int, tol: float = ZERO_TOL) -> EdgeInvariantReport:
    rep = invariants_at(front, curve.samples[at], tangent=curve.tangents[at], tol=tol)
    rep.curve = curve
    rep.index = at
    return rep


def invariants_along_curve(front: FrontData, curve: ZeroCurve,
                           tol: float = ZERO_TOL) -> list[Optional[EdgeInvariantReport]]:
    """Generic invariants at every sample; ``None`` marks samples that are not edge points."""
    out = []
    for i in range(len(curve)):
        try:
            out.append(generic_invariants(front, curve, i, tol))
        except (NotCuspidalEdge, DegenerateSeed):
            out.append(None)
    return out


def limit_at_critical(front: FrontData, point, steps: int = 3,
                      eps: float = DEGENERATE_SEED_OFFSET) -> dict:
    """Extrapolate the invariants to a critical point of the identifier.

    Every half-branch leaving ``point`` is sampled at distances ~eps, 2 eps,
    3 eps; a quadratic in distance is fitted per invariant and evaluated at 0.
    """
    branches = trace_from_critical(lambda q: front.identifier(q, front.order), point,
                                   steps=steps, eps=eps)
    return {"branches": len(branches), "limits": _fit_limits(front, branches, point)}


def _fit_limits(front: FrontData, branches: list[ZeroCurve], point) -> list[tuple[float, float]]:
    limits = []
    p = np.asarray(point, dtype=float)
    for br in branches:
        reps = [r for r in invariants_along_curve(front, br) if r is not None]
        if len(reps) < 3:
            continue
        dist = np.array([np.linalg.norm(np.asarray(r.point) - p) for r in reps])
        kn = np.polyval(np.polyfit(dist, [r.kappa_nu for r in reps], 2), 0.0)
        ks = np.polyval(np.polyfit(dist, [r.kappa_s for r in reps], 2), 0.0)
        limits.append((float(kn), float(ks)))
    return limits


def limit_along_curve(front: FrontData, point, steps: int = 3,
                      eps: float = DEGENERATE_SEED_OFFSET) -> dict:
    """Extrapolate the invariants to a non-edge point of a regular singular curve."""
    fn = lambda q: front.identifier(q, front.order)
    curve = trace_zero_curve(fn, point, steps=steps, h=eps, both_ways=True)
    k = curve.seed_index
    fwd = ZeroCurve(curve.samples[k + 1:], curve.tangents[k + 1:], eps, curve.residuals[k + 1:])
    bwd = curve.reversed()
    bwd = ZeroCurve(bwd.samples[k + 1:], bwd.tangents[k + 1:], eps, bwd.residuals[k + 1:])
    return {"branches": 2, "limits": _fit_limits(front, [fwd, bwd], curve.samples[k])}


def extrapolated_limit(front: FrontData, point, offsets=LIMIT_OFFSETS, steps: int = 3) -> dict:
    """Limits of kappa_nu and kappa_s at a non-edge point of the singular set.

    Near such a point the generic formulas divide by a vanishing quantity,
    so small offsets lose digits to roundoff while large ones carry
    truncation error from the fit.  The fit is repeated over ``offsets`` and
    the finer estimate of the best-agreeing neighbouring pair is returned,
    with their difference as the error estimate.
    """
    estimates = []
    for eps in offsets:
        try:
            lim = limit_along_curve(front, point, steps=steps, eps=eps)
        except DegenerateSeed:
            lim = limit_at_critical(front, point, steps=steps, eps=eps)
        if not lim["limits"]:
            raise NotCuspidalEdge(f"no singular branches leave {tuple(point)}")
        kn = [a for a, _ in lim["limits"]]
        ks = [b for _, b in lim["limits"]]
        estimates.append((eps, float(np.mean(kn)), float(np.mean(ks)), float(np.ptp(kn)), lim["branches"]))
    diffs = [abs(estimates[i + 1][1] - estimates[i][1]) for i in range(len(estimates) - 1)]
    i = int(np.argmin(diffs))
    eps, kn, ks, spread, nbr = estimates[i]
    return {"kappa_nu": kn, "kappa_s": ks, "error_estimate": diffs[i], "branch_spread": spread,
            "offset": eps, "branches": nbr}
