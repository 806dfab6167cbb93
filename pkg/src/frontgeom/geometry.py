"""Fundamental forms, principal curvatures and structure-equation residuals.

Everything here is jet-valued: a quantity computed from an order-K jet of f
is itself a jet, of order K - (number of derivatives it consumes).  The unit
normal is ``f_u x f_v / |f_u x f_v|``; the second fundamental form is taken
against it, so ``L = <f_uu, nu> = -<f_u, nu_u>``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional
from functools import lru_cache

import numpy as np

from .jets import DEFAULT_ORDER, ZERO_TOL, Jet, JetVec3, zero_tol


#: below this |cos| against du a principal direction counts as parallel to dv
DIRECTION_TOL = 1e-6


class GeometryError(ArithmeticError):
    pass


class RankDeficient(GeometryError):
    """f_u and f_v are linearly dependent at the base point."""


class UmbilicPoint(GeometryError):
    """The principal curvatures coincide (or nearly so) at the base point."""


class NotCurvatureLine(GeometryError):
    """F or M does not vanish identically, so (u, v) are not curvature-line coordinates."""


@dataclass(frozen=True)
class FundamentalData:
    f: JetVec3
    fu: JetVec3
    fv: JetVec3
    nu: JetVec3
    E: Jet
    F: Jet
    G: Jet
    L: Jet
    M: Jet
    N: Jet

    @property
    def det_first(self) -> Jet:
        return self.E * self.G - self.F * self.F

    @property
    def gaussian(self) -> Jet:
        return (self.L * self.N - self.M * self.M) / self.det_first

    @property
    def mean(self) -> Jet:
        num = self.E * self.N - 2.0 * self.F * self.M + self.G * self.L
        return num / (2.0 * self.det_first)

    def flipped(self) -> FundamentalData:
        """Same data with the opposite unit normal."""
        return FundamentalData(self.f, self.fu, self.fv, -self.nu, self.E, self.F, self.G,
                               -self.L, -self.M, -self.N)


@dataclass(frozen=True)
class PrincipalData:
    kappa1: Jet
    kappa2: Jet
    dir1: tuple[Jet, Jet]
    dir2: tuple[Jet, Jet]
    labeling: str = "descending"

    def kappa(self, branch: int) -> Jet:
        return self.kappa1 if branch == 1 else self.kappa2

    def direction(self, branch: int) -> tuple[Jet, Jet]:
        return self.dir1 if branch == 1 else self.dir2


def fundamental_forms(jv: JetVec3, tol: float = ZERO_TOL) -> FundamentalData:
    fu, fv = jv.du(), jv.dv()
    n = fu.cross(fv)
    area = n.norm() if np.linalg.norm(n.value) > tol else None
    if area is None:
        raise RankDeficient(f"f_u x f_v vanishes at {jv.base}")
    nu = n / area
    fuu, fuv, fvv = fu.du(), fu.dv(), fv.dv()
    return FundamentalData(
        f=jv, fu=fu, fv=fv, nu=nu,
        E=fu.dot(fu), F=fu.dot(fv), G=fv.dot(fv),
        L=fuu.dot(nu), M=fuv.dot(nu), N=fvv.dot(nu),
    )


def _eigen_direction(A11: Jet, A12: Jet, A22: Jet) -> tuple[Jet, Jet]:
    # kernel of the symmetric matrix [[A11, A12], [A12, A22]]
    r1 = (-A12, A11)
    r2 = (-A22, A12)
    n1 = np.hypot(r1[0].value, r1[1].value)
    n2 = np.hypot(r2[0].value, r2[1].value)
    d = r1 if n1 > n2 else r2
    a, b = d[0].value, d[1].value
    # point into the half plane u > 0, or v > 0 when d is (numerically) vertical
    flip = a < 0 if abs(a) > DIRECTION_TOL * np.hypot(a, b) else b < 0
    return (-d[0], -d[1]) if flip else d


def principal_data(fd: FundamentalData, tol: float = ZERO_TOL) -> PrincipalData:
    """Principal curvatures (descending at the base point) and directions.

    Directions are unnormalized parameter-space vectors ``(a, b)`` solving
    ``(L - k E) a + (M - k F) b = 0``, oriented with ``a > 0`` (``b > 0`` when
    ``a`` vanishes).  In curvature-line coordinates they are positive
    multiples of du and dv.
    """
    H = fd.mean
    K = fd.gaussian
    disc = H * H - K
    if disc.value <= zero_tol(H.value ** 2 + abs(K.value), tol):
        raise UmbilicPoint(f"umbilic at {fd.f.base}: H^2 - K = {disc.value:.3e}")
    s = disc.sqrt()
    k1, k2 = H + s, H - s

    def direction(k: Jet) -> tuple[Jet, Jet]:
        return _eigen_direction(fd.L - k * fd.E, fd.M - k * fd.F, fd.N - k * fd.G)

    return PrincipalData(k1, k2, direction(k1), direction(k2))


def eigen_residual(fd: FundamentalData, kappa: Jet, d: tuple[Jet, Jet]) -> float:
    a, b = d[0].value, d[1].value
    E, F, G, L, M, N = (x.value for x in (fd.E, fd.F, fd.G, fd.L, fd.M, fd.N))
    k = kappa.value
    scale = np.hypot(a, b)
    r1 = (L - k * E) * a + (M - k * F) * b
    r2 = (M - k * F) * a + (N - k * G) * b
    return float(np.hypot(r1, r2) / scale)


@dataclass(frozen=True)
class LocalGeometry:
    """Everything about a regular surface at one point, as jets.

    At an umbilic the principal directions are undefined: ``principal`` is
    None and reading ``pd`` raises :class:`UmbilicPoint`, while
    :meth:`principal_values` still gives the (equal) curvatures.
    """

    point: tuple[float, float]
    fd: FundamentalData
    principal: Optional[PrincipalData]
    umbilic: Optional[str] = None

    @property
    def pd(self) -> PrincipalData:
        if self.principal is None:
            raise UmbilicPoint(self.umbilic)
        return self.principal

    def principal_values(self) -> tuple[float, float]:
        """(k1, k2) with k1 >= k2 at the point, umbilics included."""
        H, K = self.fd.mean.value, self.fd.gaussian.value
        r = math.sqrt(max(H * H - K, 0.0))
        return H + r, H - r


@lru_cache(maxsize=4096)
def _local_geometry(surface, point, order, tol) -> LocalGeometry:
    jv = surface.jets(point, order)
    fd = fundamental_forms(jv, tol)
    try:
        return LocalGeometry(point, fd, principal_data(fd, tol))
    except UmbilicPoint as exc:
        return LocalGeometry(point, fd, None, str(exc))


def local_geometry(surface, point, order: int = DEFAULT_ORDER, tol: float = ZERO_TOL) -> LocalGeometry:
    """Fundamental and principal data of ``surface`` (anything with ``.jets``) at ``point``."""
    return _local_geometry(surface, (float(point[0]), float(point[1])), int(order), float(tol))


class SwappedSurface:
    """The surface (u, v) -> f(v, u)."""

    def __init__(self, surface):
        self.surface = surface

    def jets(self, point, order: int = DEFAULT_ORDER) -> JetVec3:
        return self.surface.jets((point[1], point[0]), order).swap()

    def __eq__(self, other):
        return isinstance(other, SwappedSurface) and other.surface == self.surface

    def __hash__(self):
        return hash(("swap", self.surface))


# -- curvature-line coordinates ---------------------------------------------

def is_curvature_line(fd: FundamentalData, tol: float = ZERO_TOL) -> bool:
    scale = max(fd.E.max_abs(), fd.G.max_abs(), fd.L.max_abs(), fd.N.max_abs())
    limit = zero_tol(scale, tol)
    return fd.F.max_abs() <= limit and fd.M.max_abs() <= limit


def require_curvature_line(fd: FundamentalData, tol: float = ZERO_TOL) -> None:
    if not is_curvature_line(fd, tol):
        raise NotCurvatureLine(
            f"F = {fd.F.max_abs():.3e}, M = {fd.M.max_abs():.3e} (jet sup) at {fd.f.base}"
        )


@dataclass
class StructureResiduals:
    """Residuals of the curvature-line structure equations (sup-norm of jet coefficients)."""

    codazzi: dict[str, float] = field(default_factory=dict)
    kappa_derivatives: dict[str, float] = field(default_factory=dict)
    frame: dict[str, float] = field(default_factory=dict)
    singular_frame: dict[str, object] = field(default_factory=dict)

    def max(self) -> float:
        vals = [*self.codazzi.values(), *self.kappa_derivatives.values(), *self.frame.values()]
        vals.append(self.singular_frame.get("e1_identity", 0.0))
        vals.append(self.singular_frame.get("e2_identity", 0.0))
        return float(max(vals))


def verify_structure_equations(fd: FundamentalData, pd: PrincipalData | None = None,
                               tol: float = ZERO_TOL) -> StructureResiduals:
    """Check Codazzi, the kappa-derivative identities and the frame derivatives.

    Here k1 = L/E and k2 = N/G are the curvatures along the coordinate
    directions, which is how the identities are stated; ``pd`` is only used to
    check that it carries the same pair of values.
    """
    require_curvature_line(fd, tol)
    E, G, L, N = fd.E, fd.G, fd.L, fd.N
    k1, k2 = L / E, N / G
    if pd is not None:
        got = sorted([pd.kappa1.value, pd.kappa2.value])
        want = sorted([k1.value, k2.value])
        if not np.allclose(got, want, rtol=1e-8, atol=1e-10):
            raise GeometryError(f"principal data {got} disagree with L/E, N/G {want}")
    Ev, Gu = E.dv(), G.du()
    res = StructureResiduals()
    res.codazzi["L_v"] = (L.dv() - 0.5 * (k1 + k2) * Ev).max_abs()
    res.codazzi["N_u"] = (N.du() - 0.5 * (k1 + k2) * Gu).max_abs()
    nfu, nfv = E.sqrt(), G.sqrt()
    umbilic = abs(k1.value - k2.value) <= zero_tol(max(abs(k1.value), abs(k2.value)), tol)
    if umbilic:
        # k1 - k2 vanishes at p: compare the identities multiplied through by
        # it, and take the rotation coefficients from the Christoffel symbols
        res.kappa_derivatives["E_v/2E"] = ((k2 - k1) * Ev / (2.0 * E) - k1.dv()).max_abs()
        res.kappa_derivatives["G_u/2G"] = ((k1 - k2) * Gu / (2.0 * G) - k2.du()).max_abs()
        x1 = -nfu.dv() / nfv
        y1 = nfv.du() / nfu
    else:
        res.kappa_derivatives["E_v/2E"] = (Ev / (2.0 * E) - k1.dv() / (k2 - k1)).max_abs()
        res.kappa_derivatives["G_u/2G"] = (Gu / (2.0 * G) - k2.du() / (k1 - k2)).max_abs()
        x1 = k1.dv() * nfu / ((k1 - k2) * nfv)
        y1 = k2.du() * nfv / ((k1 - k2) * nfu)
    e1, e2, nu = fd.fu / nfu, fd.fv / nfv, fd.nu
    x2 = k1 * nfu
    y3 = k2 * nfv
    checks = {
        "e1_u": e1.du() - (e2 * x1 + nu * x2),
        "e2_u": e2.du() + e1 * x1,
        "nu_u": nu.du() + e1 * x2,
        "e1_v": e1.dv() - e2 * y1,
        "e2_v": e2.dv() - (nu * y3 - e1 * y1),
        "nu_v": nu.dv() + e2 * y3,
    }
    res.frame = {k: v.max_abs() for k, v in checks.items()}

    c1 = e1.du().cross(e1.dv())
    c2 = e2.du().cross(e2.dv())
    res.singular_frame["e1_identity"] = (c1 + e1 * (k1 * y1 * nfu)).max_abs()
    res.singular_frame["e2_identity"] = (c2 - e2 * (k2 * x1 * nfv)).max_abs()
    lim1 = zero_tol(max(abs(k1.value), abs(k2.du().value)), tol)
    lim2 = zero_tol(max(abs(k2.value), abs(k1.dv().value)), tol)
    res.singular_frame["e1_singular"] = bool(abs(k1.value) <= lim1 or abs(k2.du().value) <= lim1)
    res.singular_frame["e2_singular"] = bool(abs(k2.value) <= lim2 or abs(k1.dv().value) <= lim2)
    res.singular_frame["e1_rank_deficient"] = bool(np.linalg.norm(c1.value) <= lim1)
    res.singular_frame["e2_rank_deficient"] = bool(np.linalg.norm(c2.value) <= lim2)
    return res
