"""Corank-one front singularities from derivative criteria on an identifier.

Given an identifier of singularities ``lam`` (any function vanishing exactly
on the singular set, with nonzero proportionality to the signed area
density) and a null vector field ``eta``, the type at a rank-one singular
point is decided by::

    d lam != 0:  eta lam != 0                         -> cuspidal edge
                 eta lam = 0, eta^2 lam != 0          -> swallowtail
                 eta lam = eta^2 lam = 0, eta^3 != 0  -> cuspidal butterfly
    d lam == 0:  det Hess lam > 0                     -> cuspidal lips
                 det Hess lam < 0, eta^2 lam != 0     -> cuspidal beaks

Anything else is reported as ``DEGENERATE_OTHER``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .jets import ZERO_TOL, Jet, JetOrderError, iterated_directional, zero_tol


class Tag(str, enum.Enum):
    REGULAR = "Regular"
    CUSPIDAL_EDGE = "CuspidalEdge"
    SWALLOWTAIL = "Swallowtail"
    CUSPIDAL_BUTTERFLY = "CuspidalButterfly"
    CUSPIDAL_LIPS = "CuspidalLips"
    CUSPIDAL_BEAKS = "CuspidalBeaks"
    DEGENERATE_OTHER = "DegenerateOther"
    RANK_ZERO = "RankZero"

    def __str__(self) -> str:
        return self.value


#: tags whose identifier has a nonzero differential at the point
FIRST_ORDER_TAGS = frozenset({Tag.CUSPIDAL_EDGE, Tag.SWALLOWTAIL, Tag.CUSPIDAL_BUTTERFLY})
#: tags whose identifier has a critical point there
SECOND_ORDER_TAGS = frozenset({Tag.CUSPIDAL_LIPS, Tag.CUSPIDAL_BEAKS})


class NotSingular(ArithmeticError):
    pass


@dataclass
class SingularityClass:
    tag: Tag
    witness: dict = field(default_factory=dict)

    def __str__(self) -> str:
        return str(self.tag)


def criteria_witness(lam: Jet, eta: tuple[Jet, Jet], depth: int = 3) -> dict:
    """Values entering the decision tree, with eta scaled to unit length at p."""
    nrm = float(np.hypot(eta[0].value, eta[1].value))
    if nrm == 0.0:
        raise ValueError("null vector field vanishes at the point")
    unit = (eta[0] / nrm, eta[1] / nrm)
    depth = min(depth, lam.order)
    derivs = iterated_directional(lam, unit, depth)
    w = {
        "lambda": lam.value,
        "grad": lam.gradient.tolist(),
        "eta": [eta[0].value, eta[1].value],
        "det_hess": float(np.linalg.det(lam.hessian)) if lam.order >= 2 else None,
    }
    for k, d in enumerate(derivs, start=1):
        w[f"eta{k}_lambda"] = d.value
    return w


def decide(w: dict, scale: float, tol: float = ZERO_TOL) -> Tag:
    """Apply the decision tree to a witness (assumes a rank-one singular point)."""
    lim = zero_tol(scale, tol)

    def nz(key):
        val = w.get(key)
        if val is None:
            raise JetOrderError(f"witness {key} unavailable; raise the jet order")
        return abs(val) > lim

    if float(np.hypot(*w["grad"])) > lim:
        if nz("eta1_lambda"):
            return Tag.CUSPIDAL_EDGE
        if nz("eta2_lambda"):
            return Tag.SWALLOWTAIL
        if nz("eta3_lambda"):
            return Tag.CUSPIDAL_BUTTERFLY
        return Tag.DEGENERATE_OTHER
    dh = w["det_hess"]
    if dh is None:
        raise JetOrderError("Hessian unavailable; raise the jet order")
    lim2 = zero_tol(scale * scale, tol)
    if dh > lim2:
        return Tag.CUSPIDAL_LIPS
    if dh < -lim2 and nz("eta2_lambda"):
        return Tag.CUSPIDAL_BEAKS
    return Tag.DEGENERATE_OTHER


def identifier_scale(lam: Jet, up_to: int = 3) -> float:
    return float(max(np.abs(lam.degree_slice(d)).max() for d in range(min(up_to, lam.order) + 1)))


def classify_rank_one(lam: Jet, eta: tuple[Jet, Jet], tol: float = ZERO_TOL) -> SingularityClass:
    w = criteria_witness(lam, eta)
    return SingularityClass(decide(w, identifier_scale(lam), tol), w)
