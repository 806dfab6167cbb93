"""Named test surfaces, as expression strings the parser accepts.

Every entry except the graph examples is parametrized by curvature lines.
"""

from __future__ import annotations

from .expr import SurfaceExpr, parse_surface

#: the beaks example (parallel at t = 1 is a cuspidal beaks at the origin)
BEAKS = "(u, v, 1/2*u^2 + u^4 + u^3*v)"
#: the lips example in the reading its unit normal forces
LIPS = "(u, v, 1/2*u^2 + u*v^2 + u^4)"
#: the lips example exactly as printed (its first term is linear in u)
LIPS_PRINTED = "(u, v, 1/2*u + u*v^2 + u^4)"

#: graphs whose parallel at t = 1 has the named singularity at the origin
PARALLEL_EDGE = "(u, v, 1/2*u^2 + u^3)"
PARALLEL_SWALLOWTAIL = "(u, v, 1/2*u^2 + u^2*v + u^4)"

TORUS = "((2 + cos(u))*cos(v), (2 + cos(u))*sin(v), sin(u))"
#: tube with an elliptic cross-section; its meridian curvature is not constant
ELLIPTIC_TUBE = "((3 + 2*cos(u))*cos(v), (3 + 2*cos(u))*sin(v), sin(u))"
#: surface of revolution, parabolic along u = 0 where the meridian curvature is critical
REVOLUTION = "((2 + u)*cos(v), (2 + u)*sin(v), 1/2*u^2 + u^4)"
#: profile (v/2 + v^3, v) swept along the normal lines of the ellipse (2 cos u, sin u)
MOULDING = (
    "(2*cos(u) + (1/2*v + v^3)*cos(u)/sqrt(cos(u)^2 + 4*sin(u)^2),"
    " sin(u) + (1/2*v + v^3)*2*sin(u)/sqrt(cos(u)^2 + 4*sin(u)^2),"
    " v)"
)
#: pseudosphere, Gaussian curvature -1 (use u > 0)
PSEUDOSPHERE = (
    "(2/(exp(u) + exp(-u))*cos(v),"
    " 2/(exp(u) + exp(-u))*sin(v),"
    " u - (exp(u) - exp(-u))/(exp(u) + exp(-u)))"
)


def inverted(components: tuple[str, str, str], center: tuple[float, float, float]) -> str:
    """Image of a surface under inversion in the unit sphere about ``center``.

    Inversions map curvature lines to curvature lines, so a curvature-line
    chart stays one; the principal curvatures then depend on both variables.
    """
    d = [f"(({x}) - {c!r})" for x, c in zip(components, center)]
    r2 = f"({d[0]}^2 + {d[1]}^2 + {d[2]}^2)"
    return "(" + ", ".join(f"{c!r} + {di}/{r2}" for c, di in zip(center, d)) + ")"


#: REVOLUTION inverted about a point of the tangent plane along u = 0.  The
#: circle u = 0 stays parabolic for one branch and is a ridge of the other,
#: with that curvature varying along the circle.
INVERTED_REVOLUTION = inverted(
    ("(2 + u)*cos(v)", "(2 + u)*sin(v)", "1/2*u^2 + u^4"), (0.5, 0.3, 0.0)
)

SURFACES: dict[str, str] = {
    "beaks": BEAKS,
    "lips": LIPS,
    "lips-printed": LIPS_PRINTED,
    "parallel-edge": PARALLEL_EDGE,
    "parallel-swallowtail": PARALLEL_SWALLOWTAIL,
    "torus": TORUS,
    "elliptic-tube": ELLIPTIC_TUBE,
    "revolution": REVOLUTION,
    "moulding": MOULDING,
    "pseudosphere": PSEUDOSPHERE,
    "inverted-revolution": INVERTED_REVOLUTION,
    "plane": "(u, v, 0)",
    "cylinder": "(cos(v), sin(v), u)",
    "elliptic-cylinder": "(2*cos(u), sin(u), v)",
}


def get(name: str) -> SurfaceExpr:
    return parse_surface(SURFACES[name])


def graph(height: str) -> str:
    return f"(u, v, {height})"
