"""Independent numerical oracles used by the test suite.

Nothing here touches the jet engine: derivatives come from central finite
differences on plain float evaluations, sharpened by Richardson
extrapolation.
"""

from __future__ import annotations

from math import comb

import numpy as np


#: absolute floor below which an extended-precision oracle value is noise
MP_NOISE_FLOOR = 1e-20


def _central_weights(n: int) -> list[tuple[float, float]]:
    """Offsets and weights of the n-th central difference (step 1)."""
    # n-th difference with half-integer offsets, exact for degree n polynomials
    return [((n / 2.0) - k, (-1) ** k * comb(n, k)) for k in range(n + 1)]


def _partial_fd(fn, p, i: int, j: int, h: float) -> float:
    total = 0.0
    for du, wu in _central_weights(i):
        for dv, wv in _central_weights(j):
            total += wu * wv * fn(p[0] + du * h, p[1] + dv * h)
    return total / h ** (i + j)


def richardson_partial(fn, p, i: int, j: int, h: float = 0.08, levels: int = 4) -> float:
    """d^(i+j) fn / du^i dv^j at p.

    The central stencil has an error expansion in even powers of h, so each
    Richardson level removes one more power of h^2.
    """
    if i + j == 0:
        return float(fn(*p))
    table = [_partial_fd(fn, p, i, j, h / 2 ** k) for k in range(levels)]
    for level in range(1, levels):
        factor = 4.0 ** level
        table = [(factor * table[k + 1] - table[k]) / (factor - 1.0) for k in range(len(table) - 1)]
    return table[0]


def scaled_taylor(fn, p, order: int, **kw) -> np.ndarray:
    """Scaled Taylor coefficients d^(i+j) fn / (i! j!) for i + j <= order."""
    from math import factorial

    out = np.zeros((order + 1, order + 1))
    for i in range(order + 1):
        for j in range(order + 1 - i):
            out[i, j] = richardson_partial(fn, p, i, j, **kw) / (factorial(i) * factorial(j))
    return out


def newton_1d(g, dg, x0: float, tol: float = 1e-13, max_iter: int = 50) -> float:
    x = x0
    for _ in range(max_iter):
        step = g(x) / dg(x)
        x -= step
        if abs(step) < tol:
            return x
    raise RuntimeError("newton_1d did not converge")


def mp_function(node, dps: int = 40):
    """Evaluate a parsed expression tree in mpmath at ``dps`` digits.

    The walker is written against the node dataclasses only, so it shares no
    arithmetic with the float or jet evaluators.  The returned callable takes
    and returns mpmath numbers (convert the result with ``float``).
    """
    import mpmath

    from frontgeom import expr as E

    funcs = {"sqrt": mpmath.sqrt, "sin": mpmath.sin, "cos": mpmath.cos,
             "exp": mpmath.exp, "log": mpmath.log}

    def ev(n, u, v):
        if isinstance(n, E.Const):
            return mpmath.mpf(n.value)
        if isinstance(n, E.Var):
            return u if n.name == "u" else v
        if isinstance(n, E.Neg):
            return -ev(n.operand, u, v)
        if isinstance(n, E.Pow):
            return ev(n.base, u, v) ** n.exponent
        if isinstance(n, E.Call):
            return funcs[n.func](ev(n.arg, u, v))
        a, b = ev(n.left, u, v), ev(n.right, u, v)
        if n.op == "+":
            return a + b
        if n.op == "-":
            return a - b
        if n.op == "*":
            return a * b
        return a / b

    def fn(u, v):
        with mpmath.workdps(dps):
            return ev(node, mpmath.mpf(u), mpmath.mpf(v))

    return fn


def mp_richardson_partial(node, p, i: int, j: int, h: float = 1e-3, levels: int = 3,
                          dps: int = 40) -> float:
    """:func:`richardson_partial` run in extended precision on an expression tree."""
    import mpmath

    fn = mp_function(node, dps)
    with mpmath.workdps(dps):
        pm = (mpmath.mpf(p[0]), mpmath.mpf(p[1]))
        return float(richardson_partial(fn, pm, i, j, h=mpmath.mpf(h), levels=levels))
