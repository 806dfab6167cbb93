"""Truncated bivariate Taylor arithmetic.

A :class:`Jet` stores the scaled Taylor coefficients of a scalar function
h(u, v) around a base point (u0, v0)::

    coeffs[i, j] = d^(i+j) h / du^i dv^j (u0, v0) / (i! j!),   i + j <= order

Arithmetic on jets reproduces the Taylor coefficients of the exact composite
function truncated at ``order``.  Differentiating a jet drops one order.
Binary operations between jets of different order truncate to the smaller
order; jets anchored at different base points cannot be mixed.
"""

from __future__ import annotations

import math
from typing import Callable, Sequence

import numpy as np

DEFAULT_ORDER = 6

#: relative zero tolerance used wherever a geometric condition reads "= 0"
ZERO_TOL = 1e-9


class JetError(ArithmeticError):
    """Base class for jet arithmetic failures."""


class JetDomainError(JetError):
    """Division by a jet with vanishing constant term, sqrt of a non-positive one, ..."""


class JetOrderError(JetError):
    """A derivative was requested beyond the available jet order."""


_MASKS: dict[int, np.ndarray] = {}


def _mask(order: int) -> np.ndarray:
    m = _MASKS.get(order)
    if m is None:
        i, j = np.indices((order + 1, order + 1))
        m = (i + j) <= order
        _MASKS[order] = m
    return m


_PRODUCT_INDEX: dict[int, tuple[np.ndarray, np.ndarray, np.ndarray]] = {}


def _product_index(order: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Flat index triples (a, b, a*b) of the truncated bivariate Cauchy product."""
    idx = _PRODUCT_INDEX.get(order)
    if idx is None:
        n = order + 1
        terms = [(i, j) for i in range(n) for j in range(n - i)]
        ia, ib, ic = [], [], []
        for i, j in terms:
            for k, l in terms:
                if i + j + k + l <= order:
                    ia.append(i * n + j)
                    ib.append(k * n + l)
                    ic.append((i + k) * n + j + l)
        idx = (np.array(ia), np.array(ib), np.array(ic))
        _PRODUCT_INDEX[order] = idx
    return idx


def zero_tol(scale: float, tol: float = ZERO_TOL) -> float:
    """Scale-aware zero threshold ``tol * (1 + scale)``."""
    return tol * (1.0 + abs(scale))


class Jet:
    """Order-``order`` jet of a scalar field at ``base``."""

    __slots__ = ("coeffs", "order", "base")
    __array_priority__ = 1000

    def __init__(self, coeffs, order: int, base: tuple[float, float] = (0.0, 0.0)):
        c = np.zeros((order + 1, order + 1))
        src = np.asarray(coeffs, dtype=float)
        n = min(src.shape[0], order + 1)
        m = min(src.shape[1], order + 1)
        c[:n, :m] = src[:n, :m]
        c[~_mask(order)] = 0.0
        self.coeffs = c
        self.order = int(order)
        self.base = (float(base[0]), float(base[1]))

    @classmethod
    def _raw(cls, coeffs: np.ndarray, order: int, base) -> Jet:
        # trusted constructor: coeffs already masked and shaped
        obj = object.__new__(cls)
        obj.coeffs = coeffs
        obj.order = order
        obj.base = base
        return obj

    # -- constructors ------------------------------------------------------

    @classmethod
    def constant(cls, value: float, base=(0.0, 0.0), order: int = DEFAULT_ORDER) -> Jet:
        c = np.zeros((order + 1, order + 1))
        c[0, 0] = value
        return cls._raw(c, order, (float(base[0]), float(base[1])))

    @classmethod
    def variable(cls, name: str, base=(0.0, 0.0), order: int = DEFAULT_ORDER) -> Jet:
        """The coordinate function ``u`` or ``v`` expanded at ``base``."""
        c = np.zeros((order + 1, order + 1))
        if name == "u":
            c[0, 0] = base[0]
            if order >= 1:
                c[1, 0] = 1.0
        elif name == "v":
            c[0, 0] = base[1]
            if order >= 1:
                c[0, 1] = 1.0
        else:
            raise ValueError(f"unknown variable {name!r}")
        return cls._raw(c, order, (float(base[0]), float(base[1])))

    @classmethod
    def from_polynomial(cls, terms: dict[tuple[int, int], float], base=(0.0, 0.0),
                        order: int = DEFAULT_ORDER) -> Jet:
        """Jet whose scaled coefficients are given directly by ``terms``."""
        c = np.zeros((order + 1, order + 1))
        for (i, j), a in terms.items():
            if i + j <= order:
                c[i, j] = a
        return cls._raw(c, order, (float(base[0]), float(base[1])))

    # -- access ------------------------------------------------------------

    @property
    def value(self) -> float:
        return float(self.coeffs[0, 0])

    def coeff(self, i: int, j: int) -> float:
        if i + j > self.order:
            raise JetOrderError(f"coefficient ({i},{j}) beyond order {self.order}")
        return float(self.coeffs[i, j])

    def partial(self, i: int, j: int) -> float:
        """The partial derivative d^(i+j)/du^i dv^j at the base point."""
        return self.coeff(i, j) * math.factorial(i) * math.factorial(j)

    @property
    def gradient(self) -> np.ndarray:
        return np.array([self.partial(1, 0), self.partial(0, 1)])

    @property
    def hessian(self) -> np.ndarray:
        huv = self.partial(1, 1)
        return np.array([[self.partial(2, 0), huv], [huv, self.partial(0, 2)]])

    def max_abs(self) -> float:
        return float(np.abs(self.coeffs).max())

    def degree_slice(self, d: int) -> np.ndarray:
        """Coefficients of total degree ``d`` as a vector (i = d..0)."""
        return np.array([self.coeffs[i, d - i] for i in range(d, -1, -1)])

    def is_zero(self, tol: float = ZERO_TOL) -> bool:
        return self.max_abs() <= tol

    # -- structural --------------------------------------------------------

    def truncate(self, order: int) -> Jet:
        if order >= self.order:
            return self
        c = self.coeffs[: order + 1, : order + 1].copy()
        c[~_mask(order)] = 0.0
        return Jet._raw(c, order, self.base)

    def swap(self) -> Jet:
        """Exchange the roles of u and v."""
        return Jet._raw(self.coeffs.T.copy(), self.order, (self.base[1], self.base[0]))

    def du(self) -> Jet:
        if self.order < 1:
            raise JetOrderError("cannot differentiate an order-0 jet")
        k = self.order
        c = self.coeffs[1:, :k] * np.arange(1, k + 1)[:, None]
        return Jet._raw(c, k - 1, self.base)

    def dv(self) -> Jet:
        if self.order < 1:
            raise JetOrderError("cannot differentiate an order-0 jet")
        k = self.order
        c = self.coeffs[:k, 1:] * np.arange(1, k + 1)[None, :]
        return Jet._raw(c, k - 1, self.base)

    def evaluate(self, du: float, dv: float) -> float:
        """Evaluate the truncated Taylor polynomial at base + (du, dv)."""
        k = self.order
        pu = du ** np.arange(k + 1)
        pv = dv ** np.arange(k + 1)
        return float(pu @ self.coeffs @ pv)

    # -- arithmetic --------------------------------------------------------

    def _coerce(self, other) -> tuple[np.ndarray, np.ndarray, int]:
        if isinstance(other, Jet):
            if other.base != self.base:
                raise ValueError(f"jet base points differ: {self.base} vs {other.base}")
            k = min(self.order, other.order)
            a = self.coeffs if self.order == k else self.truncate(k).coeffs
            b = other.coeffs if other.order == k else other.truncate(k).coeffs
            return a, b, k
        b = np.zeros_like(self.coeffs)
        b[0, 0] = float(other)
        return self.coeffs, b, self.order

    def __add__(self, other) -> Jet:
        if not isinstance(other, Jet):
            c = self.coeffs.copy()
            c[0, 0] += float(other)
            return Jet._raw(c, self.order, self.base)
        a, b, k = self._coerce(other)
        return Jet._raw(a + b, k, self.base)

    __radd__ = __add__

    def __sub__(self, other) -> Jet:
        if not isinstance(other, Jet):
            c = self.coeffs.copy()
            c[0, 0] -= float(other)
            return Jet._raw(c, self.order, self.base)
        a, b, k = self._coerce(other)
        return Jet._raw(a - b, k, self.base)

    def __rsub__(self, other) -> Jet:
        return (-self) + other

    def __neg__(self) -> Jet:
        return Jet._raw(-self.coeffs, self.order, self.base)

    def __pos__(self) -> Jet:
        return self

    def __mul__(self, other) -> Jet:
        if not isinstance(other, Jet):
            return Jet._raw(self.coeffs * float(other), self.order, self.base)
        a, b, k = self._coerce(other)
        ia, ib, ic = _product_index(k)
        n = (k + 1) * (k + 1)
        c = np.bincount(ic, weights=a.ravel()[ia] * b.ravel()[ib], minlength=n)
        return Jet._raw(c.reshape(k + 1, k + 1), k, self.base)

    __rmul__ = __mul__

    def __truediv__(self, other) -> Jet:
        if not isinstance(other, Jet):
            other = float(other)
            if other == 0.0:
                raise JetDomainError("division by zero scalar")
            return Jet._raw(self.coeffs / other, self.order, self.base)
        return self * other.reciprocal()

    def __rtruediv__(self, other) -> Jet:
        return self.reciprocal() * float(other)

    def __pow__(self, n) -> Jet:
        if isinstance(n, (int, np.integer)):
            return self.pow_int(int(n))
        return self.pow_real(float(n))

    def pow_int(self, n: int) -> Jet:
        if n < 0:
            return self.reciprocal().pow_int(-n)
        result = Jet.constant(1.0, self.base, self.order)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    # -- elementary functions ----------------------------------------------

    def compose(self, taylor: Sequence[float]) -> Jet:
        """Return g(self) given ``taylor[k] = g^(k)(a0) / k!`` for k = 0..order."""
        k = self.order
        delta = self.coeffs.copy()
        delta[0, 0] = 0.0
        dj = Jet._raw(delta, k, self.base)
        out = np.zeros_like(self.coeffs)
        out[0, 0] = taylor[0]
        power = None
        for n in range(1, k + 1):
            power = dj if power is None else power * dj
            out += taylor[n] * power.coeffs
        return Jet._raw(out, k, self.base)

    def _series(self, fn: Callable[[float, int], float]) -> Jet:
        a0 = self.value
        return self.compose([fn(a0, n) / math.factorial(n) for n in range(self.order + 1)])

    def reciprocal(self) -> Jet:
        a0 = self.value
        if a0 == 0.0 or abs(a0) <= 1e-300:
            raise JetDomainError("reciprocal of a jet with zero constant term")
        return self.compose([(-1.0) ** n / a0 ** (n + 1) for n in range(self.order + 1)])

    def pow_real(self, p: float) -> Jet:
        a0 = self.value
        if a0 <= 0.0:
            raise JetDomainError(f"real power of a jet with constant term {a0!r} <= 0")
        coeffs = []
        binom = 1.0
        for n in range(self.order + 1):
            coeffs.append(binom * a0 ** (p - n))
            binom *= (p - n) / (n + 1)
        return self.compose(coeffs)

    def sqrt(self) -> Jet:
        if self.value <= 0.0:
            raise JetDomainError(f"sqrt of a jet with constant term {self.value!r} <= 0")
        return self.pow_real(0.5)

    def exp(self) -> Jet:
        return self._series(lambda a, n: math.exp(a))

    def sin(self) -> Jet:
        return self._series(lambda a, n: math.sin(a + n * math.pi / 2))

    def cos(self) -> Jet:
        return self._series(lambda a, n: math.cos(a + n * math.pi / 2))

    def log(self) -> Jet:
        a0 = self.value
        if a0 <= 0.0:
            raise JetDomainError(f"log of a jet with constant term {a0!r} <= 0")
        coeffs = [math.log(a0)] + [(-1.0) ** (n + 1) / (n * a0 ** n) for n in range(1, self.order + 1)]
        return self.compose(coeffs)

    def __repr__(self) -> str:
        terms = []
        for d in range(self.order + 1):
            for i in range(d, -1, -1):
                a = self.coeffs[i, d - i]
                if a != 0.0:
                    terms.append(f"({i},{d - i}):{a:.6g}")
        return f"Jet(order={self.order}, base={self.base}, {{{', '.join(terms)}}})"


def directional(h: Jet, w: Sequence[Jet]) -> Jet:
    """Derivative of ``h`` along the vector field ``w = (w1, w2)``: w1 h_u + w2 h_v."""
    return w[0] * h.du() + w[1] * h.dv()


def iterated_directional(h: Jet, w: Sequence[Jet], k: int) -> list[Jet]:
    """``[w h, w^2 h, ..., w^k h]``; each application consumes one order."""
    if h.order < k:
        raise JetOrderError(f"need jet order >= {k}, have {h.order}")
    out = []
    cur = h
    for _ in range(k):
        cur = directional(cur, w)
        out.append(cur)
    return out


class JetVec3:
    """Three jets sharing base point; a jet-valued map into R^3."""

    __slots__ = ("x", "y", "z")

    def __init__(self, x: Jet, y: Jet, z: Jet):
        if not (x.base == y.base == z.base):
            raise ValueError("JetVec3 components must share a base point")
        k = min(x.order, y.order, z.order)
        self.x, self.y, self.z = x.truncate(k), y.truncate(k), z.truncate(k)

    @property
    def components(self) -> tuple[Jet, Jet, Jet]:
        return (self.x, self.y, self.z)

    @property
    def order(self) -> int:
        return self.x.order

    @property
    def base(self) -> tuple[float, float]:
        return self.x.base

    @property
    def value(self) -> np.ndarray:
        return np.array([self.x.value, self.y.value, self.z.value])

    def _map(self, fn) -> JetVec3:
        return JetVec3(fn(self.x), fn(self.y), fn(self.z))

    def du(self) -> JetVec3:
        return self._map(Jet.du)

    def dv(self) -> JetVec3:
        return self._map(Jet.dv)

    def swap(self) -> JetVec3:
        return self._map(Jet.swap)

    def truncate(self, order: int) -> JetVec3:
        return self._map(lambda c: c.truncate(order))

    def along(self, w: Sequence[Jet]) -> JetVec3:
        return self._map(lambda c: directional(c, w))

    def __add__(self, other: JetVec3) -> JetVec3:
        return JetVec3(self.x + other.x, self.y + other.y, self.z + other.z)

    def __sub__(self, other: JetVec3) -> JetVec3:
        return JetVec3(self.x - other.x, self.y - other.y, self.z - other.z)

    def __neg__(self) -> JetVec3:
        return self._map(Jet.__neg__)

    def __mul__(self, s) -> JetVec3:
        return JetVec3(self.x * s, self.y * s, self.z * s)

    __rmul__ = __mul__

    def __truediv__(self, s) -> JetVec3:
        if isinstance(s, Jet):
            r = s.reciprocal()
            return self * r
        return JetVec3(self.x / s, self.y / s, self.z / s)

    def dot(self, other: JetVec3) -> Jet:
        return self.x * other.x + self.y * other.y + self.z * other.z

    def cross(self, other: JetVec3) -> JetVec3:
        return JetVec3(
            self.y * other.z - self.z * other.y,
            self.z * other.x - self.x * other.z,
            self.x * other.y - self.y * other.x,
        )

    def norm(self) -> Jet:
        return self.dot(self).sqrt()

    def normalized(self) -> JetVec3:
        return self / self.norm()

    def max_abs(self) -> float:
        return max(c.max_abs() for c in self.components)

    def __repr__(self) -> str:
        return f"JetVec3(order={self.order}, base={self.base}, value={self.value})"


def det3(a: JetVec3, b: JetVec3, c: JetVec3) -> Jet:
    return a.cross(b).dot(c)
