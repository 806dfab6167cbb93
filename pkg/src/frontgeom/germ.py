"""Order and rational order of function germs, read off finite jets."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .jets import ZERO_TOL, Jet


class UndecidableOrder(ArithmeticError):
    """The denominator vanishes to the full jet order; no finite answer."""


@dataclass(frozen=True)
class GermOrder:
    """``ord_p h``: exact when ``exact`` is true, otherwise only ``>= value``."""

    value: int
    exact: bool = True

    @classmethod
    def at_least(cls, n: int) -> GermOrder:
        return cls(n, exact=False)

    def __str__(self) -> str:
        return str(self.value) if self.exact else f">={self.value}"

    def __add__(self, other: GermOrder) -> GermOrder:
        return GermOrder(self.value + other.value, self.exact and other.exact)


def order(h: Jet, tol: float = ZERO_TOL) -> GermOrder:
    """Lowest total degree carrying a nonzero Taylor coefficient.

    A degree-d coefficient counts as zero when below
    ``tol * max(1, largest |coefficient| of degree <= d)``.
    """
    running = 1.0
    for d in range(h.order + 1):
        block = np.abs(h.degree_slice(d))
        running = max(running, float(block.max()))
        if block.max() > tol * running:
            return GermOrder(d)
    return GermOrder.at_least(h.order + 1)


@dataclass(frozen=True)
class RationalOrder:
    value: int
    exact: bool = True

    @property
    def rationally_bounded(self) -> bool:
        return self.exact and self.value == 0

    @property
    def rationally_continuous(self) -> bool:
        return self.exact and self.value == 1

    def __str__(self) -> str:
        return str(self.value) if self.exact else f">={self.value}"


def rational_order(h1: Jet, h2: Jet, tol: float = ZERO_TOL) -> RationalOrder:
    """``ord_p(h1/h2) = ord_p h1 - ord_p h2``."""
    o2 = order(h2, tol)
    if not o2.exact:
        raise UndecidableOrder(f"denominator vanishes to order {o2}")
    o1 = order(h1, tol)
    return RationalOrder(o1.value - o2.value, o1.exact)
