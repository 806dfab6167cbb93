import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from frontgeom.germ import GermOrder, UndecidableOrder, order, rational_order
from frontgeom.jets import Jet

u = Jet.variable("u", order=6)
v = Jet.variable("v", order=6)


@pytest.mark.parametrize("h, want", [
    (Jet.constant(2.0), 0), (u, 1), (u * v, 2), (u * u - v * v, 2), (u ** 3 + v ** 5, 3),
    (1e-12 * u + v * v, 2), (u ** 6, 6),
])
def test_order(h, want):
    assert order(h) == GermOrder(want)


def test_order_of_zero_is_a_lower_bound():
    o = order(Jet.constant(0.0))
    assert not o.exact and o.value == 7 and str(o) == ">=7"


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 3), st.integers(0, 3), st.floats(0.5, 3.0), st.floats(0.5, 3.0))
def test_order_is_additive(a, b, c1, c2):
    f = c1 * u ** a + v ** (a + 1)
    g = c2 * v ** b + u ** (b + 2)
    assert order(f * g) == order(f) + order(g)


def test_rational_order():
    r = rational_order(u * v, u * u - v * v)
    assert r.exact and r.value == 0 and r.rationally_bounded
    r = rational_order(u ** 3, u * v)
    assert r.value == 1 and r.rationally_continuous and not r.rationally_bounded
    assert rational_order(u, v ** 2).value == -1


def test_rational_order_with_vanishing_denominator():
    with pytest.raises(UndecidableOrder):
        rational_order(u, Jet.constant(0.0))
