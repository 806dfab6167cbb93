import math
import random

import pytest

from frontgeom import catalog
from frontgeom.expr import (
    ArityError,
    DomainError,
    ParseError,
    eval_jet,
    eval_scalar,
    free_variables,
    parse_expr,
    parse_surface,
    to_string,
)

from corpus import random_expression

ROUND_TRIP = [
    "u", "v", "2.5", "-u", "u + v", "u - v - 1", "u - (v - 1)", "u * v / 3", "u / (v * 3)",
    "u^2", "-u^2", "(-u)^2", "u^2^1", "sin(u) * cos(v)", "exp(u / 2)", "log(2 + v^2)",
    "sqrt(1 + u^2 + v^2)", "1/2*u^2 + u*v^2 + u^4", "pi * u", "(u + v)^3 - u*v",
    "cos(u)^2 + sin(u)^2", "u^(-2)", "1e-3 * u", "2*u*v - 3/8*u^4 + u^5",
]


@pytest.mark.parametrize("text", ROUND_TRIP)
def test_round_trip_is_a_fixed_point(text):
    node = parse_expr(text)
    printed = to_string(node)
    assert parse_expr(printed) == node
    assert to_string(parse_expr(printed)) == printed


def test_random_round_trips_keep_values():
    rng = random.Random(3)
    for _ in range(40):
        node = parse_expr(random_expression(rng))
        again = parse_expr(to_string(node))
        p = (rng.uniform(-1, 1), rng.uniform(-1, 1))
        assert eval_scalar(again, p) == eval_scalar(node, p)


@pytest.mark.parametrize("text, point, value", [
    ("-u^2", (2.0, 0.0), -4.0),
    ("2^3^2", (0.0, 0.0), 512.0),
    ("u - v - 1", (5.0, 2.0), 2.0),
    ("u / v / 2", (8.0, 2.0), 2.0),
    ("1 + 2*3", (0.0, 0.0), 7.0),
    ("pi", (0.0, 0.0), math.pi),
    ("u^(-2)", (2.0, 0.0), 0.25),
])
def test_precedence_and_associativity(text, point, value):
    assert eval_scalar(parse_expr(text), point) == pytest.approx(value, rel=1e-15)


@pytest.mark.parametrize("text", [
    "u+", "sin(u", "foo(u)", "sin(u,v)", "u v", "2^u", "u^1.5", "w+1", "3$", "", "()",
])
def test_parse_errors(text):
    with pytest.raises(ParseError):
        parse_expr(text)


def test_parse_error_reports_position():
    with pytest.raises(ParseError) as err:
        parse_expr("u + $")
    assert "position 4" in str(err.value)


def test_surface_arity_and_shape():
    with pytest.raises(ArityError):
        parse_surface("(u, v)")
    with pytest.raises(ParseError):
        parse_surface("u")
    s = parse_surface("(u, v, u*v)")
    assert s.evaluate((2.0, 3.0)) == (2.0, 3.0, 6.0)


def test_catalog_surfaces_parse():
    for name in catalog.SURFACES:
        s = catalog.get(name)
        assert free_variables(s.components[0]) | free_variables(s.components[2]) <= {"u", "v"}


@pytest.mark.parametrize("text, point", [("log(u)", (-1.0, 0.0)), ("sqrt(u)", (-1.0, 0.0)),
                                         ("1/u", (0.0, 0.0))])
def test_domain_errors(text, point):
    node = parse_expr(text)
    with pytest.raises(DomainError):
        eval_scalar(node, point)
    with pytest.raises(DomainError):
        eval_jet(node, point, 3)


def test_jet_value_matches_scalar():
    rng = random.Random(5)
    for _ in range(30):
        node = parse_expr(random_expression(rng))
        p = (rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5))
        assert eval_jet(node, p, 3).value == pytest.approx(eval_scalar(node, p), rel=1e-13, abs=1e-15)
