import pytest

from frontgeom import catalog, edge
from frontgeom.geometry import local_geometry
from frontgeom.parallel import (
    SingularParallelPoint,
    active_branch,
    boundedness_report,
    classify_parallel,
    generic_kappa_nu_parallel,
    germ_order_of_identifier,
    limiting_normal_curvature_parallel,
    make_parallel,
    parallel_curvatures,
    parallel_front,
)
from frontgeom.singularities import NotSingular, Tag

from corpus import all_instances

NON_EDGE = [i for i in all_instances() if i.expected in (Tag.SWALLOWTAIL, Tag.CUSPIDAL_BUTTERFLY,
                                                          Tag.CUSPIDAL_BEAKS)]


@pytest.mark.parametrize("inst", all_instances(), ids=lambda i: i.label)
def test_classification_of_constructed_instances(inst):
    ps = make_parallel(inst.parsed, inst.t)
    assert classify_parallel(ps, inst.point).tag == inst.expected
    assert germ_order_of_identifier(ps, inst.point).value == (2 if inst.expected in
                                                              (Tag.CUSPIDAL_LIPS, Tag.CUSPIDAL_BEAKS) else 1)


def test_regular_points_and_zero_distance():
    ps = make_parallel(catalog.get("beaks"), 0.5)
    assert classify_parallel(ps, (0.0, 0.0)).tag == Tag.REGULAR
    assert active_branch(ps, (0.0, 0.0))[0] is None
    with pytest.raises(NotSingular):
        limiting_normal_curvature_parallel(ps, (0.0, 0.0))
    with pytest.raises(ValueError):
        make_parallel(catalog.get("beaks"), 0.0)


@pytest.mark.parametrize("name, point, t", [("lips", (0.2, 0.1), 0.4), ("torus", (0.3, 1.0), 0.3),
                                            ("moulding", (0.4, -0.2), -0.7)])
def test_parallel_curvatures_match_direct_computation(name, point, t):
    pc = parallel_curvatures(make_parallel(catalog.get(name), t), point)
    assert pc.max_discrepancy() < 1e-7 * max(1.0, pc.K.max_abs(), pc.H.max_abs())


def test_parallel_curvatures_refuse_singular_points():
    with pytest.raises(SingularParallelPoint):
        parallel_curvatures(make_parallel(catalog.get("beaks"), 1.0), (0.0, 0.0))


def test_boundedness_of_the_examples():
    beaks = boundedness_report(make_parallel(catalog.get("beaks"), 1.0), (0.0, 0.0))
    assert beaks.tag == Tag.CUSPIDAL_BEAKS
    assert str(beaks.ord_kappa2) == "4" and not beaks.rationally_bounded and beaks.bounded_near
    assert beaks.rational_order_Kt.value == 2
    edge_rep = boundedness_report(make_parallel(catalog.get("parallel-edge"), 1.0), (0.0, 0.0))
    assert edge_rep.rationally_bounded and edge_rep.bounded_near


@pytest.mark.parametrize("inst", NON_EDGE, ids=lambda i: i.label)
def test_generic_kappa_nu_extrapolates_to_the_closed_form(inst):
    ps = make_parallel(inst.parsed, inst.t)
    gen = generic_kappa_nu_parallel(ps, inst.point)
    closed = limiting_normal_curvature_parallel(ps, inst.point)
    assert gen["method"] == "extrapolated"
    assert abs(gen["kappa_nu"] - closed) <= max(gen["error_estimate"], 1e-12)
    assert abs(gen["kappa_nu"] - closed) < 1e-5


def test_lips_point_has_no_singular_branches():
    ps = make_parallel(catalog.get("lips"), 1.0)
    with pytest.raises(edge.NotCuspidalEdge):
        generic_kappa_nu_parallel(ps, (0.0, 0.0))


def test_edge_kappa_nu_is_cross_checked():
    s = catalog.get("elliptic-tube")
    p = (0.4, 0.3)
    ps = make_parallel(s, 1.0 / local_geometry(s, p).pd.kappa1.value)
    value = limiting_normal_curvature_parallel(ps, p, cross_check=True)
    assert value == pytest.approx(edge.invariants_at(parallel_front(ps, 1), p).kappa_nu, rel=1e-9)
