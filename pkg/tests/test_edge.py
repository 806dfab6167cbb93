import math

import numpy as np
import pytest

from frontgeom import catalog
from frontgeom.edge import (
    DegenerateSeed,
    NotCuspidalEdge,
    critical_branch_directions,
    invariants_along_curve,
    invariants_at,
    trace_from_critical,
    trace_zero_curve,
)
from frontgeom.focal import focal_front, make_focal
from frontgeom.geometry import local_geometry
from frontgeom.jets import Jet
from frontgeom.parallel import make_parallel, parallel_front


def circle(q):
    u = Jet.variable("u", q, 2)
    v = Jet.variable("v", q, 2)
    return u * u + v * v - 1.0


def test_trace_follows_a_circle():
    c = trace_zero_curve(circle, (1.1, 0.0), steps=30, h=0.05, both_ways=True)
    assert len(c) == 61 and c.seed_index == 30
    np.testing.assert_allclose(np.hypot(*c.samples.T), 1.0, atol=1e-10)
    np.testing.assert_allclose(np.einsum("ij,ij->i", c.samples, c.tangents), 0.0, atol=1e-12)
    steps = np.linalg.norm(np.diff(c.samples, axis=0), axis=1)
    assert np.all(np.abs(steps - 0.05) < 1e-3)
    r = c.reversed()
    assert r.seed_index == 30 and np.allclose(r.samples[0], c.samples[-1])


def test_degenerate_seed_and_saddle_branches():
    def saddle(q):
        u = Jet.variable("u", q, 2)
        v = Jet.variable("v", q, 2)
        return u * u - 4.0 * v * v

    with pytest.raises(DegenerateSeed):
        trace_zero_curve(saddle, (0.0, 0.0))
    dirs = critical_branch_directions(saddle((0.0, 0.0)).hessian)
    slopes = sorted(abs(w[1] / w[0]) for w in dirs)
    assert slopes == pytest.approx([0.5, 0.5])
    branches = trace_from_critical(saddle, (0.0, 0.0), steps=5, eps=1e-2)
    assert len(branches) == 4
    for br in branches:
        assert np.all(np.abs(br.samples[:, 0] ** 2 - 4 * br.samples[:, 1] ** 2) < 1e-9)
    assert critical_branch_directions(np.eye(2)) == []


def _edge_front():
    s = catalog.get("elliptic-tube")
    p = (0.4, 0.3)
    t = 1.0 / local_geometry(s, p).pd.kappa1.value
    return parallel_front(make_parallel(s, t), 1), p


def test_invariants_under_orientation_changes():
    front, p = _edge_front()
    base = invariants_at(front, p)
    flipped_normal = invariants_at(front.with_normal_flipped(), p)
    flipped_null = invariants_at(front.with_null_flipped(), p)
    assert flipped_normal.kappa_nu == pytest.approx(-base.kappa_nu, rel=1e-12)
    assert flipped_normal.kappa_s == pytest.approx(base.kappa_s, rel=1e-12)
    assert flipped_null.kappa_nu == pytest.approx(base.kappa_nu, rel=1e-12)
    assert flipped_null.kappa_s == pytest.approx(base.kappa_s, rel=1e-12)
    reversed_tangent = invariants_at(front, p, tangent=-np.array(base.sign_data["xi"]))
    assert reversed_tangent.kappa_s == pytest.approx(base.kappa_s, rel=1e-12)


def test_invariants_reject_points_off_the_edge():
    front, p = _edge_front()
    with pytest.raises(NotCuspidalEdge):
        invariants_at(front, (p[0] + 0.05, p[1]))


def test_invariants_along_a_traced_edge_are_smooth():
    fs = make_focal(catalog.get("inverted-revolution"), 2)
    front = focal_front(fs)
    curve = trace_zero_curve(lambda q: front.identifier(q), (0.0, 0.3), steps=8, h=5e-3, both_ways=True)
    reps = invariants_along_curve(front, curve)
    assert all(r is not None for r in reps)
    ks = np.array([r.kappa_s for r in reps])
    assert np.all(np.isfinite(ks))
    assert np.max(np.abs(np.diff(ks, 2))) < 1e-2 * max(1.0, np.max(np.abs(ks)))
    assert math.isclose(reps[curve.seed_index].point[1], 0.3, abs_tol=1e-12)
