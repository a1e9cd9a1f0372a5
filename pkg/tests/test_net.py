import math

import numpy as np
import pytest

from qnlpsim.errors import DimensionMismatch, EmptyNet, ResourceCap
from qnlpsim.net import (
    EpsilonNet,
    LazyNet,
    build_net,
    cardinality_bound,
    coverage_check,
    load_net,
    min_separation,
    nearest,
    nearest_many,
    save_net,
)
from qnlpsim.qstate import PureState, random_pure_states, trace_distance_pure


def test_cardinality_bound_values():
    assert cardinality_bound(2, 1.0) == 625
    assert cardinality_bound(2, 0.5) == 10_000
    assert cardinality_bound(2, 1.0, "schatten", p=1) == 10**4
    assert cardinality_bound(2, 1.0, "schatten", p=2) == pytest.approx((10 * math.sqrt(2)) ** 4)


@pytest.mark.parametrize("eps", [0.5, 0.7, 1.0])
def test_build_net_d2(eps, rng):
    net = build_net(2, eps, rng)
    assert len(net) <= net.budget
    assert min_separation(net) > eps
    assert coverage_check(net, 10_000, rng).misses == 0


def test_build_net_d3_separated(rng):
    net = build_net(3, 1.0, rng)
    assert min_separation(net) > 1.0
    assert len(net) <= cardinality_bound(3, 1.0)
    assert coverage_check(net, 2000, rng).miss_fraction < 0.01


def test_build_net_eps2_single_point(rng):
    net = build_net(2, 2.0, rng)
    assert len(net) == 1
    assert coverage_check(net, 1000, rng).passed


def test_build_net_limits(rng):
    with pytest.raises(ResourceCap):
        build_net(5, 1.0, rng)
    with pytest.raises(ValueError):
        build_net(2, 0.0, rng)


def test_coverage_ablation_detects_holes(rng):
    net = build_net(2, 0.5, rng)
    half = net.subset(np.arange(0, len(net), 2))
    report = coverage_check(half, 10_000, rng)
    assert report.misses > 0 and report.max_distance > 0.5


def test_nearest_examples():
    net = EpsilonNet(1.0, 2, np.eye(2))
    k, dist = nearest(net, [1, 0])
    assert k == 0 and dist == pytest.approx(0)
    plus = np.array([1, 1]) / np.sqrt(2)
    k, dist = nearest(net, plus)
    assert dist == pytest.approx(math.sqrt(2))
    # boundary: exactly eps from the only point is still covered
    one = EpsilonNet(math.sqrt(2), 2, np.eye(2)[:1])
    k, dist = nearest(one, plus)
    assert k == 0 and dist == pytest.approx(one.epsilon) and dist <= one.epsilon + 1e-12
    with pytest.raises(DimensionMismatch):
        nearest(net, [1, 0, 0])
    with pytest.raises(EmptyNet):
        nearest(EpsilonNet(1.0, 2, np.zeros((0, 2))), [1, 0])


def test_nearest_many_matches_nearest(rng):
    net = build_net(2, 0.7, rng)
    states = random_pure_states(2, rng, 200)
    idx, dist = nearest_many(net, states)
    for s, k, r in zip(states, idx, dist):
        k1, r1 = nearest(net, s)
        assert r == pytest.approx(r1, abs=1e-9)
        assert trace_distance_pure(PureState(net.points[k]), s) == pytest.approx(r, abs=1e-9)


def test_save_load_roundtrip(tmp_path, rng):
    net = build_net(2, 1.0, rng, seed=11)
    path = tmp_path / "net.csv"
    save_net(net, path)
    back = load_net(path)
    np.testing.assert_array_equal(back.points, net.points)
    assert (back.epsilon, back.d, back.strategy, back.seed) == (1.0, 2, net.strategy, 11)


def test_load_rejects_bad_header(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("# something else\n1,0,0,0\n")
    with pytest.raises(ValueError):
        load_net(path)


def test_lazy_net(rng):
    lazy = LazyNet(2, 0.5)
    states = random_pure_states(2, rng, 500)
    for s in states:
        k, dist = lazy.query(s)
        assert dist <= 0.5
    frozen = lazy.freeze()
    assert min_separation(frozen) > 0.5
    assert len(frozen) <= cardinality_bound(2, 0.5)
