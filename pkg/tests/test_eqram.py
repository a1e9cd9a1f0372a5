import math

import numpy as np
import pytest

from qnlpsim.eqram import (
    PIPELINE,
    QramRecord,
    cap_m_star,
    m_star,
    m_star_array,
    netize,
    prepare_netized_sample,
    qram_load,
    reduced_nlp_solve,
    reduced_round_success,
)
from qnlpsim.errors import DimensionMismatch
from qnlpsim.fields import Field
from qnlpsim.net import EpsilonNet, build_net
from qnlpsim.nlp import NlpParams, NoiseModel, per_round_rate_stated
from qnlpsim.qstate import PureState, random_pure_states


def test_m_star_values():
    assert m_star(4) == 3
    assert m_star(2) == 2
    assert m_star(16) == 7
    assert m_star(16, constant=0.5) == 4
    assert m_star(10**6) == math.ceil(math.sqrt(1e6 * math.log(1e6)))
    with pytest.raises(ValueError):
        m_star(1)


def test_m_star_array_agrees():
    ds = np.arange(2, 3000)
    np.testing.assert_array_equal(m_star_array(ds), [m_star(int(d)) for d in ds])


def test_cap_m_star():
    assert cap_m_star(7, 5, 1 << 22) == 7
    assert cap_m_star(7, 5, 5**4) == 3
    assert cap_m_star(2, 5, 1) == 1


def test_netize_idempotent_and_bounded(rng):
    net = build_net(2, 0.7, rng)
    states = random_pure_states(2, rng, 100)
    reduced, prov = netize(states, net)
    assert all(p.distance <= 0.7 for p in prov)
    again, prov2 = netize(reduced, net)
    assert len(again) == len(reduced)
    assert all(p.distance <= 1e-7 for p in prov2)


def test_netize_collapses_neighbours():
    net = EpsilonNet(1.0, 2, np.eye(2))
    near0 = np.array([1, 0.05]) / math.hypot(1, 0.05)
    reduced, prov = netize([np.array([1, 0]), near0, np.array([0, 1])], net)
    assert len(reduced) == 2
    assert [p.net_index for p in prov] == [0, 0, 1]


def test_netize_dimension_check():
    net = EpsilonNet(1.0, 2, np.eye(2))
    with pytest.raises(DimensionMismatch):
        netize([np.array([1, 0, 0])], net)


def test_prepare_netized_sample_shape(rng):
    F = Field(5)
    s = prepare_netized_sample(F, 3, F.vector([1, 2, 3]), NoiseModel(), rng)
    assert s.state.amplitudes.size == 625
    assert np.count_nonzero(np.abs(s.state.amplitudes) > 1e-12) == 125


def test_per_round_target_value():
    # weak form at q=5, m*=3, t=1: 1/(20*125)
    assert per_round_rate_stated(1, 5, 4) == pytest.approx(0.0004)
    assert per_round_rate_stated(1, 5, 3) == pytest.approx(0.002)


def test_reduced_solver_zero_noise(rng):
    F = Field(5)
    x = F.vector([4, 0, 2])
    report = reduced_nlp_solve(NlpParams(L=10, M=3, t=0), F, 3, x, NoiseModel(), rng)
    assert report.run.correct and report.m_star == 3
    assert report.pipeline == PIPELINE
    assert report.per_round_target_weak == pytest.approx(0.0004)


def test_reduced_solver_length_check(rng):
    F = Field(5)
    with pytest.raises(DimensionMismatch):
        reduced_nlp_solve(NlpParams(L=1, M=1, t=0), F, 3, F.vector([1]), NoiseModel(), rng)


def test_reduced_round_success_structured(rng):
    F = Field(5)
    model = NoiseModel("bounded-uniform", t=1, structured=True)
    rate = reduced_round_success(F, 2, F.vector([1, 2]), model, 2000, rng)
    assert rate >= 1 / (20 * 25)


def test_qram_load():
    F = Field(3)
    recs = [
        QramRecord(0, 1 / math.sqrt(2), F.vector([1, 2])),
        QramRecord(2, 1j / math.sqrt(2), F.vector([0, 1])),
    ]
    s = qram_load(recs, 3)
    assert s.n_registers == 3
    amps = s.amplitudes.reshape(3, 3, 3)
    assert amps[0, 1, 2] == pytest.approx(1 / math.sqrt(2))
    assert amps[2, 0, 1] == pytest.approx(1j / math.sqrt(2))
    assert np.count_nonzero(amps) == 2


def test_qram_load_validation():
    F = Field(3)
    with pytest.raises(ValueError):
        qram_load([QramRecord(0, 0.5, F.vector([1]))], 3)
    with pytest.raises(ValueError):
        qram_load([], 3)


def test_netize_net_points_unchanged(rng):
    net = build_net(2, 0.7, rng)
    reduced, prov = netize(net.points, net)
    assert len(reduced) == len(net)
    assert [p.net_index for p in prov] == list(range(len(net)))


def test_netize_perturbed_pair_collapses(rng):
    net = build_net(2, 0.7, rng)
    base = net.points[0]
    kick = rng.standard_normal(2) + 1j * rng.standard_normal(2)
    near = base + 0.05 * kick / np.linalg.norm(kick)
    near /= np.linalg.norm(near)
    pair = np.stack([base, near])
    assert 2 * np.sqrt(1 - abs(np.vdot(base, near)) ** 2) <= 0.35
    reduced, prov = netize(pair, net)
    assert len(reduced) == 1 and prov[0].net_index == prov[1].net_index == 0


def test_netized_sample_q2_m1(rng):
    F = Field(2)
    s = prepare_netized_sample(F, 1, F.vector([1]), NoiseModel(), rng)
    np.testing.assert_allclose(s.state.amplitudes, [2**-0.5, 0, 0, 2**-0.5], atol=1e-12)


def test_reduced_zero_noise_q3_short_budget():
    F = Field(3)
    wins = 0
    for seed in range(1000):
        rng = np.random.default_rng([3, seed])
        x = F.vector(rng.integers(0, 3, 2))
        wins += reduced_nlp_solve(NlpParams(L=5, M=1, t=0), F, 2, x, NoiseModel(), rng).run.correct
    # misses need c = 0 on all 5 rounds: (1/3)^5
    assert wins / 1000 >= 0.98


@pytest.mark.slow
def test_reduced_structured_rate_q7():
    F = Field(7)
    x = F.vector([3, 5])
    model = NoiseModel("bounded-uniform", t=1, structured=True)
    rounds = 100_000
    rate = reduced_round_success(F, 2, x, model, rounds, np.random.default_rng(77))
    target = 1 / (20 * 7)
    assert rate >= target - 3 * math.sqrt(target * (1 - target) / rounds)
