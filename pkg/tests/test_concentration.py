import math

import numpy as np
import pytest

from qnlpsim.concentration import (
    ConcentrationSpec,
    deviation_samples,
    deviation_values,
    lemma6_bound,
    lemma6_worked_bound,
    levy_deviation_medians,
    mcdiarmid_bound,
    mean_check,
    tail_check,
)
from qnlpsim.errors import ExponentOrder, PLessThanOne
from qnlpsim.qstate import random_pure_state


def test_single_unitary_gives_pure_output(rng):
    # m=1: Lambda(phi) is pure, so Y = 2(1 - 1/d) at p=1
    ys = deviation_values(2, 1, 1, 200, rng)
    np.testing.assert_allclose(ys, 1.0, atol=1e-10)
    ys = deviation_values(4, 1, 1, 50, rng)
    np.testing.assert_allclose(ys, 1.5, atol=1e-10)


def test_expectation_bound_values():
    assert lemma6_bound(4, 64, 1, 2) == pytest.approx(math.sqrt(4 / 64 + 2 / 4))
    direct = (2 / 256 + 3 / 32) ** (1 / 3)
    assert direct == pytest.approx(0.466564, abs=1e-6)
    assert lemma6_bound(4, 16, 2, 3) == pytest.approx(direct, abs=1e-12)
    assert lemma6_worked_bound(4, 16, 2) == pytest.approx(direct, abs=1e-12)
    assert lemma6_worked_bound(4, 64, 1) == pytest.approx(0.25)
    assert lemma6_worked_bound(4, 64, 3) is None
    with pytest.raises(ExponentOrder):
        lemma6_bound(4, 4, 2, 2)
    with pytest.raises(PLessThanOne):
        lemma6_bound(4, 4, 0.5, 2)


def test_mcdiarmid_values():
    # one-sided exp(-m t^2 / 2^((2-p)/p)) at m=64, p=1, t=0.3
    v = mcdiarmid_bound(64, 1, 0.3, one_sided=True)
    assert v == pytest.approx(math.exp(-64 * 0.09 / 2))
    assert v == pytest.approx(0.05613476, rel=1e-6)
    assert mcdiarmid_bound(64, 1, 0.3) == pytest.approx(2 * v)
    assert mcdiarmid_bound(100, 2, 0.3, one_sided=True) == pytest.approx(math.exp(-9), rel=1e-12)
    assert mcdiarmid_bound(100, 2, 0.3, one_sided=True) == pytest.approx(1.234098e-4, rel=1e-5)


def test_bounded_difference():
    assert ConcentrationSpec(m=8, p=1).bounded_difference == pytest.approx(0.25)
    assert ConcentrationSpec(m=8, p=2).bounded_difference == pytest.approx(math.sqrt(2) / 8)
    with pytest.raises(ValueError):
        ConcentrationSpec(m=8, trials=10)


def test_bounded_difference_holds(rng):
    # swapping one unitary moves Y by at most 2^(1/p)/m
    from qnlpsim.ruc import UnitaryEnsemble, haar_unitary, randomizing_distance

    d, m = 3, 6
    phi = np.eye(d)[0]
    for p in (1, 2):
        for _ in range(50):
            u = haar_unitary(d, rng, size=m)
            y0 = randomizing_distance(UnitaryEnsemble(u), phi, p)
            u2 = u.copy()
            u2[int(rng.integers(m))] = haar_unitary(d, rng)
            y1 = randomizing_distance(UnitaryEnsemble(u2), phi, p)
            assert abs(y1 - y0) <= 2 ** (1 / p) / m + 1e-12


def test_mean_below_worked_bound(rng):
    ys = deviation_values(4, 64, 1, 2000, rng)
    report = mean_check(ys, lemma6_worked_bound(4, 64, 1))
    assert report.passed and report.mean < 0.25


def test_mean_below_general_bound_p2(rng):
    ys = deviation_values(4, 16, 2, 1000, rng)
    assert mean_check(ys, lemma6_bound(4, 16, 2, 3)).passed


@pytest.mark.slow
@pytest.mark.parametrize("p,r", [(1, 2), (2, 3)])
def test_mean_sweep_grid(p, r, rng):
    for d in (2, 4, 8):
        for m in sorted({d, 2 * d, d * math.ceil(math.log(d))}):
            ys = deviation_values(d, m, p, 400, rng)
            assert mean_check(ys, lemma6_bound(d, m, p, r)).passed, (d, m, p)


def test_tail_check(rng):
    report = tail_check(4, 64, 1, 0.3, 2000, rng)
    assert report.passed and report.empirical == 0.0


def test_tail_check_needs_trials(rng):
    with pytest.raises(ValueError):
        tail_check(4, 64, 1, 0.3, 100, rng)


def test_reference_state_invariance():
    ref = random_pure_state(3, np.random.default_rng(5)).vector
    a = deviation_values(3, 10, 1, 3000, np.random.default_rng(1))
    b = deviation_values(3, 10, 1, 3000, np.random.default_rng(2), reference=ref)
    assert abs(a.mean() - b.mean()) <= 4 * math.hypot(a.std(), b.std()) / math.sqrt(3000)


def test_deviation_decreases_with_m(rng):
    means = [deviation_values(4, m, 1, 300, rng).mean() for m in (4, 16, 64)]
    assert means[0] > means[1] > means[2]


def test_deviation_samples_records(rng):
    samples = deviation_samples(2, 4, 1, 5, rng)
    assert [s.trial for s in samples] == list(range(5))
    assert all(s.d == 2 and s.m == 4 for s in samples)


def test_levy_trend(rng):
    med = levy_deviation_medians([4, 16, 64, 256], 500, 5, rng)
    assert np.all(np.diff(med) < 0)


def test_worked_bound_p1_d4_m16():
    assert lemma6_worked_bound(4, 16, 1) == pytest.approx(0.5)


def test_general_bound_vanishes_with_m():
    # decays like m^(-1/3) at p=2, r=3
    vals = [lemma6_bound(4, m, 2, 3) for m in (10, 10**3, 10**6, 10**12)]
    assert all(a > b for a, b in zip(vals, vals[1:]))
    assert vals[-1] < 1e-3


def test_mcdiarmid_examples():
    assert mcdiarmid_bound(100, 1, 0.5) == pytest.approx(2 * math.exp(-12.5))
    assert mcdiarmid_bound(100, 1, 0.5) == pytest.approx(7.45e-6, rel=1e-3)
    assert mcdiarmid_bound(100, 1, 0.0) == 2
    e1 = math.log(mcdiarmid_bound(50, 1, 0.4, one_sided=True))
    e2 = math.log(mcdiarmid_bound(100, 1, 0.4, one_sided=True))
    assert e2 == pytest.approx(2 * e1)


def test_tail_beyond_max_is_zero(rng):
    ys = deviation_values(2, 8, 1, 1000, rng)
    base = lemma6_bound(2, 8, 1, 2)
    report = tail_check(2, 8, 1, max(0.0, ys.max() - base) + 1e-9, 1000, None, values=ys)
    assert report.empirical == 0.0


def test_deviation_rejects_zero_trials(rng):
    with pytest.raises(ValueError):
        deviation_values(2, 2, 1, 0, rng)
