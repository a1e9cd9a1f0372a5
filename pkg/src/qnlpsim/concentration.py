"""Monte-Carlo checks of the concentration bounds behind the randomizing channel.

The random variable throughout is ``Y = ||Lambda(phi) - 1/d||_p`` for a fixed
pure ``phi`` and a fresh ``m``-element Haar ensemble per trial.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import ExponentOrder, PLessThanOne, ResourceCap
from .qstate import random_pure_states
from .ruc import haar_unitary, maximally_mixed, schatten_norm

MAX_TRIAL_ELEMENTS = 1 << 26  # d * d * m complex entries per trial


@dataclass(frozen=True)
class DeviationSample:
    y: float
    d: int
    m: int
    p: float
    trial: int


@dataclass(frozen=True)
class ConcentrationSpec:
    m: int
    p: float = 1.0
    gamma: float = 2.0
    trials: int = 1000

    def __post_init__(self):
        if self.trials < 100:
            raise ValueError("trials must be >= 100")
        if self.m < 1:
            raise ValueError("m must be >= 1")

    @property
    def bounded_difference(self) -> float:
        """Per-coordinate change bound ``2^(1/p) / m``."""
        return 2 ** (1.0 / self.p) / self.m


def deviation_values(
    d: int,
    m: int,
    p: float,
    trials: int,
    rng: np.random.Generator,
    reference: Optional[np.ndarray] = None,
    chunk: int | None = None,
) -> np.ndarray:
    """``trials`` independent draws of ``Y`` (reference state ``|0>`` by default)."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if p < 1:
        raise PLessThanOne(f"p={p}")
    if d * d * m > MAX_TRIAL_ELEMENTS:
        raise ResourceCap(f"d*d*m = {d * d * m} exceeds {MAX_TRIAL_ELEMENTS}")
    if reference is None:
        reference = np.zeros(d, dtype=np.complex128)
        reference[0] = 1.0
    reference = np.asarray(reference, dtype=np.complex128)
    chunk = chunk or max(1, (1 << 20) // (d * d * m))
    mms = maximally_mixed(d)
    out = np.empty(trials)
    for start in range(0, trials, chunk):
        k = min(chunk, trials - start)
        u = haar_unitary(d, rng, size=k * m).reshape(k, m, d, d)
        v = u @ reference  # (k, m, d)
        lam = np.einsum("kmi,kmj->kij", v, v.conj()) / m
        out[start : start + k] = schatten_norm(lam - mms, p, hermitian=True)
    return out


def deviation_samples(d, m, p, trials, rng, reference=None) -> list[DeviationSample]:
    ys = deviation_values(d, m, p, trials, rng, reference)
    return [DeviationSample(float(y), d, m, p, i) for i, y in enumerate(ys)]


def lemma6_bound(d: int, m: int, p: float, r: float) -> float:
    """``(d^(1/p) / m^p + r / (m^(p-1) d^(1/p)))^(1/r)``."""
    if p < 1:
        raise PLessThanOne(f"p={p}")
    if not r > p:
        raise ExponentOrder(f"need r > p, got r={r}, p={p}")
    root = d ** (1.0 / p)
    return (root / m**p + r / (m ** (p - 1) * root)) ** (1.0 / r)


def lemma6_worked_bound(d: int, m: int, p: float) -> Optional[float]:
    """Closed forms worked out for two cases: ``sqrt(d/m)`` at p=1 and
    ``(sqrt(d)/m^2 + 3/(m sqrt(d)))^(1/3)`` at p=2. ``None`` otherwise."""
    if p == 1:
        return math.sqrt(d / m)
    if p == 2:
        return (math.sqrt(d) / m**2 + 3 / (m * math.sqrt(d))) ** (1 / 3)
    return None


def mcdiarmid_bound(m: int, p: float, tail: float, one_sided: bool = False) -> float:
    """``2 exp(-2 tail^2 / sum c_j^2)`` with ``c_j = 2^(1/p)/m``.

    The one-sided form drops the factor 2, which equals
    ``exp(-m tail^2 / 2^((2-p)/p))``.
    """
    if tail < 0:
        raise ValueError("tail must be >= 0")
    sum_c2 = 2 ** (2.0 / p) / m
    value = math.exp(-2 * tail**2 / sum_c2)
    return value if one_sided else 2 * value


def binomial_sigma(prob: float, trials: int) -> float:
    prob = min(max(prob, 0.0), 1.0)
    return math.sqrt(prob * (1 - prob) / trials)


@dataclass
class TailReport:
    d: int
    m: int
    p: float
    r: float
    tail: float
    trials: int
    threshold: float
    empirical: float
    bound: float
    sigma: float
    max_y: float
    passed: bool


def tail_check(
    d: int,
    m: int,
    p: float,
    tail: float,
    trials: int,
    rng: np.random.Generator,
    r: Optional[float] = None,
    values: Optional[np.ndarray] = None,
) -> TailReport:
    """Frequency of ``Y >= lemma6_bound + tail`` against the one-sided McDiarmid tail.

    Passes iff the frequency is at most the bound plus three binomial standard
    deviations evaluated at the bound.
    """
    if trials < 1000:
        raise ValueError("tail_check needs at least 1000 trials")
    r = p + 1 if r is None else r
    ys = deviation_values(d, m, p, trials, rng) if values is None else np.asarray(values)
    threshold = lemma6_bound(d, m, p, r) + tail
    empirical = float(np.mean(ys >= threshold))
    bound = mcdiarmid_bound(m, p, tail, one_sided=True)
    sigma = binomial_sigma(bound, trials)
    return TailReport(
        d, m, p, r, tail, trials, threshold, empirical, bound, sigma,
        float(ys.max()), empirical <= bound + 3 * sigma,
    )


@dataclass
class MeanReport:
    mean: float
    sem: float
    bound: float
    passed: bool


def mean_check(ys: np.ndarray, bound: float) -> MeanReport:
    """Sample mean of ``ys`` at most ``bound`` plus three standard errors."""
    ys = np.asarray(ys)
    mean = float(ys.mean())
    sem = float(ys.std(ddof=1) / math.sqrt(ys.size)) if ys.size > 1 else 0.0
    return MeanReport(mean, sem, bound, mean <= bound + 3 * sem)


def purity_samples(d: int, m: int, ensembles: int, rng: np.random.Generator) -> np.ndarray:
    """``||Lambda(|0><0|)||_2^2`` for independent Haar ensembles."""
    u = haar_unitary(d, rng, size=ensembles * m).reshape(ensembles, m, d, d)
    v = u[..., :, 0]
    lam = np.einsum("kmi,kmj->kij", v, v.conj()) / m
    return np.einsum("kij,kji->k", lam, lam).real


def levy_deviation_medians(
    dims: Sequence[int], n_states: int, repetitions: int, rng: np.random.Generator
) -> np.ndarray:
    """Median over repetitions of ``mean |F(psi) - E F|`` for ``F = <psi|P|psi>``.

    ``P`` projects onto the first ``d/2`` basis vectors, so ``E F = 1/2`` and
    ``F`` is 2-Lipschitz on the unit sphere.
    """
    medians = []
    for d in dims:
        devs = []
        for _ in range(repetitions):
            psi = random_pure_states(d, rng, n_states)
            f = (np.abs(psi[:, : d // 2]) ** 2).sum(axis=1)
            devs.append(np.abs(f - 0.5).mean())
        medians.append(np.median(devs))
    return np.asarray(medians)
