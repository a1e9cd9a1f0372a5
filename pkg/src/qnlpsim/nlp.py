"""Quantum LWE samples, the Bernstein-Vazirani round and the NLP solver loop.

A sample over ``d`` data registers and one ancilla is the uniform superposition
of ``|a>|a.x + delta_a mod q>``. The BV round applies the QFT to every register,
measures ``(b, c)`` and, for ``c != 0``, proposes ``x' = -b / c``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from functools import lru_cache
from typing import Callable, Optional

import numpy as np

from .errors import AlphaOutOfRange, BoundTooLarge, DimensionMismatch
from .fields import Field, FieldElement, FieldVector, centered_distance_array
from .limits import DEFAULT_LIMITS, check_amplitudes
from .qstate import StateVector, apply_qft_all, measure_all

NOISE_KINDS = ("zero", "bounded-uniform", "truncated-discrete-gaussian")


@dataclass(frozen=True)
class NoiseModel:
    """Per-sample noise distribution on the centered window ``[-t, t]``.

    With ``structured=True`` a whole sample shares one error vector ``eta``
    (components drawn from this distribution) and ``delta_a = a . eta``.
    Classical test queries always use independent per-query noise.
    """

    kind: str = "zero"
    t: int = 0
    sigma: float = 1.0
    structured: bool = False

    def __post_init__(self):
        if self.kind not in NOISE_KINDS:
            raise ValueError(f"unknown noise kind {self.kind!r}; expected one of {NOISE_KINDS}")
        if self.t < 0:
            raise ValueError("noise bound t must be >= 0")
        if self.kind == "truncated-discrete-gaussian" and self.sigma <= 0:
            raise ValueError("sigma must be positive")
        if self.kind == "zero":
            object.__setattr__(self, "t", 0)

    def validate(self, q: int):
        if 2 * self.t + 1 >= q:
            raise BoundTooLarge(
                f"t={self.t} with q={q}: acceptance window 2t+1={2 * self.t + 1} covers F_q"
            )

    def weights(self) -> tuple[np.ndarray, np.ndarray]:
        """Support ``k in [-t, t]`` and the probability of each offset."""
        ks = np.arange(-self.t, self.t + 1)
        if self.kind == "zero":
            return np.array([0]), np.array([1.0])
        if self.kind == "bounded-uniform":
            w = np.ones(ks.size)
        else:
            w = np.exp(-(ks**2) / (2.0 * self.sigma**2))
        return ks, w / w.sum()


def noise_offsets(model: NoiseModel, rng: np.random.Generator, size) -> np.ndarray:
    """Centered integer offsets in ``[-t, t]``."""
    ks, p = model.weights()
    if ks.size == 1:
        return np.zeros(size, dtype=np.int64)
    cdf = np.cumsum(p)
    cdf[-1] = 1.0
    return ks[np.searchsorted(cdf, rng.random(size), side="right")]


def sample_noise(model: NoiseModel, field: Field, rng: np.random.Generator) -> FieldElement:
    model.validate(field.q)
    return field(int(noise_offsets(model, rng, 1)[0]))


@lru_cache(maxsize=32)
def all_vectors(q: int, d: int) -> np.ndarray:
    """Every ``a in F_q^d`` as rows, in big-endian mixed-radix order."""
    grid = np.indices((q,) * d).reshape(d, -1).T
    grid.flags.writeable = False
    return grid


@dataclass(frozen=True, eq=False)
class SampleState:
    state: StateVector
    secret: FieldVector
    noise: np.ndarray  # delta_a residues, row-aligned with all_vectors(q, d)
    field: Field
    model: NoiseModel
    eta: Optional[FieldVector] = None

    @property
    def d(self) -> int:
        return len(self.secret)

    def noise_for(self, a) -> int:
        digits = a.values if isinstance(a, FieldVector) else tuple(int(v) for v in a)
        return int(self.noise[np.ravel_multi_index(digits, (self.field.q,) * self.d)])

    def noise_table(self) -> dict:
        grid = all_vectors(self.field.q, self.d)
        return {tuple(int(v) for v in a): int(n) for a, n in zip(grid, self.noise)}


def prepare_sample(
    field: Field,
    d: int,
    x: FieldVector,
    model: NoiseModel,
    rng: np.random.Generator,
    eta: Optional[FieldVector] = None,
    limits=DEFAULT_LIMITS,
) -> SampleState:
    """Build the superposed sample with a fresh noise realization."""
    q = field.q
    if len(x) != d:
        raise DimensionMismatch(f"secret has length {len(x)}, expected {d}")
    check_amplitudes(q, d + 1, limits)
    grid = all_vectors(q, d)
    if eta is not None or model.structured:
        if eta is None:
            model.validate(q)
            eta = FieldVector.from_array(noise_offsets(model, rng, d), field)
        noise = (grid @ eta.array) % q
    else:
        model.validate(q)
        noise = noise_offsets(model, rng, grid.shape[0]) % q
    values = (grid @ x.array + noise) % q
    amps = np.zeros(q ** (d + 1), dtype=np.complex128)
    amps[np.arange(grid.shape[0]) * q + values] = q ** (-d / 2)
    return SampleState(StateVector(amps, d + 1, q), x, noise, field, model, eta)


def bv_transform(sample: SampleState) -> StateVector:
    return apply_qft_all(sample.state)


def candidate_from_outcome(outcome, field: Field) -> Optional[FieldVector]:
    *b, c = outcome
    if c % field.q == 0:
        return None
    cinv = field.inverse(c)
    return FieldVector.from_array(-np.asarray(b, dtype=np.int64) * cinv, field)


def bv_round(sample: SampleState, rng: np.random.Generator) -> Optional[FieldVector]:
    """One BV measurement; ``None`` when the ancilla reads ``c = 0``."""
    return candidate_from_outcome(measure_all(bv_transform(sample), rng), sample.field)


def success_lower_bound(alpha: float, t: int) -> float:
    if not 0 <= alpha < 0.25:
        raise AlphaOutOfRange(f"alpha={alpha} outside [0, 1/4)")
    if t < 1:
        raise ValueError("t must be >= 1")
    return alpha / t * math.cos(2 * math.pi * alpha) ** 2


def ancilla_range(q: int, alpha_cutoff: Optional[float], t: int) -> np.ndarray:
    """Ancilla values counted as successes: all ``c != 0``, or ``1 <= c <= alpha q / t``."""
    if alpha_cutoff is None:
        return np.arange(1, q)
    cmax = math.floor(alpha_cutoff * q / max(t, 1) + 1e-12)
    return np.arange(1, min(cmax, q - 1) + 1)


def exact_success_probability(
    sample: SampleState, alpha_cutoff: Optional[float] = None, t: Optional[int] = None
) -> float:
    """Probability that the BV outcome is ``(-c x, c)`` for an admitted ``c``.

    Read off the transformed amplitudes. ``t`` defaults to the sample's noise
    bound (at least 1).
    """
    q, d = sample.field.q, sample.d
    t = sample.model.t if t is None else t
    cs = ancilla_range(q, alpha_cutoff, t)
    probs = bv_transform(sample).probabilities.reshape(q**d, q)
    b = (-np.outer(cs, sample.secret.array)) % q
    b_idx = np.ravel_multi_index(tuple(b.T), (q,) * d)
    return float(probs[b_idx, cs].sum())


def success_probability_closed_form(sample: SampleState, alpha_cutoff=None, t=None) -> float:
    """Same quantity from ``q^{-2d-1} |sum_a w^{c delta_a}|^2`` summed over admitted ``c``."""
    q, d = sample.field.q, sample.d
    t = sample.model.t if t is None else t
    cs = ancilla_range(q, alpha_cutoff, t)
    phases = np.exp(2j * np.pi * np.outer(cs, sample.noise) / q).sum(axis=1)
    return float((np.abs(phases) ** 2).sum() / q ** (2 * d + 1))


@dataclass(frozen=True)
class LweInstance:
    """A secret plus noise model: source of quantum samples and classical queries."""

    field: Field
    secret: FieldVector
    model: NoiseModel
    limits: object = DEFAULT_LIMITS

    def __post_init__(self):
        self.model.validate(self.field.q)

    @property
    def d(self) -> int:
        return len(self.secret)

    def sample_state(self, rng) -> SampleState:
        return prepare_sample(self.field, self.d, self.secret, self.model, rng, limits=self.limits)

    def query(self, rng) -> tuple[np.ndarray, int]:
        q = self.field.q
        a = rng.integers(0, q, size=self.d)
        delta = int(noise_offsets(self.model, rng, 1)[0])
        return a, int((a @ self.secret.array + delta) % q)


def test_candidate(
    candidate: FieldVector,
    M: int,
    oracle: Callable[[np.random.Generator], tuple],
    t: int,
    rng: np.random.Generator,
) -> bool:
    """Accept iff ``|b' - a'.x'| <= t`` (centered) on ``M`` fresh queries."""
    if M < 1:
        raise ValueError("M must be >= 1")
    q = candidate.field.q
    x = candidate.array
    for _ in range(M):
        a, value = oracle(rng)
        if centered_distance_array(value, int(np.asarray(a) @ x % q), q) > t:
            return False
    return True


test_candidate.__test__ = False  # not a pytest test


@dataclass(frozen=True)
class NlpParams:
    L: int
    M: int
    t: int
    ell: int = 1
    alpha: float = 0.125
    eta: float = 0.1

    def __post_init__(self):
        if self.L < 1 or self.M < 1:
            raise ValueError("L and M must be >= 1")
        if self.ell < 1:
            raise ValueError("ell must be >= 1")
        if not 0 <= self.alpha < 0.25:
            raise AlphaOutOfRange(f"alpha={self.alpha} outside [0, 1/4)")
        if not 0 < self.eta < 1:
            raise ValueError("eta must lie in (0, 1)")

    @classmethod
    def auto(cls, q: int, dim: int, t: int, eta: float, alpha: float = 0.125) -> "NlpParams":
        """``L = ceil(20 t ln(1/eta))``, ``M = 1``, ``ell = q^dim``."""
        L = max(1, math.ceil(20 * max(t, 1) * math.log(1.0 / eta)))
        return cls(L=L, M=1, t=t, ell=q**dim, alpha=alpha, eta=eta)


def per_round_rate(params: NlpParams, q: int, dim: int) -> float:
    """``ell / (20 t q^dim)`` with ``t`` floored at 1."""
    return params.ell / (20 * max(params.t, 1) * q**dim)


def per_round_rate_stated(t: int, q: int, dim: int) -> float:
    """``1 / (20 t q^(dim-1))`` with ``t`` floored at 1."""
    return 1.0 / (20 * max(t, 1) * q ** (dim - 1))


def failure_bound(params: NlpParams, q: int, dim: int) -> float:
    """``(1 - ell/(20 t q^dim))^L + (3t/q)^M L``; may exceed 1 (vacuous)."""
    t = max(params.t, 1)
    miss = max(0.0, 1.0 - per_round_rate(params, q, dim)) ** params.L
    return miss + (3 * t / q) ** params.M * params.L


@dataclass
class NlpRunReport:
    recovered: Optional[FieldVector]
    rounds_used: int
    empirical_success_rate: float
    paper_lower_bound: float
    paper_fail_bound: float
    seed: Optional[int] = None
    correct: bool = False
    exhausted: bool = False
    c_zero_rounds: int = 0
    notes: dict = dc_field(default_factory=dict)


def nlp_solve(
    params: NlpParams,
    instance: LweInstance,
    rng: np.random.Generator,
    seed: Optional[int] = None,
) -> NlpRunReport:
    """Run up to ``L`` BV rounds, testing each candidate with ``M`` queries.

    A ``c = 0`` outcome uses up its round and the loop moves on. The success
    rate counts rounds whose BV candidate equals the secret.
    """
    instance.model.validate(instance.field.q)
    q, d = instance.field.q, instance.d
    hits = zero_rounds = 0
    recovered = None
    rounds = 0
    for rounds in range(1, params.L + 1):
        cand = bv_round(instance.sample_state(rng), rng)
        if cand is None:
            zero_rounds += 1
            continue
        if cand == instance.secret:
            hits += 1
        if test_candidate(cand, params.M, instance.query, params.t, rng):
            recovered = cand
            break
    return NlpRunReport(
        recovered=recovered,
        rounds_used=rounds,
        empirical_success_rate=hits / rounds,
        paper_lower_bound=success_lower_bound(params.alpha, max(params.t, 1)),
        paper_fail_bound=failure_bound(params, q, d),
        seed=seed,
        correct=recovered is not None and recovered == instance.secret,
        exhausted=recovered is None,
        c_zero_rounds=zero_rounds,
        notes={"c_zero_convention": "c=0 outcomes consume their round and yield no candidate"},
    )
