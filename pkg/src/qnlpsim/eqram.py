"""Approximate QRAM: netized data and the reduced-size NLP solver.

Data states are replaced by their nearest net point before the sample is
built, and the sample itself lives on ``m* = ceil(c sqrt(d ln d))`` data
registers instead of ``d``. The reduced solver targets the reduced secret; how
that secret relates to the original one is recorded as provenance, not decoded.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from typing import Optional, Sequence

import numpy as np

from .errors import DimensionMismatch
from .fields import Field, FieldVector
from .limits import DEFAULT_LIMITS
from .net import EpsilonNet, nearest_many
from .nlp import (
    LweInstance,
    NlpParams,
    NlpRunReport,
    NoiseModel,
    bv_round,
    nlp_solve,
    per_round_rate,
    per_round_rate_stated,
    prepare_sample,
)
from .qstate import NORM_ATOL, PureState, StateVector, _vec


def m_star(d: int, constant: float = 1.0) -> int:
    """``ceil(constant * sqrt(d ln d))``."""
    if d < 2:
        raise ValueError("d must be >= 2")
    return math.ceil(constant * math.sqrt(d * math.log(d)) - 1e-12)


def m_star_array(d: np.ndarray, constant: float = 1.0) -> np.ndarray:
    d = np.asarray(d, dtype=float)
    return np.ceil(constant * np.sqrt(d * np.log(d)) - 1e-12).astype(np.int64)


def cap_m_star(m: int, q: int, max_amplitudes: int) -> int:
    """Largest ``k <= m`` with ``q^(k+1) <= max_amplitudes``."""
    k = m
    while k > 1 and q ** (k + 1) > max_amplitudes:
        k -= 1
    return k


@dataclass(frozen=True)
class QramRecord:
    address: int
    amplitude: complex
    datum: FieldVector


def qram_load(records: Sequence[QramRecord], q: int) -> StateVector:
    """``sum_j alpha_j |j>|0> -> sum_j alpha_j |j>|d_j>`` as one statevector.

    The address is written in base ``q`` on as many registers as needed,
    followed by the datum registers.
    """
    if not records:
        raise ValueError("no records")
    alphas = np.array([r.amplitude for r in records], dtype=np.complex128)
    if abs(np.linalg.norm(alphas) - 1) > NORM_ATOL:
        raise ValueError("record amplitudes must have unit norm")
    width = len(records[0].datum)
    if any(len(r.datum) != width or r.datum.field.q != q for r in records):
        raise DimensionMismatch("records must share datum length and field")
    addresses = [r.address for r in records]
    if len(set(addresses)) != len(addresses) or min(addresses) < 0:
        raise ValueError("addresses must be distinct and non-negative")
    n_addr = 1
    while q**n_addr <= max(addresses):
        n_addr += 1
    n = n_addr + width
    amps = np.zeros(q**n, dtype=np.complex128)
    for rec, a in zip(records, alphas):
        digits = np.unravel_index(rec.address, (q,) * n_addr) + tuple(rec.datum.values)
        amps[np.ravel_multi_index(digits, (q,) * n)] = a
    return StateVector(amps, n, q)


@dataclass(frozen=True)
class Provenance:
    source: int
    net_index: int
    distance: float


def netize(states, net: EpsilonNet) -> tuple[list[PureState], list[Provenance]]:
    """Replace each state by its nearest net point and merge duplicates.

    The reduced list keeps first-seen order of net points.
    """
    arr = np.array([_vec(s) for s in states])
    if arr.ndim != 2 or arr.shape[1] != net.d:
        raise DimensionMismatch(f"states must have dimension {net.d}")
    idx, dist = nearest_many(net, arr)
    provenance = [Provenance(i, int(k), float(r)) for i, (k, r) in enumerate(zip(idx, dist))]
    order = list(dict.fromkeys(int(k) for k in idx))
    return [PureState(net.points[k]) for k in order], provenance


@dataclass(frozen=True, eq=False)
class ReducedSample:
    m_star: int
    state: StateVector
    secret: FieldVector
    noise: np.ndarray
    provenance: tuple = ()


def prepare_netized_sample(
    field: Field,
    m_star: int,
    x_tilde: FieldVector,
    model: NoiseModel,
    rng: np.random.Generator,
    provenance: Sequence[Provenance] = (),
    limits=DEFAULT_LIMITS,
) -> ReducedSample:
    s = prepare_sample(field, m_star, x_tilde, model, rng, limits=limits)
    return ReducedSample(m_star, s.state, x_tilde, s.noise, tuple(provenance))


PIPELINE = (
    "load data states",
    "eps-QRAM: replace states by net points",
    "prepare netized sample on m*+1 registers",
    "QFT on all m*+1 registers",
    "computational-basis measurement",
)


@dataclass
class ReducedRunReport:
    run: NlpRunReport
    m_star: int
    per_round_target_stated: float
    per_round_target_weak: float
    per_round_target_proof: float
    composite_fail_bound: float
    pipeline: tuple = PIPELINE
    provenance: tuple = ()
    meta: dict = dc_field(default_factory=dict)


def reduced_nlp_solve(
    params: NlpParams,
    field: Field,
    m_star: int,
    x_tilde: FieldVector,
    model: NoiseModel,
    rng: np.random.Generator,
    provenance: Sequence[Provenance] = (),
    seed: Optional[int] = None,
    limits=DEFAULT_LIMITS,
) -> ReducedRunReport:
    """The NLP loop on fresh netized samples of size ``m*``."""
    if len(x_tilde) != m_star:
        raise DimensionMismatch(f"reduced secret has length {len(x_tilde)}, m*={m_star}")
    instance = LweInstance(field, x_tilde, model, limits)
    run = nlp_solve(params, instance, rng, seed=seed)
    return ReducedRunReport(
        run=run,
        m_star=m_star,
        per_round_target_stated=per_round_rate_stated(params.t, field.q, m_star),
        per_round_target_weak=per_round_rate_stated(params.t, field.q, m_star + 1),
        per_round_target_proof=per_round_rate(params, field.q, m_star),
        composite_fail_bound=run.paper_fail_bound,
        provenance=tuple(provenance),
        meta={"ell": params.ell, "L": params.L, "M": params.M},
    )


def reduced_round_success(
    field: Field,
    m_star: int,
    x_tilde: FieldVector,
    model: NoiseModel,
    rounds: int,
    rng: np.random.Generator,
    limits=DEFAULT_LIMITS,
) -> float:
    """Fraction of single BV rounds (fresh sample each) that return ``x_tilde``.

    A ``c = 0`` outcome counts as a failed round.
    """
    hits = 0
    for _ in range(rounds):
        s = prepare_sample(field, m_star, x_tilde, model, rng, limits=limits)
        cand = bv_round(s, rng)
        hits += cand is not None and cand == x_tilde
    return hits / rounds
