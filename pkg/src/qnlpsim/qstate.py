"""Dense statevectors over ``n`` registers of dimension ``q``.

Register 0 is the most significant mixed-radix digit, so the outcome
``(a_0, ..., a_{n-1})`` lives at index ``a_0 q^{n-1} + ... + a_{n-1}``.
The quantum Fourier transform follows ``|a> -> q^{-1/2} sum_b w^{ab} |b>`` with
``w = exp(2 pi i / q)``; numerically this is the orthonormal inverse DFT.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DimensionMismatch, IndexOutOfRange, NotNormalized
from .fields import FieldVector
from .limits import DEFAULT_LIMITS, check_amplitudes

NORM_ATOL = 1e-10
MEASURE_ATOL = 1e-8


@dataclass(frozen=True, eq=False)
class StateVector:
    amplitudes: np.ndarray
    n_registers: int
    dim: int

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=np.complex128).ravel()
        if self.n_registers < 1 or self.dim < 2:
            raise ValueError("need n_registers >= 1 and dim >= 2")
        if amps.size != self.dim**self.n_registers:
            raise DimensionMismatch(
                f"{amps.size} amplitudes for {self.n_registers} registers of dim {self.dim}"
            )
        amps.flags.writeable = False
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def from_tensor(cls, tensor: np.ndarray) -> "StateVector":
        return cls(tensor.reshape(-1), tensor.ndim, tensor.shape[0])

    @property
    def tensor(self) -> np.ndarray:
        return self.amplitudes.reshape((self.dim,) * self.n_registers)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    @property
    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def index_of(self, outcome) -> int:
        digits = _digits(outcome)
        if len(digits) != self.n_registers or any(not 0 <= x < self.dim for x in digits):
            raise IndexOutOfRange(f"outcome {digits} invalid for {self.n_registers}x{self.dim}")
        return int(np.ravel_multi_index(digits, (self.dim,) * self.n_registers))

    def outcome_of(self, index: int) -> tuple:
        return tuple(int(v) for v in np.unravel_index(index, (self.dim,) * self.n_registers))


def _digits(outcome) -> tuple:
    if isinstance(outcome, FieldVector):
        return outcome.values
    return tuple(int(v) for v in outcome)


def basis_state(q: int, outcome, limits=DEFAULT_LIMITS) -> StateVector:
    digits = _digits(outcome)
    if not digits or any(not 0 <= v < q for v in digits):
        raise ValueError(f"outcome {digits} not in [0, {q})^n")
    check_amplitudes(q, len(digits), limits)
    amps = np.zeros(q ** len(digits), dtype=np.complex128)
    amps[np.ravel_multi_index(digits, (q,) * len(digits))] = 1.0
    return StateVector(amps, len(digits), q)


def qft_matrix(q: int) -> np.ndarray:
    """Dense QFT over Z_q, entry ``[b, a] = w^{ab} / sqrt(q)``."""
    k = np.arange(q)
    return np.exp(2j * np.pi * np.outer(k, k) / q) / np.sqrt(q)


def apply_qft(state: StateVector, register: int, inverse: bool = False) -> StateVector:
    if not 0 <= register < state.n_registers:
        raise IndexOutOfRange(f"register {register} not in [0, {state.n_registers})")
    t = state.tensor
    out = np.fft.fft(t, axis=register, norm="ortho") if inverse else np.fft.ifft(
        t, axis=register, norm="ortho"
    )
    return StateVector.from_tensor(out)


def apply_qft_all(state: StateVector, inverse: bool = False) -> StateVector:
    """QFT on every register at once."""
    t = state.tensor
    out = np.fft.fftn(t, norm="ortho") if inverse else np.fft.ifftn(t, norm="ortho")
    return StateVector.from_tensor(out)


def measure_all(state: StateVector, rng: np.random.Generator, shots: int | None = None):
    """Born-rule sample of every register.

    Returns a tuple of digits for a single shot, or an ``(shots, n)`` integer
    array when ``shots`` is given. The state itself is left untouched.
    """
    probs = state.probabilities
    total = probs.sum()
    if abs(total - 1.0) > MEASURE_ATOL:
        raise NotNormalized(f"squared norm {total!r} deviates from 1")
    cdf = np.cumsum(probs / total)
    cdf[-1] = 1.0
    u = rng.random(1 if shots is None else shots)
    idx = np.searchsorted(cdf, u, side="right")
    outcomes = np.stack(np.unravel_index(idx, (state.dim,) * state.n_registers), axis=-1)
    if shots is None:
        return tuple(int(v) for v in outcomes[0])
    return outcomes


def amplitude(state: StateVector, outcome) -> complex:
    return complex(state.amplitudes[state.index_of(outcome)])


@dataclass(frozen=True, eq=False)
class PureState:
    vector: np.ndarray

    def __post_init__(self):
        v = np.array(self.vector, dtype=np.complex128).ravel()
        if abs(np.linalg.norm(v) - 1.0) > NORM_ATOL:
            raise NotNormalized(f"pure state norm {np.linalg.norm(v)!r}")
        v.flags.writeable = False
        object.__setattr__(self, "vector", v)

    @classmethod
    def normalized(cls, vector) -> "PureState":
        v = np.asarray(vector, dtype=np.complex128)
        return cls(v / np.linalg.norm(v))

    @property
    def dim(self) -> int:
        return self.vector.size

    def projector(self) -> np.ndarray:
        return np.outer(self.vector, self.vector.conj())


def random_pure_states(d: int, rng: np.random.Generator, size: int) -> np.ndarray:
    """Haar-random unit vectors in C^d as rows of a ``(size, d)`` array."""
    z = rng.standard_normal((size, d)) + 1j * rng.standard_normal((size, d))
    return z / np.linalg.norm(z, axis=1, keepdims=True)


def random_pure_state(d: int, rng: np.random.Generator) -> PureState:
    return PureState(random_pure_states(d, rng, 1)[0])


def _vec(psi) -> np.ndarray:
    return psi.vector if isinstance(psi, PureState) else np.asarray(psi, dtype=np.complex128)


def trace_distance_pure(psi, phi) -> float:
    """Trace norm of ``|psi><psi| - |phi><phi|``, i.e. ``2 sqrt(1 - |<psi|phi>|^2)``."""
    a, b = _vec(psi), _vec(phi)
    if a.shape != b.shape:
        raise DimensionMismatch(f"dimensions {a.size} and {b.size}")
    overlap = abs(np.vdot(a, b)) ** 2
    return 2.0 * float(np.sqrt(max(0.0, 1.0 - overlap)))


def trace_distances(points: np.ndarray, psi) -> np.ndarray:
    """Pure-state trace distance from each row of ``points`` to ``psi``."""
    overlaps = np.abs(points.conj() @ _vec(psi)) ** 2
    return 2.0 * np.sqrt(np.clip(1.0 - overlaps, 0.0, None))


def bloch_vector(psi) -> np.ndarray:
    a, b = _vec(psi)
    return np.array(
        [2 * (a.conjugate() * b).real, 2 * (a.conjugate() * b).imag, abs(a) ** 2 - abs(b) ** 2]
    )


def state_from_bloch(r: Sequence[float]) -> PureState:
    x, y, z = np.asarray(r, dtype=float) / np.linalg.norm(r)
    theta = np.arccos(np.clip(z, -1.0, 1.0))
    phi = np.arctan2(y, x)
    return PureState([np.cos(theta / 2), np.exp(1j * phi) * np.sin(theta / 2)])
