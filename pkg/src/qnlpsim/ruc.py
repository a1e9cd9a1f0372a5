"""Random unitary channels and their distance to the maximally mixed state."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, ExponentOrder, PLessThanOne, ResourceCap
from .limits import DEFAULT_LIMITS
from .qstate import _vec, random_pure_states

HERMITIAN_ATOL = 1e-10
PSD_ATOL = 1e-9
UNITARY_ATOL = 1e-9

PAULIS = np.array(
    [
        [[1, 0], [0, 1]],
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=np.complex128,
)


def haar_unitary(d: int, rng: np.random.Generator, size: int | None = None) -> np.ndarray:
    """Haar-distributed ``d x d`` unitary (or a stack of ``size`` of them).

    QR of a complex Ginibre matrix, with the columns of Q rephased so the
    diagonal of R is positive; without that correction Q is not Haar.
    """
    if d < 1:
        raise ValueError("d must be >= 1")
    shape = (d, d) if size is None else (size, d, d)
    z = (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / math.sqrt(2)
    q, r = np.linalg.qr(z)
    diag = np.diagonal(r, axis1=-2, axis2=-1)
    phase = diag / np.abs(diag)
    return q * phase[..., None, :]


def is_unitary(u: np.ndarray, atol: float = UNITARY_ATOL) -> bool:
    d = u.shape[-1]
    gram = np.swapaxes(u.conj(), -1, -2) @ u
    return bool(np.max(np.abs(gram - np.eye(d))) <= atol)


def check_density_matrix(rho: np.ndarray, atol: float = HERMITIAN_ATOL) -> np.ndarray:
    rho = np.asarray(rho, dtype=np.complex128)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise DimensionMismatch(f"density matrix must be square, got {rho.shape}")
    if np.max(np.abs(rho - rho.conj().T)) > atol:
        raise ValueError("density matrix is not Hermitian")
    if abs(np.trace(rho) - 1) > atol:
        raise ValueError(f"density matrix trace {np.trace(rho)!r} != 1")
    if np.linalg.eigvalsh(rho).min() < -PSD_ATOL:
        raise ValueError("density matrix is not positive semidefinite")
    return rho


def maximally_mixed(d: int) -> np.ndarray:
    return np.eye(d, dtype=np.complex128) / d


def random_density_matrix(d: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    """Hilbert-Schmidt random state (induced measure when ``rank < d``)."""
    k = d if rank is None else rank
    g = rng.standard_normal((d, k)) + 1j * rng.standard_normal((d, k))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


@dataclass(frozen=True, eq=False)
class UnitaryEnsemble:
    unitaries: np.ndarray  # (m, d, d)

    def __post_init__(self):
        u = np.array(self.unitaries, dtype=np.complex128)
        if u.ndim == 2:
            u = u[None]
        if u.ndim != 3 or u.shape[1] != u.shape[2] or u.shape[0] < 1:
            raise DimensionMismatch(f"ensemble must have shape (m, d, d), got {u.shape}")
        if not is_unitary(u):
            raise ValueError("ensemble contains a non-unitary matrix")
        u.flags.writeable = False
        object.__setattr__(self, "unitaries", u)

    @property
    def m(self) -> int:
        return self.unitaries.shape[0]

    @property
    def d(self) -> int:
        return self.unitaries.shape[1]

    @classmethod
    def haar(cls, d: int, m: int, rng, limits=DEFAULT_LIMITS) -> "UnitaryEnsemble":
        if d > limits.max_channel_dim:
            raise ResourceCap(f"channel dimension {d} exceeds cap {limits.max_channel_dim}")
        return cls(haar_unitary(d, rng, size=m))

    @classmethod
    def pauli(cls) -> "UnitaryEnsemble":
        return cls(PAULIS)

    @classmethod
    def identity(cls, d: int) -> "UnitaryEnsemble":
        return cls(np.eye(d, dtype=np.complex128)[None])


@dataclass(frozen=True)
class RandomizingSpec:
    epsilon: float
    p: float = 1.0
    r: float = 2.0
    kappa: float = 1.0

    def __post_init__(self):
        if self.epsilon <= 0 or self.kappa <= 0:
            raise ValueError("epsilon and kappa must be positive")
        if self.p < 1:
            raise PLessThanOne(f"p={self.p}")
        if not math.isinf(self.p) and not self.r > self.p:
            raise ExponentOrder(f"need r > p, got r={self.r}, p={self.p}")


def apply_channel(ens: UnitaryEnsemble, rho: np.ndarray) -> np.ndarray:
    """``(1/m) sum_j U_j rho U_j^dagger``."""
    rho = np.asarray(rho, dtype=np.complex128)
    if rho.shape != (ens.d, ens.d):
        raise DimensionMismatch(f"state is {rho.shape}, channel acts on {ens.d}x{ens.d}")
    u = ens.unitaries
    out = np.einsum("mij,jk,mlk->il", u, rho, u.conj()) / ens.m
    return (out + out.conj().T) / 2


def channel_outputs_pure(ens: UnitaryEnsemble, states: np.ndarray) -> np.ndarray:
    """``Lambda(psi)`` for each row ``psi`` of ``states``; shape ``(n, d, d)``."""
    states = np.atleast_2d(np.asarray(states, dtype=np.complex128))
    if states.shape[1] != ens.d:
        raise DimensionMismatch(f"states have dimension {states.shape[1]}, channel {ens.d}")
    v = np.einsum("mij,nj->nmi", ens.unitaries, states)
    return np.einsum("nmi,nmj->nij", v, v.conj()) / ens.m


def _check_p(p: float):
    if p < 1:
        raise PLessThanOne(f"Schatten exponent p={p} must be >= 1")


def _pnorm(s: np.ndarray, p: float) -> np.ndarray:
    if math.isinf(p):
        return s.max(axis=-1)
    if p == 1:
        return s.sum(axis=-1)
    return (s**p).sum(axis=-1) ** (1.0 / p)


def schatten_norm(M: np.ndarray, p: float, hermitian: bool = False):
    """``(sum_j s_j^p)^(1/p)`` over singular values; ``p = inf`` gives ``s_max``.

    Accepts stacks of matrices; ``hermitian`` uses eigenvalue magnitudes.
    """
    _check_p(p)
    s = np.linalg.svd(np.asarray(M), compute_uv=False, hermitian=hermitian)
    out = _pnorm(s, p)
    return float(out) if np.ndim(out) == 0 else out


def randomizing_threshold(epsilon: float, d: int, p: float) -> float:
    """``epsilon / d^((p-1)/p)``."""
    expo = 1.0 if math.isinf(p) else (p - 1) / p
    return epsilon / d**expo


def randomizing_distance(ens: UnitaryEnsemble, psi, p: float) -> float:
    """Schatten-p distance between ``Lambda(psi)`` and the maximally mixed state."""
    v = _vec(psi)
    if v.size != ens.d:
        raise DimensionMismatch(f"state dimension {v.size}, channel {ens.d}")
    out = channel_outputs_pure(ens, v[None])[0] - maximally_mixed(ens.d)
    return schatten_norm(out, p, hermitian=True)


def randomizing_distances(ens: UnitaryEnsemble, states: np.ndarray, p: float, chunk: int = 256):
    _check_p(p)
    states = np.atleast_2d(states)
    mms = maximally_mixed(ens.d)
    out = np.empty(states.shape[0])
    for i in range(0, states.shape[0], chunk):
        block = channel_outputs_pure(ens, states[i : i + chunk]) - mms
        out[i : i + chunk] = schatten_norm(block, p, hermitian=True)
    return out


def theorem1_cardinality(spec: RandomizingSpec, d: int) -> int:
    """``ceil(kappa/eps^2 * d * ln(10 d^((p-1)/p) / eps))``."""
    if d < 2:
        raise ValueError("d must be >= 2")
    expo = 1.0 if math.isinf(spec.p) else (spec.p - 1) / spec.p
    value = spec.kappa / spec.epsilon**2 * d * math.log(10 * d**expo / spec.epsilon)
    return math.ceil(value - 1e-9)


def holder_gap(rho: np.ndarray, p: float, r: float) -> tuple[float, float]:
    """Both sides of ``||rho - 1/d||_p^r <= d^((r-p)/p) ||rho||_r^r - d^((r-p)/p) / d^p``."""
    if p < 1:
        raise PLessThanOne(f"p={p}")
    if not r > p:
        raise ExponentOrder(f"need r > p, got r={r}, p={p}")
    rho = np.asarray(rho, dtype=np.complex128)
    d = rho.shape[0]
    lhs = schatten_norm(rho - maximally_mixed(d), p, hermitian=True) ** r
    scale = d ** ((r - p) / p)
    rhs = scale * schatten_norm(rho, r, hermitian=True) ** r - scale / d**p
    return float(lhs), float(rhs)


def invariant_measure_estimate(
    d: int, n_samples: int, rho: np.ndarray, rng: np.random.Generator, chunk: int = 4096
) -> np.ndarray:
    """Empirical average of ``U rho U^dagger`` over Haar draws."""
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    rho = np.asarray(rho, dtype=np.complex128)
    acc = np.zeros((d, d), dtype=np.complex128)
    done = 0
    while done < n_samples:
        k = min(chunk, n_samples - done)
        u = haar_unitary(d, rng, size=k)
        acc += np.einsum("nij,jk,nlk->il", u, rho, u.conj())
        done += k
    return acc / n_samples


def sup_randomizing_distance(
    ens: UnitaryEnsemble, n_states: int, p: float, rng: np.random.Generator
) -> float:
    """Largest distance seen over ``n_states`` Haar-random pure inputs."""
    return float(randomizing_distances(ens, random_pure_states(ens.d, rng, n_states), p).max())
