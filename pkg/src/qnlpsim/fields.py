"""Arithmetic over a prime field F_q and vectors over it."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import CompositeModulus, DimensionMismatch, FieldMismatch


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    k = 3
    while k * k <= n:
        if n % k == 0:
            return False
        k += 2
    return True


@dataclass(frozen=True)
class Field:
    """The prime field of order ``q``."""

    q: int

    def __post_init__(self):
        if not isinstance(self.q, (int, np.integer)) or self.q < 2:
            raise ValueError(f"modulus must be an integer >= 2, got {self.q!r}")
        if not is_prime(int(self.q)):
            raise CompositeModulus(f"q={self.q} is not prime")
        object.__setattr__(self, "q", int(self.q))

    def __call__(self, value: int) -> "FieldElement":
        return FieldElement(int(value) % self.q, self)

    def vector(self, values: Sequence[int]) -> "FieldVector":
        return FieldVector(tuple(int(v) % self.q for v in values), self)

    def inverse(self, value: int) -> int:
        value = int(value) % self.q
        if value == 0:
            raise ZeroDivisionError("0 has no inverse mod q")
        return pow(value, -1, self.q)

    @property
    def half(self) -> int:
        return self.q // 2


def make_field(q: int) -> Field:
    return Field(q)


@dataclass(frozen=True)
class FieldElement:
    value: int
    field: Field

    def __post_init__(self):
        if not 0 <= self.value < self.field.q:
            raise ValueError(f"residue {self.value} outside [0, {self.field.q})")

    def _other(self, other):
        if isinstance(other, FieldElement):
            if other.field != self.field:
                raise FieldMismatch(f"q={self.field.q} vs q={other.field.q}")
            return other.value
        return int(other)

    def __add__(self, other):
        return self.field(self.value + self._other(other))

    __radd__ = __add__

    def __sub__(self, other):
        return self.field(self.value - self._other(other))

    def __rsub__(self, other):
        return self.field(self._other(other) - self.value)

    def __mul__(self, other):
        return self.field(self.value * self._other(other))

    __rmul__ = __mul__

    def __neg__(self):
        return self.field(-self.value)

    def __int__(self):
        return self.value

    def __index__(self):
        return self.value

    def __eq__(self, other):
        if isinstance(other, FieldElement):
            return self.field == other.field and self.value == other.value
        if isinstance(other, (int, np.integer)):
            return self.value == int(other) % self.field.q
        return NotImplemented

    def __hash__(self):
        return hash((self.value, self.field.q))

    def inverse(self) -> "FieldElement":
        return self.field(self.field.inverse(self.value))

    def centered(self) -> int:
        """Representative in ``(-q/2, q/2]``."""
        v = self.value
        return v - self.field.q if v > self.field.q // 2 else v


@dataclass(frozen=True)
class FieldVector:
    values: tuple
    field: Field

    def __post_init__(self):
        if len(self.values) < 1:
            raise ValueError("field vectors must have length >= 1")
        q = self.field.q
        if any(not 0 <= v < q for v in self.values):
            raise ValueError(f"components must lie in [0, {q})")

    @classmethod
    def from_array(cls, arr, field: Field) -> "FieldVector":
        return cls(tuple(int(v) % field.q for v in np.asarray(arr).ravel()), field)

    def __len__(self):
        return len(self.values)

    def __getitem__(self, i) -> FieldElement:
        return FieldElement(self.values[i], self.field)

    def __iter__(self):
        return (FieldElement(v, self.field) for v in self.values)

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=np.int64)

    def _check(self, other: "FieldVector"):
        if other.field != self.field:
            raise FieldMismatch(f"q={self.field.q} vs q={other.field.q}")
        if len(other) != len(self):
            raise DimensionMismatch(f"lengths {len(self)} and {len(other)}")

    def __add__(self, other: "FieldVector") -> "FieldVector":
        self._check(other)
        return FieldVector.from_array(self.array + other.array, self.field)

    def __sub__(self, other: "FieldVector") -> "FieldVector":
        self._check(other)
        return FieldVector.from_array(self.array - other.array, self.field)

    def __neg__(self) -> "FieldVector":
        return FieldVector.from_array(-self.array, self.field)

    def scale(self, c: int) -> "FieldVector":
        return FieldVector.from_array(self.array * int(c), self.field)

    def is_zero(self) -> bool:
        return not any(self.values)


def vec_dot(a: FieldVector, x: FieldVector) -> FieldElement:
    a._check(x)
    q = a.field.q
    return a.field(sum(u * v for u, v in zip(a.values, x.values)) % q)


def centered_distance(u: FieldElement, v: FieldElement) -> int:
    """Length of the shorter way round the cycle Z_q from ``u`` to ``v``."""
    if u.field != v.field:
        raise FieldMismatch(f"q={u.field.q} vs q={v.field.q}")
    q = u.field.q
    r = (u.value - v.value) % q
    return min(r, q - r)


def centered_distance_array(u, v, q: int) -> np.ndarray:
    r = np.mod(np.asarray(u) - np.asarray(v), q)
    return np.minimum(r, q - r)


def random_vector(field: Field, n: int, rng: np.random.Generator) -> FieldVector:
    if n < 1:
        raise ValueError(f"vector length must be >= 1, got {n}")
    return FieldVector.from_array(rng.integers(0, field.q, size=n), field)
