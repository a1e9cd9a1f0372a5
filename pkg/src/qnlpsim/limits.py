from dataclasses import dataclass

from .errors import ResourceCap


@dataclass(frozen=True)
class ResourceLimits:
    max_amplitudes: int = 1 << 22
    max_channel_dim: int = 64
    max_full_net_dim: int = 4


DEFAULT_LIMITS = ResourceLimits()


def check_amplitudes(q, n, limits=DEFAULT_LIMITS):
    size = q**n
    if size > limits.max_amplitudes:
        raise ResourceCap(
            f"statevector of {q}^{n} = {size} amplitudes exceeds cap {limits.max_amplitudes}"
        )
    return size
