"""Named, counter-based RNG substreams derived from one master seed."""
import zlib

import numpy as np


def _key(name):
    if isinstance(name, (int, np.integer)):
        return int(name)
    return zlib.crc32(str(name).encode())


def substream(seed, *names):
    """Return an independent ``np.random.Generator`` for ``(seed, *names)``.

    The same names always map to the same stream, so the order in which
    substreams are requested does not change results.
    """
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(_key(n) for n in names))
    return np.random.default_rng(ss)


def as_generator(rng):
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)
