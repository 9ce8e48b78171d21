"""Counter-style seed derivation.

Child seeds are a keyed hash of the parent seed and a tuple of tags, so any
trial or restart can be regenerated in isolation, in any order, on any worker.
"""

import hashlib

import numpy as np

MASK64 = (1 << 64) - 1


def derive_seed(parent, *parts):
    """Return a 64-bit child seed for ``(parent, *parts)``.

    ``parts`` may be ints, floats or strings; they are joined by their ``str``
    form, so ``derive_seed(s, "z")`` and ``derive_seed(s, "r_star")`` are
    independent streams.
    """
    parent = int(parent)
    if parent < 0 or parent > MASK64:
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {parent}")
    payload = "\x1f".join([str(parent)] + [str(p) for p in parts]).encode()
    digest = hashlib.blake2b(payload, digest_size=8, person=b"varimaxphase").digest()
    return int.from_bytes(digest, "little")


def rng_for(seed):
    """A fresh generator; there is no module-level RNG state anywhere."""
    return np.random.Generator(np.random.PCG64(int(seed)))
