"""Deterministic randomness.

All randomness in the package comes from numpy's Philox counter-based bit
generator. Streams are keyed by a 128-bit BLAKE2b digest of ``(seed, *names)``
so two streams with different names never overlap and a stream's draws do not
depend on how many draws other streams made. No OS entropy is used anywhere.
"""

from __future__ import annotations

import hashlib
import math

import numpy as np

FNV_OFFSET = 0xCBF29CE484222325
FNV_PRIME = 0x100000001B3
_MASK64 = (1 << 64) - 1


def fnv1a64(text: str) -> int:
    """64-bit FNV-1a over the UTF-8 bytes of ``text``."""
    h = FNV_OFFSET
    for byte in text.encode("utf-8"):
        h ^= byte
        h = (h * FNV_PRIME) & _MASK64
    return h


def _digest(seed, names) -> bytes:
    payload = "\x1f".join([str(int(seed))] + [str(n) for n in names])
    return hashlib.blake2b(payload.encode("utf-8"), digest_size=16).digest()


def stream(seed: int, *names) -> np.random.Generator:
    """Independent Philox stream for ``(seed, *names)``."""
    d = _digest(seed, names)
    key = np.frombuffer(d, dtype="<u8").copy()
    return np.random.Generator(np.random.Philox(key=key))


def hash_uniform(seed: int, *names) -> float:
    """A single uniform draw in [0, 1) that is a pure function of its arguments."""
    d = _digest(seed, names)
    bits = int.from_bytes(d[:8], "little") >> 11
    return bits * (1.0 / (1 << 53))


def sigmoid(x: float) -> float:
    if x >= 0:
        return 1.0 / (1.0 + math.exp(-x))
    e = math.exp(x)
    return e / (1.0 + e)
