"""
Seed derivation so every random stream depends only on (seed, module, key)
"""

import hashlib
from typing import Union

import numpy as np

SeedPart = Union[int, str]


def derive_seed(seed: int, module: str, *parts: SeedPart) -> int:
    """
    Derive a 64-bit seed from a global seed, a module name and extra keys.

    The derivation hashes "<seed>:<module>:<part>:..." with blake2b and reads
    the first 8 bytes little endian, so streams are independent of the order
    in which they are requested.

    Args:
        seed: Global run seed
        module: Stream owner, e.g. "proxy", "logistic", "synth-noise"
        *parts: Additional keys such as a code index or doc id

    Returns:
        int: Non-negative integer usable as a numpy seed
    """
    key = ":".join([str(seed), module, *(str(part) for part in parts)])
    digest = hashlib.blake2b(key.encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "little")


def make_rng(seed: int, module: str, *parts: SeedPart) -> np.random.Generator:
    """numpy Generator for a derived stream"""
    return np.random.Generator(np.random.PCG64(derive_seed(seed, module, *parts)))
