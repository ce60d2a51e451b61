"""Deterministic seed-tree utilities.

Every randomized routine in the package takes an explicit 64-bit master seed
and derives independent child streams from ``(seed, purpose-tag, index)``.
The tag is hashed with SHA-256 (Python's builtin ``hash`` is salted per
process and must not be used here), so child streams are reproducible across
runs and machines and replicates can execute concurrently without sharing
generator state.
"""

import hashlib

import numpy as np


def child_seed(seed: int, tag: str, index: int = 0) -> np.random.SeedSequence:
    """Derive a child SeedSequence for the stream named ``tag``/``index``."""
    digest = hashlib.sha256(tag.encode("utf-8")).digest()
    words = tuple(int.from_bytes(digest[i : i + 4], "little") for i in range(0, 16, 4))
    return np.random.SeedSequence(entropy=int(seed) & (2**64 - 1), spawn_key=words + (int(index),))


def child_rng(seed: int, tag: str, index: int = 0) -> np.random.Generator:
    """A fresh Generator for the child stream ``(seed, tag, index)``."""
    return np.random.default_rng(child_seed(seed, tag, index))
