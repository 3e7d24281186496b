"""Seed splitting: every random stream derives from one manifest seed.

A subsystem stream is identified by a label (``"ising"``, ``"subsample"``,
``"wishart/replica"``...) and an optional index. The label is hashed with
BLAKE2b into a 64-bit word and appended, with the index, to the spawn key of a
``numpy.random.SeedSequence`` whose entropy is the manifest seed.
"""

import hashlib

import numpy as np


def label_key(label: str) -> int:
    """Stable 64-bit hash of a subsystem label."""
    digest = hashlib.blake2b(label.encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "little")


def seed_sequence(seed: int, label: str, index: int = 0) -> np.random.SeedSequence:
    """SeedSequence of the stream (label, index) under a manifest seed."""
    return np.random.SeedSequence(entropy=seed, spawn_key=(label_key(label), index))


def generator(seed: int, label: str, index: int = 0) -> np.random.Generator:
    """PCG64 generator for the stream (label, index)."""
    return np.random.Generator(np.random.PCG64(seed_sequence(seed, label, index)))


def derive_seed(seed: int, label: str, index: int = 0) -> int:
    """A 64-bit child seed, for handing a stream to another run or process."""
    state = seed_sequence(seed, label, index).generate_state(2, dtype=np.uint32)
    return int(state[0]) | (int(state[1]) << 32)
