"""Seedable deterministic random-number streams.

A single master seed fans out to named substreams (excitation,
initialization, batching, regression, ...) and indexed child streams
(one per dataset record), so any stage of an experiment is
independently reproducible. The underlying generator is numpy's PCG64;
substream seeds are derived with BLAKE2b so the derivation is stable
across platforms and numpy versions.
"""

import hashlib

import numpy as np

GENERATOR_NAME = "pcg64"


class RngStream:
    """Immutable handle on a deterministic random stream."""

    __slots__ = ("seed",)

    def __init__(self, seed):
        seed = int(seed)
        if not 0 <= seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        self.seed = seed

    def __repr__(self):
        return f"RngStream(seed={self.seed}, algorithm={GENERATOR_NAME!r})"

    def __eq__(self, other):
        return isinstance(other, RngStream) and other.seed == self.seed

    def generator(self):
        """Fresh numpy Generator; identical seed gives identical sequences."""
        return np.random.Generator(np.random.PCG64(self.seed))

    def substream(self, label):
        """Named child stream, e.g. stream.substream('excitation')."""
        return RngStream(_derive(self.seed, label.encode("utf-8")))

    def child(self, index):
        """Indexed child stream, e.g. one per dataset record."""
        return RngStream(_derive(self.seed, b"#" + str(int(index)).encode()))


def _derive(seed, tag):
    h = hashlib.blake2b(tag, digest_size=8, key=seed.to_bytes(8, "little"))
    return int.from_bytes(h.digest(), "little")


def standard_normal(rng, count):
    """`count` standard Gaussian draws from the head of the stream.

    Each call re-opens the stream at its start, so two calls on the same
    RngStream return identical vectors; distinct draws come from distinct
    substreams.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    return rng.generator().standard_normal(count)
