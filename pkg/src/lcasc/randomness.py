"""Deterministic keyed randomness shared by every probe.

All randomness in the artifact flows through a :class:`RandomTape` keyed by
a single 64-bit master seed. A structured :class:`Label` selects an
independent stream; the same (seed, label) always yields the same draws, in
any process and under any interleaving of probes, which is what makes
repeated and parallel probes mutually consistent.
"""

from __future__ import annotations

import hashlib
import struct
from dataclasses import dataclass
from enum import IntEnum
from typing import Sequence

import numpy as np

__all__ = [
    "Tag",
    "Label",
    "RandomTape",
    "UniformStream",
    "sample_multiset",
    "RoundingTape",
    "bernoulli_sum_exceed_rate",
]


class Tag(IntEnum):
    """Namespace byte for tape labels. Each sampling site owns a tag, so no
    two sites can collide on a stream."""

    GENERIC = 0
    GENERATOR = 1
    WARMUP_SET_SAMPLE = 2
    WARMUP_ELE_SAMPLE = 3
    MAIN_SET_SAMPLE = 4
    MAIN_ELE_SAMPLE = 5
    ROUNDING_BIT = 6
    COVERED_TRUNCATE = 7
    ESTIMATOR_DRAW = 8
    WARMUP_INT_SET_SAMPLE = 9
    WARMUP_INT_ELE_SAMPLE = 10
    REFERENCE_ESTIMATE = 11
    BENCH = 12


_LABEL_STRUCT = struct.Struct("<Bhhhhqq")


@dataclass(frozen=True)
class Label:
    """Fixed-width label (tag, i, j, i_star, j_star, vertex, counter).

    Iteration indices default to 0, which no algorithm uses as a live
    coordinate, so partially specified labels cannot collide with fully
    specified ones under the same tag. Boost coordinates (i_star, j_star)
    are part of the key: re-executions on behalf of a later iteration draw
    fresh randomness, while earlier-phase decisions keep theirs fixed.
    """

    tag: Tag
    i: int = 0
    j: int = 0
    i_star: int = 0
    j_star: int = 0
    vertex: int = 0
    counter: int = 0

    def pack(self) -> bytes:
        return _LABEL_STRUCT.pack(self.tag, self.i, self.j,
                                  self.i_star, self.j_star,
                                  self.vertex, self.counter)


class UniformStream:
    """Restartable stream of uniform integers for one (seed, label) pair.

    Two streams created from the same pair return identical draw sequences;
    the first t draws never depend on how many more are taken later.
    """

    def __init__(self, key: bytes):
        words = np.frombuffer(key, dtype=np.uint64)
        self._gen = np.random.Generator(np.random.Philox(key=words))

    def draw(self, m: int) -> int:
        """One uniform draw from {0, ..., m-1}."""
        return int(self._gen.integers(0, m))

    def draw_block(self, m: int, t: int) -> np.ndarray:
        """t uniform draws from {0, ..., m-1} as an array."""
        return self._gen.integers(0, m, size=t)

    def bernoulli(self, num: int, den: int) -> bool:
        """One draw that is True with probability min(1, num/den), exactly."""
        if num >= den:
            return True
        return self.draw(den) < num


class RandomTape:
    """Keyed derivation of independent uniform streams from one master seed."""

    def __init__(self, master_seed: int):
        self.master_seed = int(master_seed) & 0xFFFFFFFFFFFFFFFF
        self._key = self.master_seed.to_bytes(8, "little")

    def stream(self, label: Label) -> UniformStream:
        digest = hashlib.blake2b(label.pack(), key=self._key, digest_size=16).digest()
        return UniformStream(digest)

    def numpy_generator(self, label: Label) -> np.random.Generator:
        """Bulk generator for statistical utilities; same keying as stream()."""
        digest = hashlib.blake2b(label.pack(), key=self._key, digest_size=16).digest()
        words = np.frombuffer(digest, dtype=np.uint64)
        return np.random.Generator(np.random.Philox(key=words))


def sample_multiset(tape: RandomTape, label: Label, a: Sequence[int] | tuple[int, ...],
                    t: int, m: int) -> list[int]:
    """Sample a multiset of at most t members of the ordered list ``a``.

    Makes exactly t independent draws of a position uniform over [1, m];
    draw k contributes a[pos-1] iff pos <= len(a). Every individual member
    is therefore hit with probability 1/m per draw. The result preserves
    draw order (and hence multiplicity and first-occurrence order).
    """
    if t < 0:
        raise ValueError("t must be nonnegative")
    if len(a) > m:
        raise ValueError("range bound m must be at least len(a)")
    if t == 0:
        return []
    stream = tape.stream(label)
    positions = stream.draw_block(m, t) + 1
    landed = positions[positions <= len(a)]
    return [a[p - 1] for p in landed]


class RoundingTape:
    """Pre-sampled coin per (set, phase, iteration), True with probability
    min(1, 2^j / f). The coin is fixed for the run: every consultation of
    the same key sees the same bit."""

    def __init__(self, tape: RandomTape, freq: int):
        if freq < 1:
            raise ValueError("freq must be >= 1")
        self.tape = tape
        self.freq = freq
        self._cache: dict[tuple[int, int, int], bool] = {}

    def bit(self, set_id: int, i: int, j: int) -> bool:
        key = (set_id, i, j)
        got = self._cache.get(key)
        if got is None:
            stream = self.tape.stream(Label(Tag.ROUNDING_BIT, i=i, j=j, vertex=set_id))
            got = stream.bernoulli(1 << j, self.freq)
            self._cache[key] = got
        return got


def bernoulli_sum_exceed_rate(tape: RandomTape, t: int, p: float, mu: float,
                              trials: int) -> float:
    """Monte-Carlo estimate of P[sum of t Bernoulli(p) draws > 2*mu].

    Utility for checking the upper-tail bound exp(-mu/3) that the analysis
    relies on, at a configurable trial count.
    """
    gen = tape.numpy_generator(Label(Tag.GENERIC, counter=1))
    sums = gen.binomial(t, p, size=trials)
    return float(np.mean(sums > 2 * mu))
