"""Seedable, splittable random streams.

A stream is a value: ``(seed, stream_id)``.  Its bits come from a Philox
counter-based generator keyed by a 64-bit mix of both fields, so deriving a
child is O(1) and never depends on how much of the parent was consumed.
Normal variates use the Marsaglia polar method, consuming uint64 words in
pairs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._backend import kernels

GENERATOR = "philox4x64-polar/1"

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def mix64(z: int) -> int:
    """SplitMix64 finalizer; a bijection on 64-bit integers."""
    z &= _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


@dataclass(frozen=True)
class RngStream:
    seed: int
    stream_id: int = 0

    def __post_init__(self):
        for name in ("seed", "stream_id"):
            v = getattr(self, name)
            if not (isinstance(v, (int, np.integer)) and 0 <= int(v) <= _MASK):
                raise ValueError(f"{name} must be an unsigned 64-bit integer, got {v!r}")

    @property
    def key(self) -> int:
        return (mix64(self.seed) << 64) | mix64(self.stream_id ^ mix64(self.seed + _GOLDEN))

    def bit_generator(self) -> np.random.Philox:
        return np.random.Philox(key=self.key)

    def raw(self, size: int) -> np.ndarray:
        """First ``size`` uint64 words of the stream."""
        return self.bit_generator().random_raw(size)

    def derive(self, index: int) -> "RngStream":
        return derive_stream(self, index)


def derive_stream(parent: RngStream, index: int) -> RngStream:
    """Child stream ``index`` of ``parent``.

    Children of one parent get distinct ids: mix64 is a bijection and
    ``base + index`` is injective modulo 2**64.
    """
    index = int(index)
    if not 0 <= index <= _MASK:
        raise ValueError("index must be an unsigned 64-bit integer")
    base = mix64(parent.stream_id * _GOLDEN + 0x632BE59BD9B4E019)
    return RngStream(parent.seed, mix64((base + index) & _MASK))


def standard_normals(stream: RngStream, size: int) -> np.ndarray:
    """The first ``size`` standard normals of ``stream`` (polar method)."""
    size = int(size)
    out = np.empty(size)
    if size == 0:
        return out
    bg = stream.bit_generator()
    filled = 0
    chunk = 2 * ((size * 13) // 20 + 32)
    while filled < size:
        raw = bg.random_raw(chunk)
        filled, _ = kernels.polar_fill(raw, out, filled)
        chunk = 2 * ((size - filled) + 32)
    return out
