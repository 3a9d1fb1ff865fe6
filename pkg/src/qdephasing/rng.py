"""Counter-based random numbers: every draw is a pure function of (seed, stream, counter).

Trajectory ``i`` of an ensemble reads stream ``i``, so its noise never depends
on how many other trajectories exist or in which order they are evaluated.
The hash is SplitMix64's finalizer applied in three keyed rounds.
"""

from __future__ import annotations

import numpy as np

__all__ = ["mix64", "counter_words", "counter_uniforms", "counter_normals"]

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_STREAM_KEY = np.uint64(0xD1B54A32D192ED03)
_U64 = (1 << 64) - 1


def mix64(x) -> np.ndarray:
    """SplitMix64 output function on an array of uint64 (wrapping arithmetic)."""
    z = np.asarray(x, dtype=np.uint64) + _GOLDEN
    z = (z ^ (z >> np.uint64(30))) * _M1
    z = (z ^ (z >> np.uint64(27))) * _M2
    return z ^ (z >> np.uint64(31))


def _as_u64(values) -> np.ndarray:
    arr = np.asarray(values)
    if arr.dtype.kind in "iu":
        if arr.dtype.kind == "i" and np.any(arr < 0):
            raise ValueError("seeds, stream and counter ids must be non-negative")
        return arr.astype(np.uint64)
    return np.array([int(v) & _U64 for v in np.ravel(arr)], dtype=np.uint64).reshape(arr.shape)


def counter_words(seed: int, streams, counters) -> np.ndarray:
    """64-bit words for every (stream, counter) pair; shape ``(len(streams), len(counters))``."""
    if not 0 <= int(seed) <= _U64:
        raise ValueError(f"seed must fit in 64 unsigned bits, got {seed!r}")
    s = _as_u64(np.atleast_1d(streams))[:, None]
    c = _as_u64(np.atleast_1d(counters))[None, :]
    with np.errstate(over="ignore"):
        key = mix64(np.uint64(int(seed)))
        h = mix64(key ^ (s * _STREAM_KEY))
        return mix64(h ^ mix64(c))


def counter_uniforms(seed: int, streams, n: int, offset: int = 0) -> np.ndarray:
    """Uniform doubles strictly inside (0, 1), shape ``(len(streams), n)``."""
    words = counter_words(seed, streams, np.arange(offset, offset + n, dtype=np.uint64))
    return ((words >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0 ** -53


def counter_normals(seed: int, streams, n: int, offset: int = 0) -> np.ndarray:
    """Standard normals via Box-Muller, shape ``(len(streams), n)``.

    Consumes ``2 * ceil(n / 2)`` counters starting at ``offset``.
    """
    pairs = (n + 1) // 2
    u = counter_uniforms(seed, streams, 2 * pairs, offset)
    u1, u2 = u[:, 0::2], u[:, 1::2]
    r = np.sqrt(-2.0 * np.log(u1))
    z = np.empty((u.shape[0], 2 * pairs))
    z[:, 0::2] = r * np.cos(2.0 * np.pi * u2)
    z[:, 1::2] = r * np.sin(2.0 * np.pi * u2)
    return z[:, :n]
