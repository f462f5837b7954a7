"""Portable seeded random number generation.

The decoder has to regenerate the exact Fourier basis the encoder used, from
nothing but the seeds stored in the bitstream, so basis sampling cannot depend
on numpy's generator internals. This module pins those internals down:

* the 64-bit seed is expanded into the 256-bit xoshiro256** state with
  splitmix64 (four consecutive outputs);
* uniform doubles take the top 53 bits of a xoshiro256** output,
  ``(x >> 11) * 2**-53``, giving values in ``[0, 1)``;
* standard normals come from Box-Muller on two consecutive uniforms
  ``u1, u2``: ``r = sqrt(-2 ln(1 - u1))`` then ``r cos(2 pi u2)`` is emitted
  first and ``r sin(2 pi u2)`` second. An odd request discards the final sine.
"""

import math

import numpy as np

_MASK64 = 0xFFFFFFFFFFFFFFFF
_TWO_POW_M53 = 1.0 / (1 << 53)


def splitmix64(state):
    """Advance a splitmix64 state. Returns ``(new_state, output)``."""
    state = (state + 0x9E3779B97F4A7C15) & _MASK64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return state, z ^ (z >> 31)


def _rotl(x, k):
    return ((x << k) | (x >> (64 - k))) & _MASK64


class Xoshiro256StarStar:
    """xoshiro256** generator seeded from a single 64-bit integer."""

    def __init__(self, seed):
        sm = int(seed) & _MASK64
        s = []
        for _ in range(4):
            sm, out = splitmix64(sm)
            s.append(out)
        self._s = s

    @classmethod
    def from_state(cls, state):
        """Build a generator from a raw 4-word state (used by test vectors)."""
        if len(state) != 4 or not any(state):
            raise ValueError("xoshiro256** needs four words, not all zero")
        gen = cls.__new__(cls)
        gen._s = [int(w) & _MASK64 for w in state]
        return gen

    @property
    def state(self):
        return tuple(self._s)

    def next_u64(self):
        s0, s1, s2, s3 = self._s
        result = (_rotl((s1 * 5) & _MASK64, 7) * 9) & _MASK64
        t = (s1 << 17) & _MASK64
        s2 ^= s0
        s3 ^= s1
        s1 ^= s2
        s0 ^= s3
        s2 ^= t
        s3 = _rotl(s3, 45)
        self._s = [s0, s1, s2, s3]
        return result

    def random(self):
        """One uniform double in [0, 1)."""
        return (self.next_u64() >> 11) * _TWO_POW_M53

    def uniform(self, n, low=0.0, high=1.0):
        u = np.array([self.random() for _ in range(n)], dtype=np.float64)
        return low + (high - low) * u

    def standard_normal(self, n):
        out = np.empty(n, dtype=np.float64)
        i = 0
        while i < n:
            u1 = self.random()
            u2 = self.random()
            r = math.sqrt(-2.0 * math.log(1.0 - u1))
            theta = 2.0 * math.pi * u2
            out[i] = r * math.cos(theta)
            if i + 1 < n:
                out[i + 1] = r * math.sin(theta)
            i += 2
        return out

    def normal(self, n, scale=1.0):
        return scale * self.standard_normal(n)


def derive_seed(*parts):
    """Mix integers and strings into one 64-bit seed, stable across runs.

    Each part is folded in through splitmix64, so changing any part changes
    the result and the value never depends on Python's salted ``hash``.
    """
    acc = 0x6A09E667F3BCC908
    for part in parts:
        if isinstance(part, str):
            data = part.encode("utf-8")
        else:
            data = int(part).to_bytes(8, "little", signed=int(part) < 0)
        for offset in range(0, len(data), 8):
            chunk = int.from_bytes(data[offset:offset + 8], "little")
            acc, out = splitmix64(acc ^ chunk)
            acc ^= out
        acc, _ = splitmix64(acc ^ len(data))
    return acc
