"""Counter-based random substreams (Philox4x32-10).

Every random quantity in a simulation is addressed by a tuple
``(master_seed, scenario_id, iteration, slot, role)``.  Seed, scenario id
and role are hashed into the 64-bit Philox key; iteration and slot go
into the 128-bit counter together with a block index:

    counter = (block, slot, iteration & 0xFFFFFFFF, iteration >> 32)

Any draw can therefore be regenerated without touching any other draw,
and whole (iteration, slot, block) grids are filled in one compiled loop.
Passing the same ``scenario_id`` to several scenario kinds gives them
common random numbers.
"""
from __future__ import annotations

import hashlib
import math
from enum import IntEnum

import numba
import numpy as np

__all__ = [
    "StreamRole",
    "Substream",
    "derive_substream",
    "philox4x32",
    "stream_key",
    "word_grid",
    "uniform_grid",
    "complex_normal_grid",
    "uniform_to_integers",
]

_M0 = np.uint64(0xD2511F53)
_M1 = np.uint64(0xCD9E8D57)
_W0 = np.uint64(0x9E3779B9)
_W1 = np.uint64(0xBB67AE85)
_MASK32 = np.uint64(0xFFFFFFFF)
_S32 = np.uint64(32)
_S11 = np.uint64(11)
_TWO_POW_M53 = 2.0**-53
_TWO_PI = 2.0 * math.pi


class StreamRole(IntEnum):
    """Independent draw families within one (iteration, slot)."""

    TASK = 0
    DIRECT = 1
    AP_IRS = 2
    IRS_DEV = 3


def philox4x32(counter: np.ndarray, key: tuple[int, int]) -> np.ndarray:
    """Philox4x32-10 over an array of counters of shape ``(..., 4)`` (plain numpy)."""
    c = np.asarray(counter, dtype=np.uint64)
    c0, c1, c2, c3 = (c[..., i].copy() for i in range(4))
    k0 = np.uint64(key[0] & 0xFFFFFFFF)
    k1 = np.uint64(key[1] & 0xFFFFFFFF)
    for _ in range(10):
        p0 = c0 * _M0
        p1 = c2 * _M1
        c0, c1, c2, c3 = (p1 >> _S32) ^ c1 ^ k0, p1 & _MASK32, (p0 >> _S32) ^ c3 ^ k1, p0 & _MASK32
        k0 = (k0 + _W0) & _MASK32
        k1 = (k1 + _W1) & _MASK32
    return np.stack([c0, c1, c2, c3], axis=-1)


@numba.njit(cache=True, inline="always")
def _bijection(c0, c1, c2, c3, k0, k1):
    for _ in range(10):
        p0 = c0 * _M0
        p1 = c2 * _M1
        c0, c1, c2, c3 = (p1 >> _S32) ^ c1 ^ k0, p1 & _MASK32, (p0 >> _S32) ^ c3 ^ k1, p0 & _MASK32
        k0 = (k0 + _W0) & _MASK32
        k1 = (k1 + _W1) & _MASK32
    return c0, c1, c2, c3


@numba.njit(cache=True)
def _fill_words(k0, k1, its, slot0, block0, out):
    for i in range(out.shape[0]):
        lo = its[i] & _MASK32
        hi = its[i] >> _S32
        for s in range(out.shape[1]):
            for j in range(out.shape[2]):
                a, b, c, d = _bijection(np.uint64(block0 + j), np.uint64(slot0 + s), lo, hi, k0, k1)
                out[i, s, j, 0] = a
                out[i, s, j, 1] = b
                out[i, s, j, 2] = c
                out[i, s, j, 3] = d


@numba.njit(cache=True)
def _fill_uniform(k0, k1, its, slot0, block0, out):
    for i in range(out.shape[0]):
        lo = its[i] & _MASK32
        hi = its[i] >> _S32
        for s in range(out.shape[1]):
            for j in range(out.shape[2]):
                a, b, _, _ = _bijection(np.uint64(block0 + j), np.uint64(slot0 + s), lo, hi, k0, k1)
                out[i, s, j] = np.float64(((a << _S32) | b) >> _S11) * _TWO_POW_M53


@numba.njit(cache=True)
def _fill_complex_normal(k0, k1, its, slot0, block0, out):
    # polar Box-Muller: |z|^2 = -log(1 - u1) is exactly Exp(1)
    for i in range(out.shape[0]):
        lo = its[i] & _MASK32
        hi = its[i] >> _S32
        for s in range(out.shape[1]):
            for j in range(out.shape[2]):
                a, b, c, d = _bijection(np.uint64(block0 + j), np.uint64(slot0 + s), lo, hi, k0, k1)
                u1 = np.float64(((a << _S32) | b) >> _S11) * _TWO_POW_M53
                u2 = np.float64(((c << _S32) | d) >> _S11) * _TWO_POW_M53
                r = math.sqrt(-math.log1p(-u1))
                th = _TWO_PI * u2
                out[i, s, j] = complex(r * math.cos(th), r * math.sin(th))


def _grid(fill, dtype, key, iterations, n_slots, n_blocks, slot0=0, block0=0, tail=()):
    its = np.ascontiguousarray(np.atleast_1d(np.asarray(iterations, dtype=np.uint64)))
    out = np.empty((its.size, n_slots, n_blocks) + tail, dtype=dtype)
    fill(np.uint64(key[0]), np.uint64(key[1]), its, np.int64(slot0), np.int64(block0), out)
    return out


def word_grid(key, iterations, n_slots, n_blocks, slot0=0, block0=0) -> np.ndarray:
    """Raw Philox words, shape ``(iterations, n_slots, n_blocks, 4)``."""
    return _grid(_fill_words, np.uint64, key, iterations, n_slots, n_blocks, slot0, block0, tail=(4,))


def uniform_grid(key, iterations, n_slots, n_blocks, slot0=0, block0=0) -> np.ndarray:
    """One 53-bit uniform on [0, 1) per block."""
    return _grid(_fill_uniform, np.float64, key, iterations, n_slots, n_blocks, slot0, block0)


def complex_normal_grid(key, iterations, n_slots, n_blocks, slot0=0, block0=0) -> np.ndarray:
    """One zero-mean, unit-variance circular complex normal per block."""
    return _grid(_fill_complex_normal, np.complex128, key, iterations, n_slots, n_blocks, slot0, block0)


def stream_key(master_seed: int, scenario_id: int, role: int) -> tuple[int, int]:
    """Hash the run-constant part of a stream address into a Philox key."""
    payload = b"".join(int(v).to_bytes(8, "little", signed=False) for v in (master_seed, scenario_id, role))
    word = int.from_bytes(hashlib.blake2b(payload, digest_size=8, person=b"ptvsim-rng").digest(), "little")
    return word & 0xFFFFFFFF, word >> 32


def uniform_to_integers(u: np.ndarray, low: int, high: int) -> np.ndarray:
    """Map uniforms on [0, 1) to integers on the closed range [low, high]."""
    span = high - low + 1
    return low + np.minimum(np.floor(u * span).astype(np.int64), span - 1)


class Substream:
    """Sequential reader over the blocks at one (iteration, slot, role) address."""

    def __init__(self, key: tuple[int, int], iteration: int, slot: int):
        if not 0 <= slot < 2**32:
            raise ValueError(f"slot index {slot} outside [0, 2**32)")
        if not 0 <= iteration < 2**64:
            raise ValueError(f"iteration index {iteration} outside [0, 2**64)")
        self.key = key
        self.iteration = iteration
        self.slot = slot
        self._cursor = 0

    def _take(self, grid, n: int) -> np.ndarray:
        out = grid(self.key, [self.iteration], 1, n, slot0=self.slot, block0=self._cursor)
        self._cursor += n
        return out[0, 0]

    def words(self, n: int) -> np.ndarray:
        return self._take(word_grid, n)

    def random(self, n: int) -> np.ndarray:
        return self._take(uniform_grid, n)

    def complex_normal(self, n: int) -> np.ndarray:
        return self._take(complex_normal_grid, n)

    def integers(self, low: int, high: int, n: int) -> np.ndarray:
        return uniform_to_integers(self.random(n), low, high)


def derive_substream(
    master_seed: int,
    scenario_id: int,
    iteration_index: int,
    slot_index: int,
    channel_role: StreamRole | int,
) -> Substream:
    """Deterministic stream for one address, independent of every other address."""
    return Substream(stream_key(master_seed, scenario_id, int(channel_role)), iteration_index, slot_index)
