"""Deterministic seed derivation and the shuffle generator.

Every (player-season, trial) pair gets its own 64-bit seed, derived by
mixing the master seed, a hash of the player-season key and the trial
index. The seed drives a SplitMix64 stream, which feeds an unbiased
Fisher-Yates shuffle. Because no stream is shared between work items, any
partition of the work across threads produces the same shuffles.

The numba kernels and the pure-Python helpers implement the same
arithmetic; the test suite checks they agree.
"""

from __future__ import annotations

import hashlib

import numba
import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB


def mix64(z: int) -> int:
    z &= MASK64
    z = ((z ^ (z >> 30)) * _M1) & MASK64
    z = ((z ^ (z >> 27)) * _M2) & MASK64
    return z ^ (z >> 31)


def log_key(master_seed: int, player_id: str, season: int) -> int:
    """Per-player-season stream key (independent of the trial index)."""
    if not 0 <= master_seed <= MASK64:
        raise ValueError("master_seed must be an unsigned 64-bit integer")
    digest = hashlib.blake2b(f"{player_id}\x1f{season}".encode(), digest_size=8).digest()
    return mix64((master_seed + mix64(int.from_bytes(digest, "little"))) & MASK64)


def trial_seed_from_key(key: int, trial_index: int) -> int:
    return mix64(key ^ ((trial_index * GOLDEN) & MASK64))


def derive_trial_seed(master_seed: int, player_id: str, season: int, trial_index: int) -> int:
    return trial_seed_from_key(log_key(master_seed, player_id, season), trial_index)


class SplitMix64:
    """Pure-Python reference of the generator used by the kernels."""

    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next(self) -> int:
        self.state = (self.state + GOLDEN) & MASK64
        return mix64(self.state)

    def below(self, n: int) -> int:
        # rejection keeps the result exactly uniform on [0, n)
        threshold = ((1 << 64) - n) % n
        while True:
            r = self.next()
            if r >= threshold:
                return r % n

    def permutation(self, n: int) -> list[int]:
        idx = list(range(n))
        for i in range(n - 1, 0, -1):
            j = self.below(i + 1)
            idx[i], idx[j] = idx[j], idx[i]
        return idx


# ---------------------------------------------------------------------------
# numba kernels
# ---------------------------------------------------------------------------

_U_GOLDEN = np.uint64(GOLDEN)
_U_M1 = np.uint64(_M1)
_U_M2 = np.uint64(_M2)
_S27 = np.uint64(27)
_S30 = np.uint64(30)
_S31 = np.uint64(31)
_ZERO = np.uint64(0)


@numba.njit(cache=True, nogil=True)
def _mix64(z):
    z = (z ^ (z >> _S30)) * _U_M1
    z = (z ^ (z >> _S27)) * _U_M2
    return z ^ (z >> _S31)


@numba.njit(cache=True, nogil=True)
def _below(state, n):
    """Uniform integer in [0, n); returns (value, new_state)."""
    un = np.uint64(n)
    threshold = (_ZERO - un) % un
    while True:
        state = state + _U_GOLDEN
        r = _mix64(state)
        if r >= threshold:
            return np.int64(r % un), state


@numba.njit(cache=True, nogil=True)
def shuffle_inplace(arr, seed):
    state = np.uint64(seed)
    for i in range(arr.size - 1, 0, -1):
        j, state = _below(state, i + 1)
        tmp = arr[i]
        arr[i] = arr[j]
        arr[j] = tmp


@numba.njit(cache=True, nogil=True)
def permutation(n, seed):
    idx = np.arange(n)
    shuffle_inplace(idx, seed)
    return idx


@numba.njit(cache=True, nogil=True)
def trial_seed(key, trial_index):
    return _mix64(key ^ (np.uint64(trial_index) * _U_GOLDEN))


@numba.njit(cache=True, nogil=True)
def count_trials(flags, offsets, keys, t_start, t_stop, counts):
    """Shuffle every log for trials ``[t_start, t_stop)`` and tally maximal runs.

    ``flags`` holds the hit indicators of all logs back to back, log ``g``
    occupying ``flags[offsets[g]:offsets[g + 1]]``. ``counts[t, n]`` is
    incremented once per maximal run of length ``n`` found in trial ``t``.
    Each call touches only its own rows of ``counts``.
    """
    n_logs = keys.size
    longest = 0
    for g in range(n_logs):
        longest = max(longest, offsets[g + 1] - offsets[g])
    buf = np.empty(longest, dtype=flags.dtype)
    for t in range(t_start, t_stop):
        for g in range(n_logs):
            lo = offsets[g]
            n = offsets[g + 1] - lo
            for i in range(n):
                buf[i] = flags[lo + i]
            view = buf[:n]
            shuffle_inplace(view, trial_seed(keys[g], t))
            run = 0
            for i in range(n):
                if view[i]:
                    run += 1
                elif run:
                    counts[t, run] += 1
                    run = 0
            if run:
                counts[t, run] += 1
