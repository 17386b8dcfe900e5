"""Deterministic counter-based random streams for the simulators.

Every random value consumed by a trial is a pure function of
(master_seed, trial_index, position), so results never depend on execution
order, chunking, or worker count.  The construction, bit-exactly:

    avalanche(z):   z ^= z >> 30;  z *= 0xBF58476D1CE4E5B9  (mod 2**64)
                    z ^= z >> 27;  z *= 0x94D049BB133111EB  (mod 2**64)
                    z ^= z >> 31
    trial_state(seed, t)   = avalanche((seed + (t + 1) * 0x9E3779B97F4A7C15) mod 2**64)
    raw(state, pos)        = avalanche((state + (pos + 1) * 0x9E3779B97F4A7C15) mod 2**64)
    uniform(state, pos)    = (raw(state, pos) >> 11) * 2.0**-53      in [0, 1)

The avalanche function and golden-ratio increment are the SplitMix64
finalizer and step constants, used here in counter mode.  Scalar (pure
Python) and vectorized (numpy uint64) evaluations produce identical bits;
tests pin both.
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
_MIX_A = 0xBF58476D1CE4E5B9
_MIX_B = 0x94D049BB133111EB

_U_GOLDEN = np.uint64(GOLDEN)
_U_MIX_A = np.uint64(_MIX_A)
_U_MIX_B = np.uint64(_MIX_B)
_U_ONE = np.uint64(1)
_SH30 = np.uint64(30)
_SH27 = np.uint64(27)
_SH31 = np.uint64(31)
_SH11 = np.uint64(11)
_INV53 = 2.0 ** -53


def avalanche(z: int) -> int:
    """SplitMix64 finalizer on a 64-bit integer (pure Python)."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * _MIX_A) & MASK64
    z = ((z ^ (z >> 27)) * _MIX_B) & MASK64
    return z ^ (z >> 31)


def trial_state(master_seed: int, trial_index: int) -> int:
    """Base stream state for one trial."""
    return avalanche((master_seed + (trial_index + 1) * GOLDEN) & MASK64)


def stream_raw(state: int, position: int) -> int:
    """The 64-bit value at one stream position."""
    return avalanche((state + (position + 1) * GOLDEN) & MASK64)


def stream_uniform(state: int, position: int) -> float:
    """Uniform in [0, 1) at one stream position."""
    return (stream_raw(state, position) >> 11) * _INV53


def stream_index(state: int, position: int, bound: int) -> int:
    """Uniform integer in [0, bound) at one stream position."""
    return min(int(stream_uniform(state, position) * bound), bound - 1)


def _avalanche_np(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> _SH30)) * _U_MIX_A
    z = (z ^ (z >> _SH27)) * _U_MIX_B
    return z ^ (z >> _SH31)


def uniforms_np(states: np.ndarray, positions: np.ndarray) -> np.ndarray:
    """Vectorized uniforms; broadcasts states against positions.

    Both arguments must be uint64 arrays (or broadcastable shapes thereof).
    """
    with np.errstate(over="ignore"):  # wraparound mod 2**64 is the algorithm
        z = states + (positions + _U_ONE) * _U_GOLDEN
        return (_avalanche_np(z) >> _SH11).astype(np.float64) * _INV53


def indices_np(states: np.ndarray, positions: np.ndarray, bound: int) -> np.ndarray:
    """Vectorized uniform integers in [0, bound)."""
    idx = (uniforms_np(states, positions) * bound).astype(np.int64)
    return np.minimum(idx, bound - 1)


def trial_states_np(master_seed: int, trial_indices: np.ndarray) -> np.ndarray:
    """Vectorized per-trial base states."""
    seed = np.uint64(master_seed & MASK64)
    with np.errstate(over="ignore"):
        z = seed + (trial_indices.astype(np.uint64) + _U_ONE) * _U_GOLDEN
        return _avalanche_np(z)


class TrialStream:
    """Sequential view of one trial's stream: each draw consumes the next position.

    Equivalent to calling :func:`stream_uniform` with positions 0, 1, 2, ...;
    array draws use the vectorized path and advance the counter by the array
    length.  Rebuilding a stream from the same (master_seed, trial_index)
    replays identical values.
    """

    __slots__ = ("state", "position")

    def __init__(self, master_seed: int, trial_index: int = 0):
        self.state = trial_state(master_seed, trial_index)
        self.position = 0

    def uniform(self) -> float:
        value = stream_uniform(self.state, self.position)
        self.position += 1
        return value

    def uniforms(self, count: int) -> np.ndarray:
        positions = np.arange(self.position, self.position + count, dtype=np.uint64)
        self.position += count
        return uniforms_np(np.uint64(self.state), positions)

    def index(self, bound: int) -> int:
        value = stream_index(self.state, self.position, bound)
        self.position += 1
        return value

    def indices(self, bound: int, count: int) -> np.ndarray:
        positions = np.arange(self.position, self.position + count, dtype=np.uint64)
        self.position += count
        return indices_np(np.uint64(self.state), positions, bound)
