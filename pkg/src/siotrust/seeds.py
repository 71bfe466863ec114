"""Splittable seed derivation, stable across processes and Python versions.

Per-run seeds derive from the master seed plus labels, so adding runs or
reordering parameter grids never changes earlier runs' randomness.
"""

from __future__ import annotations

_MASK = (1 << 64) - 1


def _splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _MASK
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


def _fold(state: int, value: int) -> int:
    return _splitmix64(state ^ (value & _MASK))


def derive_seed(master: int, *parts) -> int:
    """Mix the master seed with integer or string labels into a 64-bit seed."""
    state = _splitmix64(master & _MASK)
    for part in parts:
        if isinstance(part, str):
            for byte in part.encode("utf-8"):
                state = _fold(state, byte + 0x100)
        elif isinstance(part, int):
            state = _fold(state, part)
        else:
            raise TypeError(f"seed parts must be int or str, got {type(part).__name__}")
    return state
