"""Deterministic seed derivation.

One 64-bit master seed fans out into per-run, per-stage and per-guess streams
through a splittable counter construction (splitmix64 over a path of
integers). Derivation is pure, so any subtree of the computation can be
re-run, reordered or parallelized without perturbing sibling streams.
"""

from __future__ import annotations

import random

MASK64 = (1 << 64) - 1


def splitmix64(x: int) -> int:
    """One splitmix64 scramble step; full-period permutation of 64-bit ints."""
    x = (x + 0x9E3779B97F4A7C15) & MASK64
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return (z ^ (z >> 31)) & MASK64


def derive(seed: int, *path: int) -> int:
    """Derive a child seed from `seed` and an integer path.

    derive(s, a, b) != derive(s, a, b') for b != b' with overwhelming
    probability; the chain is splitmix64 applied to seed xor step.
    """
    x = seed & MASK64
    for p in path:
        x = splitmix64(x ^ (p & MASK64) ^ 0xA5A5A5A5A5A5A5A5)
    return x


def label_path(text: str) -> int:
    """Stable integer for a string path component (stream names)."""
    x = 0xCBF29CE484222325
    for ch in text.encode():
        x = ((x ^ ch) * 0x100000001B3) & MASK64
    return x


def stream(seed: int, name: str, *path: int) -> random.Random:
    """A stdlib Random seeded from (seed, name, path)."""
    return random.Random(derive(seed, label_path(name), *path))
