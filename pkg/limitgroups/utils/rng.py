"""Seeded sampling.

Every random draw in the library comes from ``numpy.random.Generator``
over the Philox counter-based bit generator, so a 64-bit seed fixes the
whole sample sequence.
"""
from __future__ import annotations

from typing import List

import numpy as np

from limitgroups.config.settings import AppConfig
from limitgroups.services.words import FreeWord, alphabet


def make_rng(seed: int | None = None) -> np.random.Generator:
    seed = AppConfig.DEFAULT_SEED if seed is None else seed
    return np.random.Generator(np.random.Philox(seed & (2**64 - 1)))


def signed_exponents(rng: np.random.Generator, count: int, low: int, high: int) -> List[int]:
    """``count`` integers with ``low <= |t| <= high`` and a random sign."""
    if low < 1 or high < low:
        raise ValueError(f"need 1 <= low <= high, got {low}, {high}")
    magnitudes = rng.integers(low, high + 1, size=count)
    signs = rng.choice(np.array([-1, 1]), size=count)
    return [int(m) * int(s) for m, s in zip(magnitudes, signs)]


def random_word(rng: np.random.Generator, rank: int, length: int) -> FreeWord:
    """Uniform reduced word of exactly ``length`` letters."""
    letters = alphabet(rank)
    out: List[int] = []
    while len(out) < length:
        choices = [x for x in letters if not out or x != -out[-1]]
        out.append(choices[int(rng.integers(len(choices)))])
    return FreeWord(tuple(out), rank)


def random_words(rng: np.random.Generator, rank: int, count: int, max_length: int) -> List[FreeWord]:
    lengths = rng.integers(0, max_length + 1, size=count)
    return [random_word(rng, rank, int(n)) for n in lengths]
