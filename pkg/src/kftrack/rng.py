"""Seeded generator with a fixed uniform-to-normal transform.

Uniforms come from the stdlib Mersenne Twister (``random.Random``), whose
output for a given integer seed is stable across platforms and Python
versions.  Normal deviates use the basic Box-Muller transform, consuming two
uniforms per pair and returning the cosine branch first, then the cached
sine branch.
"""

from __future__ import annotations

import math
import random


class SeededRng:
    def __init__(self, seed: int):
        if seed < 0:
            raise ValueError(f"seed must be non-negative, got {seed}")
        self.seed = seed
        self._uniform = random.Random(seed)
        self._spare = None

    def uniform(self) -> float:
        """Uniform deviate on [0, 1)."""
        return self._uniform.random()

    def standard_normal(self) -> float:
        if self._spare is not None:
            z, self._spare = self._spare, None
            return z
        u1 = 1.0 - self._uniform.random()  # (0, 1], keeps log finite
        u2 = self._uniform.random()
        r = math.sqrt(-2.0 * math.log(u1))
        theta = 2.0 * math.pi * u2
        self._spare = r * math.sin(theta)
        return r * math.cos(theta)

    def standard_normals(self, n: int) -> list[float]:
        return [self.standard_normal() for _ in range(n)]
